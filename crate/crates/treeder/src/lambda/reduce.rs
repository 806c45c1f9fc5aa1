//! β-reduction. A name-based reference normaliser, and the node-level
//! route: contract chosen redexes by following pointers, cut the term into
//! thin factors around the redexes of one variable and type, and repeat
//! over all types from the largest down.

use std::collections::{HashMap, HashSet};

use super::{binders, binders_by, is_linear, subterm_types, typable_within, Lam, LambdaTerm, SimpleType, TypeSet, Vars};
use crate::error::{bail, Error, Result};
use crate::prime;
use crate::term::{Ranked, Slot, Term};
use crate::value::{Fold, Grouping};

// ----- reference normaliser -----

#[derive(Clone, Debug)]
enum Ex {
    Var(String),
    Abs(String, Box<Ex>),
    App(Box<Ex>, Box<Ex>),
    Out(String, Vec<Ex>),
}

fn to_ex(t: &LambdaTerm) -> Result<Ex> {
    t.fold_up::<Ex>(|pos, s, kids| {
        let mut k = kids.into_iter();
        Ok(match s {
            Slot::Port => bail!(Precondition, "port at slot {pos}"),
            Slot::Node(Lam::Var(x)) => Ex::Var(x.clone()),
            Slot::Node(Lam::Abs(x)) => Ex::Abs(x.clone(), Box::new(k.next().unwrap())),
            Slot::Node(Lam::App) => {
                let f = k.next().unwrap();
                Ex::App(Box::new(f), Box::new(k.next().unwrap()))
            }
            Slot::Node(Lam::Out(a, _)) => Ex::Out(a.clone(), k.collect()),
        })
    })
}

fn from_ex(e: &Ex) -> LambdaTerm {
    let mut slots = Vec::new();
    let mut todo = vec![e];
    while let Some(e) = todo.pop() {
        match e {
            Ex::Var(x) => slots.push(Slot::Node(Lam::Var(x.clone()))),
            Ex::Abs(x, b) => {
                slots.push(Slot::Node(Lam::Abs(x.clone())));
                todo.push(b);
            }
            Ex::App(f, a) => {
                slots.push(Slot::Node(Lam::App));
                todo.push(a);
                todo.push(f);
            }
            Ex::Out(a, args) => {
                slots.push(Slot::Node(Lam::Out(a.clone(), args.len())));
                todo.extend(args.iter().rev());
            }
        }
    }
    Term::from_slots(slots).expect("well-formed")
}

fn free_names(e: &Ex, bound: &mut Vec<String>, out: &mut HashSet<String>) {
    match e {
        Ex::Var(x) => {
            if !bound.contains(x) {
                out.insert(x.clone());
            }
        }
        Ex::Abs(x, b) => {
            bound.push(x.clone());
            free_names(b, bound, out);
            bound.pop();
        }
        Ex::App(f, a) => {
            free_names(f, bound, out);
            free_names(a, bound, out);
        }
        Ex::Out(_, args) => args.iter().for_each(|a| free_names(a, bound, out)),
    }
}

fn occurs_free(e: &Ex, x: &str) -> bool {
    match e {
        Ex::Var(y) => y == x,
        Ex::Abs(y, b) => y != x && occurs_free(b, x),
        Ex::App(f, a) => occurs_free(f, x) || occurs_free(a, x),
        Ex::Out(_, args) => args.iter().any(|a| occurs_free(a, x)),
    }
}

fn rename_free(e: Ex, y: &str, z: &str) -> Ex {
    match e {
        Ex::Var(v) if v == y => Ex::Var(z.to_string()),
        Ex::Var(_) => e,
        Ex::Abs(v, b) if v == y => Ex::Abs(v, b),
        Ex::Abs(v, b) => Ex::Abs(v, Box::new(rename_free(*b, y, z))),
        Ex::App(f, a) => Ex::App(Box::new(rename_free(*f, y, z)), Box::new(rename_free(*a, y, z))),
        Ex::Out(a, args) => Ex::Out(a, args.into_iter().map(|e| rename_free(e, y, z)).collect()),
    }
}

/// Fresh names `base_1`, `base_2`, ... avoiding everything seen so far.
struct Fresh {
    used: HashSet<String>,
}

impl Fresh {
    fn new<'a>(names: impl IntoIterator<Item = &'a String>) -> Fresh {
        Fresh { used: names.into_iter().cloned().collect() }
    }

    fn of_term<'a>(t: &'a LambdaTerm, extra: impl IntoIterator<Item = &'a String>) -> Fresh {
        let names = t.labels().filter_map(|l| match l {
            Lam::Var(x) | Lam::Abs(x) => Some(x),
            _ => None,
        });
        Fresh::new(names.chain(extra))
    }

    fn name(&mut self, base: &str) -> String {
        (1..)
            .map(|n| format!("{base}_{n}"))
            .find(|c| self.used.insert(c.clone()))
            .unwrap()
    }
}

struct Reducer {
    fresh: Fresh,
    fuel: usize,
}

impl Reducer {
    fn tick(&mut self) -> Result<()> {
        if self.fuel == 0 {
            bail!(Precondition, "reduction did not finish within the step budget");
        }
        self.fuel -= 1;
        Ok(())
    }

    fn nf(&mut self, e: Ex) -> Result<Ex> {
        Ok(match e {
            Ex::Var(_) => e,
            Ex::Abs(x, b) => Ex::Abs(x, Box::new(self.nf(*b)?)),
            Ex::Out(a, args) => Ex::Out(a, args.into_iter().map(|e| self.nf(e)).collect::<Result<_>>()?),
            Ex::App(f, a) => match self.whnf(*f)? {
                Ex::Abs(x, b) => {
                    self.tick()?;
                    let r = self.subst(*b, &x, &a);
                    self.nf(r)?
                }
                f => Ex::App(Box::new(self.nf(f)?), Box::new(self.nf(*a)?)),
            },
        })
    }

    fn whnf(&mut self, e: Ex) -> Result<Ex> {
        match e {
            Ex::App(f, a) => match self.whnf(*f)? {
                Ex::Abs(x, b) => {
                    self.tick()?;
                    let r = self.subst(*b, &x, &a);
                    self.whnf(r)
                }
                f => Ok(Ex::App(Box::new(f), a)),
            },
            other => Ok(other),
        }
    }

    fn subst(&mut self, body: Ex, x: &str, arg: &Ex) -> Ex {
        let mut fv = HashSet::new();
        free_names(arg, &mut Vec::new(), &mut fv);
        self.subst_in(body, x, arg, &fv)
    }

    fn subst_in(&mut self, e: Ex, x: &str, arg: &Ex, fv: &HashSet<String>) -> Ex {
        match e {
            Ex::Var(ref y) if y == x => arg.clone(),
            Ex::Var(_) => e,
            Ex::Abs(y, b) if y == x => Ex::Abs(y, b),
            Ex::Abs(y, b) => {
                if fv.contains(&y) && occurs_free(&b, x) {
                    let z = self.fresh.name(&y);
                    let b = rename_free(*b, &y, &z);
                    Ex::Abs(z, Box::new(self.subst_in(b, x, arg, fv)))
                } else {
                    Ex::Abs(y, Box::new(self.subst_in(*b, x, arg, fv)))
                }
            }
            Ex::App(f, a) => Ex::App(
                Box::new(self.subst_in(*f, x, arg, fv)),
                Box::new(self.subst_in(*a, x, arg, fv)),
            ),
            Ex::Out(a, args) => Ex::Out(a, args.into_iter().map(|e| self.subst_in(e, x, arg, fv)).collect()),
        }
    }
}

/// β-normal form by leftmost-outermost reduction, renaming bound variables
/// to `name_1`, `name_2`, ... when a substitution would capture. Output
/// letters are inert. Fails after a large step budget, which only untyped
/// inputs can exhaust.
pub fn reference_normalize(t: &LambdaTerm) -> Result<LambdaTerm> {
    let mut r = Reducer { fresh: Fresh::of_term(t, []), fuel: 10_000_000 };
    Ok(from_ex(&r.nf(to_ex(t)?)?))
}

/// Normalises a term with ports by reading port `i` as a fresh variable.
/// Ports of the result keep pointing at the original port they came from.
pub fn reference_normalize_ports(t: &LambdaTerm) -> Result<Fold<LambdaTerm>> {
    let mut i = 0;
    let closed = Term::from_slots(
        t.slots()
            .iter()
            .map(|s| match s {
                Slot::Port => {
                    i += 1;
                    Slot::Node(Lam::Var(format!("#{i}")))
                }
                Slot::Node(l) => Slot::Node(l.clone()),
            })
            .collect(),
    )?;
    let nf = reference_normalize(&closed)?;
    let mut grouping = Vec::new();
    let slots = nf
        .slots()
        .iter()
        .map(|s| match s {
            Slot::Node(Lam::Var(x)) if x.starts_with('#') => {
                grouping.push((x[1..].parse::<usize>().unwrap(), 1));
                Slot::Port
            }
            other => other.clone(),
        })
        .collect();
    Fold::new(Term::from_slots(slots)?, Grouping::from_vec_unchecked(grouping), 1, t.arity())
}

/// Equality up to renaming of bound variables.
pub fn alpha_eq(a: &LambdaTerm, b: &LambdaTerm) -> bool {
    a.len() == b.len() && debruijn(a) == debruijn(b)
}

#[derive(PartialEq, Eq, Debug)]
enum Db<'a> {
    Port,
    Bound(usize),
    Free(&'a str),
    Abs,
    App,
    Out(&'a str, usize),
}

fn debruijn(t: &LambdaTerm) -> Vec<Db<'_>> {
    let bind = binders(t);
    let parents = t.parents();
    let mut depth = vec![0usize; t.len()];
    for p in 0..t.len() {
        if let Some((q, _)) = parents[p] {
            depth[p] = depth[q] + usize::from(matches!(t.label(q), Some(Lam::Abs(_))));
        }
    }
    t.slots()
        .iter()
        .enumerate()
        .map(|(p, s)| match s {
            Slot::Port => Db::Port,
            Slot::Node(Lam::Var(x)) => match bind[p] {
                Some(b) => Db::Bound(depth[p] - depth[b] - 1),
                None => Db::Free(x),
            },
            Slot::Node(Lam::Abs(_)) => Db::Abs,
            Slot::Node(Lam::App) => Db::App,
            Slot::Node(Lam::Out(a, n)) => Db::Out(a, *n),
        })
        .collect()
}

// ----- redexes -----

fn is_redex_at<S>(slots: &[S], pos: usize, lam: impl Fn(&S) -> Option<&Lam>) -> bool {
    matches!(lam(&slots[pos]), Some(Lam::App)) && matches!(slots.get(pos + 1).and_then(&lam), Some(Lam::Abs(_)))
}

fn slot_lam<L: AsLam>(s: &Slot<L>) -> Option<&Lam> {
    match s {
        Slot::Node(l) => Some(l.lam()),
        Slot::Port => None,
    }
}

/// Positions of the application nodes of all redexes.
pub fn redexes(t: &LambdaTerm) -> Vec<usize> {
    (0..t.len()).filter(|&p| is_redex_at(t.slots(), p, slot_lam)).collect()
}

pub fn is_normal(t: &LambdaTerm) -> bool {
    redexes(t).is_empty()
}

/// Application nodes of the redexes binding `x` whose abstraction has
/// type `sigma`.
pub fn find_redexes(t: &LambdaTerm, vars: &Vars, x: &str, sigma: &SimpleType) -> Result<Vec<usize>> {
    let types = subterm_types(t, vars)?;
    Ok(redexes(t)
        .into_iter()
        .filter(|&p| matches!(t.label(p + 1), Some(Lam::Abs(y)) if y == x) && types[p + 1] == *sigma)
        .collect())
}

fn non_port_children<L>(t: &Term<L>, pos: usize, ends: &[usize]) -> usize
where
    L: Ranked,
{
    t.children_of(pos, ends).into_iter().filter(|&c| !matches!(t.slots()[c], Slot::Port)).count()
}

/// Every node has at most one child that is not a port.
pub fn is_word_shaped(t: &LambdaTerm) -> bool {
    let ends = t.ends();
    (0..t.len()).all(|p| non_port_children(t, p, &ends) <= 1)
}

/// Every node with two children that are not ports is the application node
/// of a redex.
pub fn is_thin(t: &LambdaTerm) -> bool {
    is_thin_by(t)
}

fn is_thin_by<L: AsLam + Ranked>(t: &Term<L>) -> bool {
    let ends = t.ends();
    (0..t.len()).all(|p| non_port_children(t, p, &ends) <= 1 || is_redex_at(t.slots(), p, slot_lam))
}

/// Occurrences of each bound variable, keyed by binder.
fn occurrences(bind: &[Option<usize>]) -> HashMap<usize, Vec<usize>> {
    let mut out: HashMap<usize, Vec<usize>> = HashMap::new();
    for (v, b) in bind.iter().enumerate() {
        if let Some(b) = b {
            out.entry(*b).or_default().push(v);
        }
    }
    out
}

fn single_occurrence(occ: &HashMap<usize, Vec<usize>>, abs: usize) -> Result<usize> {
    match occ.get(&abs).map(Vec::as_slice) {
        Some([v]) => Ok(*v),
        other => bail!(
            Precondition,
            "variable bound at slot {abs} occurs {} times",
            other.map_or(0, <[usize]>::len)
        ),
    }
}

/// The redex at `app`, its variable and every node between, sorted.
pub fn full_redex_span(t: &LambdaTerm, app: usize) -> Result<Vec<usize>> {
    if !is_redex_at(t.slots(), app, slot_lam) {
        bail!(Precondition, "slot {app} is not the application node of a redex");
    }
    let v = single_occurrence(&occurrences(&binders(t)), app + 1)?;
    let parents = t.parents();
    let mut span = vec![v];
    let mut c = v;
    while c != app {
        c = parents[c].unwrap().0;
        span.push(c);
    }
    span.sort_unstable();
    Ok(span)
}

/// Nodes that are neither part of a redex (application or abstraction)
/// nor the variable of one.
pub fn survivors(t: &LambdaTerm) -> Vec<usize> {
    let bind = binders(t);
    let rs = redexes(t);
    let mut gone: HashSet<usize> = rs.iter().flat_map(|&a| [a, a + 1]).collect();
    let abs: HashSet<usize> = rs.iter().map(|&a| a + 1).collect();
    for (v, b) in bind.iter().enumerate() {
        if b.is_some_and(|b| abs.contains(&b)) {
            gone.insert(v);
        }
    }
    t.node_positions().into_iter().filter(|p| !gone.contains(p)).collect()
}

// ----- developments -----

pub(crate) trait AsLam {
    fn lam(&self) -> &Lam;
}

impl AsLam for Lam {
    fn lam(&self) -> &Lam {
        self
    }
}

/// A label remembering the slot it came from.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct Tagged {
    lam: Lam,
    tag: usize,
}

impl Ranked for Tagged {
    fn arity(&self) -> usize {
        self.lam.arity()
    }
}

impl AsLam for Tagged {
    fn lam(&self) -> &Lam {
        &self.lam
    }
}

fn tag(t: &LambdaTerm) -> Term<Tagged> {
    let slots = t
        .slots()
        .iter()
        .enumerate()
        .map(|(p, s)| match s {
            Slot::Port => Slot::Port,
            Slot::Node(l) => Slot::Node(Tagged { lam: l.clone(), tag: p }),
        })
        .collect();
    Term::from_slots(slots).expect("same shape")
}

/// Contracts the given redexes simultaneously. Returns the result, the
/// input slot of each output slot, and the input port (0-based) of each
/// output port. Needs each targeted variable to occur exactly once.
fn develop_by<L: AsLam + Ranked + Clone>(t: &Term<L>, targets: &[usize]) -> Result<(Term<L>, Vec<usize>, Vec<usize>)> {
    let ends = t.ends();
    let bind = binders_by(t.slots(), &ends, slot_lam);
    let occ = occurrences(&bind);
    let mut jump: HashMap<usize, usize> = HashMap::new();
    for &a in targets {
        if !is_redex_at(t.slots(), a, slot_lam) {
            bail!(Precondition, "slot {a} is not the application node of a redex");
        }
        let abs = a + 1;
        let v = single_occurrence(&occ, abs)?;
        // the application becomes the body, the variable becomes the argument
        jump.insert(a, abs + 1);
        jump.insert(v, ends[abs]);
    }
    let resolve = |mut p: usize| -> Result<usize> {
        for _ in 0..=t.len() {
            match jump.get(&p) {
                Some(&q) => p = q,
                None => return Ok(p),
            }
        }
        bail!(Structural, "cyclic redex resolution")
    };
    let ports_before = t.ports_before();
    let mut slots = Vec::with_capacity(t.len());
    let mut origin = Vec::with_capacity(t.len());
    let mut ports = Vec::new();
    let mut todo = vec![resolve(0)?];
    while let Some(p) = todo.pop() {
        origin.push(p);
        match &t.slots()[p] {
            Slot::Port => {
                slots.push(Slot::Port);
                ports.push(ports_before[p]);
            }
            Slot::Node(l) => {
                slots.push(Slot::Node(l.clone()));
                for c in t.children_of(p, &ends).into_iter().rev() {
                    todo.push(resolve(c)?);
                }
            }
        }
    }
    Ok((Term::from_slots(slots)?, origin, ports))
}

/// Renames binders until every variable is bound by the slot `want` names
/// for it (`None` for free).
fn repair_names(t: &LambdaTerm, want: &[Option<usize>]) -> Result<LambdaTerm> {
    let ends = t.ends();
    let mut labels: Vec<Option<Lam>> = t
        .slots()
        .iter()
        .map(|s| match s {
            Slot::Node(l) => Some(l.clone()),
            Slot::Port => None,
        })
        .collect();
    let mut fresh = Fresh::of_term(t, []);
    let mut renamed = HashSet::new();
    loop {
        let actual = binders_by(&labels, &ends, Option::as_ref);
        let bad = (0..labels.len()).find(|&p| matches!(labels[p], Some(Lam::Var(_))) && actual[p] != want[p]);
        let Some(p) = bad else { break };
        let b = want[p].or(actual[p]).unwrap();
        if !renamed.insert(b) {
            bail!(Structural, "variable at slot {p} escaped its binder");
        }
        let Some(Lam::Abs(x)) = &labels[b] else {
            bail!(Structural, "slot {b} is not a binder");
        };
        let z = fresh.name(x);
        labels[b] = Some(Lam::Abs(z.clone()));
        for q in 0..labels.len() {
            if want[q] == Some(b) {
                labels[q] = Some(Lam::Var(z.clone()));
            }
        }
    }
    Term::from_slots(labels.into_iter().map(|l| l.map_or(Slot::Port, Slot::Node)).collect())
}

/// For each output slot, the output slot of the binder its input variable
/// had.
fn wanted_binders(input: &LambdaTerm, out_len: usize, origin: &[usize]) -> Result<Vec<Option<usize>>> {
    let bind = binders(input);
    let out_of: HashMap<usize, usize> = origin.iter().enumerate().map(|(o, &i)| (i, o)).collect();
    let mut want = vec![None; out_len];
    for (o, &i) in origin.iter().enumerate() {
        if let Some(b) = bind[i] {
            match out_of.get(&b) {
                Some(&ob) => want[o] = Some(ob),
                None => bail!(Structural, "binder at slot {b} vanished but its variable survived"),
            }
        }
    }
    Ok(want)
}

/// Simultaneous contraction of a set of redexes.
#[derive(Clone, Debug)]
pub struct Development {
    pub term: LambdaTerm,
    /// Input slot of each output slot.
    pub origin: Vec<usize>,
    /// Input port (0-based) of each output port.
    pub ports: Vec<usize>,
}

pub fn develop(t: &LambdaTerm, targets: &[usize]) -> Result<Development> {
    let (term, origin, ports) = develop_by(t, targets)?;
    let want = wanted_binders(t, term.len(), &origin)?;
    Ok(Development { term: repair_names(&term, &want)?, origin, ports })
}

fn port_fold(term: LambdaTerm, ports: &[usize], outer: usize) -> Result<Fold<LambdaTerm>> {
    let g = Grouping::from_vec_unchecked(ports.iter().map(|&p| (p + 1, 1)).collect());
    Fold::new(term, g, 1, outer)
}

/// Normal form of a linear thin term with ports, together with the input
/// slot of each output slot. The output is word-shaped; its ports may come
/// in a different order, which the grouping records.
pub fn normalize_thin_traced(t: &LambdaTerm) -> Result<(Fold<LambdaTerm>, Vec<usize>)> {
    if !is_linear(t) {
        bail!(Precondition, "term is not linear");
    }
    if !is_thin(t) {
        bail!(Precondition, "term is not thin");
    }
    let mut cur = t.clone();
    let mut origin: Vec<usize> = (0..t.len()).collect();
    let mut ports: Vec<usize> = (0..t.arity()).collect();
    // each round removes at least one node pair
    for _ in 0..=t.len() {
        let rs = redexes(&cur);
        if rs.is_empty() {
            break;
        }
        let (next, o, p) = develop_by(&cur, &rs)?;
        origin = o.into_iter().map(|i| origin[i]).collect();
        ports = p.into_iter().map(|i| ports[i]).collect();
        cur = next;
    }
    if !is_normal(&cur) {
        bail!(Structural, "thin normalisation did not reach a normal form");
    }
    let want = wanted_binders(t, cur.len(), &origin)?;
    let cur = repair_names(&cur, &want)?;
    if !is_word_shaped(&cur) {
        bail!(Structural, "normal form of a thin term is not word-shaped");
    }
    Ok((port_fold(cur, &ports, t.arity())?, origin))
}

pub fn normalize_thin(t: &LambdaTerm) -> Result<Fold<LambdaTerm>> {
    normalize_thin_traced(t).map(|(f, _)| f)
}

// ----- thin factorisation -----

fn check_linear_typed(t: &LambdaTerm, vars: &Vars) -> Result<Vec<SimpleType>> {
    if !is_linear(t) {
        bail!(Undefined, "term is not linear");
    }
    subterm_types(t, vars).map_err(|e| Error::Undefined(e.to_string()))
}

/// Which child edges to cut so that every targeted redex stays whole and
/// every other branching node keeps at most one child.
fn thin_cuts(t: &LambdaTerm, targets: &[usize]) -> Result<Vec<bool>> {
    let ends = t.ends();
    let parents = t.parents();
    let occ = occurrences(&binders(t));
    // for nodes between a targeted redex and its variable: the child on that path
    let mut toward: Vec<Option<usize>> = vec![None; t.len()];
    for &a in targets {
        let mut c = single_occurrence(&occ, a + 1)?;
        while c != a {
            let (p, i) = parents[c].unwrap();
            toward[p] = Some(i);
            c = p;
        }
    }
    let target: HashSet<usize> = targets.iter().copied().collect();
    let mut cut = vec![false; t.len()];
    for p in 0..t.len() {
        let kids = t.children_of(p, &ends);
        if kids.len() < 2 || target.contains(&p) {
            continue;
        }
        for (i, c) in kids.into_iter().enumerate() {
            cut[c] = toward[p] != Some(i);
        }
    }
    Ok(cut)
}

/// Cuts `t` into thin factors such that every redex binding `x` with an
/// abstraction of type `sigma` lies inside one factor.
pub fn factorize_thin(t: &LambdaTerm, vars: &Vars, x: &str, sigma: &SimpleType) -> Result<Term<LambdaTerm>> {
    check_linear_typed(t, vars)?;
    let targets = find_redexes(t, vars, x, sigma)?;
    let cut = thin_cuts(t, &targets)?;
    let f = prime::factorize_by(t, |_, c| !cut[c]);
    if let Some(bad) = f.labels().find(|g| !is_thin(g)) {
        bail!(Structural, "factor {} is not thin", super::show(bad));
    }
    let parents = t.parents();
    let mut factor = vec![0usize; t.len()];
    for p in 1..t.len() {
        factor[p] = if cut[p] { p } else { factor[parents[p].unwrap().0] };
    }
    for &a in &targets {
        let span = full_redex_span(t, a)?;
        if span.iter().any(|&p| factor[p] != factor[a]) {
            bail!(Structural, "redex at slot {a} is split across factors");
        }
    }
    Ok(f)
}

/// Contracts every redex binding `x` whose abstraction has type `sigma`,
/// and no other.
pub fn eval_redexes(t: &LambdaTerm, vars: &Vars, x: &str, sigma: &SimpleType) -> Result<LambdaTerm> {
    check_linear_typed(t, vars)?;
    let targets = find_redexes(t, vars, x, sigma)?;
    if targets.is_empty() {
        return Ok(t.clone());
    }
    let cut = thin_cuts(t, &targets)?;
    let factors = prime::factorize_by(&tag(t), |_, c| !cut[c]);
    let wanted: HashSet<usize> = targets.iter().copied().collect();
    let folds = factors.try_map(|g| {
        let local: Vec<usize> = g
            .slots()
            .iter()
            .enumerate()
            .filter_map(|(i, s)| match s {
                Slot::Node(l) if wanted.contains(&l.tag) => Some(i),
                _ => None,
            })
            .collect();
        let (term, _, ports) = develop_by(g, &local)?;
        let grouping = Grouping::from_vec_unchecked(ports.iter().map(|&p| (p + 1, 1)).collect());
        Fold::new(term, grouping, 1, g.arity())
    })?;
    let flat = Term::flatten(&prime::untwist(&folds)?.payload);
    let mut origin = Vec::with_capacity(flat.len());
    let plain = flat.map(|l| {
        origin.push(l.tag);
        l.lam.clone()
    });
    let want = wanted_binders(t, plain.len(), &origin)?;
    repair_names(&plain, &want)
}

// ----- the linear pipeline -----

/// What [`normalize_linear`] did.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearTrace {
    /// Full sweeps over (type, variable), the last one finding nothing.
    pub passes: usize,
    /// `(sigma, x, redexes contracted)` in order.
    pub steps: Vec<(SimpleType, String, usize)>,
}

/// Gives every binder its own name, distinct from free names too. New
/// names get the type of the name they replace.
fn distinct_binders(t: &LambdaTerm, vars: &Vars) -> (LambdaTerm, Vars, HashMap<String, String>) {
    let bind = binders(t);
    let mut fresh = Fresh::of_term(t, vars.names());
    let mut seen: HashSet<String> = bind
        .iter()
        .enumerate()
        .filter_map(|(p, b)| match (b, t.label(p)) {
            (None, Some(Lam::Var(x))) => Some(x.clone()),
            _ => None,
        })
        .collect();
    let mut vars = vars.clone();
    let mut back = HashMap::new();
    let mut names: Vec<Option<String>> = vec![None; t.len()];
    for p in 0..t.len() {
        if let Some(Lam::Abs(x)) = t.label(p) {
            if !seen.insert(x.clone()) {
                let z = fresh.name(x);
                vars.insert(z.clone(), vars.get(x).expect("typed input").clone());
                back.insert(z.clone(), x.clone());
                names[p] = Some(z);
            }
        }
    }
    let slots = t
        .slots()
        .iter()
        .enumerate()
        .map(|(p, s)| match s {
            Slot::Node(Lam::Abs(_)) if names[p].is_some() => Slot::Node(Lam::Abs(names[p].clone().unwrap())),
            Slot::Node(Lam::Var(_)) if bind[p].is_some_and(|b| names[b].is_some()) => {
                Slot::Node(Lam::Var(names[bind[p].unwrap()].clone().unwrap()))
            }
            other => other.clone(),
        })
        .collect();
    (Term::from_slots(slots).expect("same shape"), vars, back)
}

/// Undoes [`distinct_binders`] wherever that captures nothing.
fn restore_names(t: &LambdaTerm, back: &HashMap<String, String>) -> LambdaTerm {
    let ends = t.ends();
    let mut labels: Vec<Option<Lam>> = t
        .slots()
        .iter()
        .map(|s| match s {
            Slot::Node(l) => Some(l.clone()),
            Slot::Port => None,
        })
        .collect();
    let base = binders_by(&labels, &ends, Option::as_ref);
    for b in 0..labels.len() {
        let Some(Lam::Abs(z)) = &labels[b] else { continue };
        let Some(x) = back.get(z) else { continue };
        let saved = labels.clone();
        labels[b] = Some(Lam::Abs(x.clone()));
        for q in 0..labels.len() {
            if base[q] == Some(b) {
                labels[q] = Some(Lam::Var(x.clone()));
            }
        }
        if binders_by(&labels, &ends, Option::as_ref) != base {
            labels = saved;
        }
    }
    Term::from_slots(labels.into_iter().map(|l| l.map_or(Slot::Port, Slot::Node)).collect()).expect("same shape")
}

/// Normal form of a linear term typable within `types`; `Undefined`
/// otherwise.
pub fn normalize_linear(t: &LambdaTerm, types: &TypeSet, vars: &Vars) -> Result<LambdaTerm> {
    normalize_linear_traced(t, types, vars).map(|(n, _)| n)
}

pub fn normalize_linear_traced(t: &LambdaTerm, types: &TypeSet, vars: &Vars) -> Result<(LambdaTerm, LinearTrace)> {
    if t.arity() > 0 {
        bail!(Undefined, "term has ports");
    }
    if !is_linear(t) {
        bail!(Undefined, "term is not linear");
    }
    if !typable_within(t, types, vars) {
        bail!(Undefined, "term cannot be typed within the type set");
    }
    let (mut cur, ext, back) = distinct_binders(t, vars);
    let budget = (types.len() * vars.len()).max(1);
    let arrows = types.arrows_by_size();
    let mut trace = LinearTrace::default();
    loop {
        trace.passes += 1;
        if trace.passes > budget {
            bail!(Structural, "normalisation still finds redexes after {budget} passes");
        }
        let mut changed = false;
        for sigma in &arrows {
            for x in ext.names() {
                let found = find_redexes(&cur, &ext, x, sigma)?;
                if !found.is_empty() {
                    cur = eval_redexes(&cur, &ext, x, sigma)?;
                    trace.steps.push((sigma.clone(), x.clone(), found.len()));
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    Ok((restore_names(&cur, &back), trace))
}

#[cfg(test)]
mod tests {
    use super::super::{exponential, exponential_vars, free_vars, parse_term, show, shadowing_chain};
    use super::*;

    fn o() -> SimpleType {
        SimpleType::O
    }

    fn nf(src: &str) -> String {
        show(&reference_normalize(&parse_term(src).unwrap()).unwrap())
    }

    #[test]
    fn reference_examples() {
        assert_eq!(nf("(app (lam x x) y)"), "y");
        assert_eq!(nf("(lam y (lam x (app y (app y x))))"), "(lam y (lam x (app y (app y x))))");
        // capture: the inner binder is renamed
        assert_eq!(nf("(app (lam x (lam y (app x y))) y)"), "(lam y_1 (app y y_1))");
        assert_eq!(nf("(app (lam x (out a x x)) (out c))"), "(out a (out c) (out c))");
    }

    #[test]
    fn exponential_blows_up() {
        for n in 0..=10 {
            let t = exponential(n);
            let leaves = reference_normalize(&t).unwrap().slots().iter().filter(|s| matches!(s, Slot::Node(Lam::Var(v)) if v == "x")).count();
            assert!(leaves >= 1 << n, "n = {n}");
            let ts = TypeSet::new([SimpleType::order(2)]);
            let r = normalize_linear(&t, &ts, &exponential_vars());
            if n == 0 {
                assert_eq!(r.unwrap(), t);
            } else {
                assert!(r.unwrap_err().is_undefined());
            }
        }
    }

    #[test]
    fn redex_scan() {
        let vars = Vars::new([("x", o()), ("y", o())]);
        let t = parse_term("(app (lam x x) y)").unwrap();
        assert_eq!(find_redexes(&t, &vars, "x", &SimpleType::order(1)).unwrap(), vec![0]);
        assert!(find_redexes(&t, &vars, "y", &SimpleType::order(1)).unwrap().is_empty());
        assert_eq!(full_redex_span(&t, 0).unwrap(), vec![0, 1, 2]);
        assert!(is_thin(&parse_term("x").unwrap()));
        assert!(!is_thin(&parse_term("(app f x)").unwrap()));
        assert!(is_thin(&parse_term("(app f _)").unwrap()));
    }

    #[test]
    fn thin_examples() {
        let t = parse_term("(out a _ (out b x _))").unwrap();
        let f = normalize_thin(&t).unwrap();
        assert_eq!(f.payload, t);
        assert_eq!(f.grouping, Grouping::identity(2));
        let t = parse_term("(app (lam x (app _ x)) z)").unwrap();
        let (f, origin) = normalize_thin_traced(&t).unwrap();
        assert_eq!(show(&f.payload), "(app _ z)");
        assert_eq!(origin, vec![2, 3, 5]);
        assert_eq!(survivors(&t), vec![2, 5]);
        assert!(normalize_thin(&parse_term("(app (lam x (app y x)) z)").unwrap()).is_err());
        // the argument's port moves in front of the body's port
        let t = parse_term("(app (lam x (out a _ x)) (out b _))").unwrap();
        let f = normalize_thin(&t).unwrap();
        assert_eq!(show(&f.payload), "(out a _ (out b _))");
        assert_eq!(f.grouping.as_slice(), &[(1, 1), (2, 1)]);
        let t = parse_term("(app (lam x (out a x _)) (out b _))").unwrap();
        let f = normalize_thin(&t).unwrap();
        assert_eq!(show(&f.payload), "(out a (out b _) _)");
        assert_eq!(f.grouping.as_slice(), &[(2, 1), (1, 1)]);
        assert_eq!(f, reference_normalize_ports(&t).unwrap());
    }

    #[test]
    fn factorise_without_targets_cuts_all_branching() {
        let vars = Vars::new([("x", o()), ("y", o()), ("f", SimpleType::order(2))]);
        let t = parse_term("(app (app f x) (app (lam y y) x))").unwrap();
        let f = factorize_thin(&t, &vars, "x", &SimpleType::order(1)).unwrap();
        assert!(f.labels().all(is_word_shaped));
        assert_eq!(Term::flatten(&f), t);
        let g = factorize_thin(&t, &vars, "y", &SimpleType::order(1)).unwrap();
        assert_eq!(Term::flatten(&g), t);
        assert!(g.labels().any(|h| show(h) == "(app (lam y y) x)"));
    }

    #[test]
    fn eval_one_type_at_a_time() {
        let vars = Vars::new([("x", o()), ("y", o()), ("z", o()), ("g", SimpleType::order(1))]);
        let t = parse_term("(app (lam g (app g z)) (lam y y))").unwrap();
        let s = eval_redexes(&t, &vars, "g", &SimpleType::arrow(SimpleType::order(1), o())).unwrap();
        assert_eq!(show(&s), "(app (lam y y) z)");
        let u = eval_redexes(&s, &vars, "y", &SimpleType::order(1)).unwrap();
        assert_eq!(show(&u), "z");
        assert_eq!(eval_redexes(&u, &vars, "y", &SimpleType::order(1)).unwrap(), u);
        let ts = TypeSet::new([SimpleType::arrow(SimpleType::order(1), o())]);
        let (n, trace) = normalize_linear_traced(&t, &ts, &vars).unwrap();
        assert_eq!(show(&n), "z");
        assert_eq!(trace.passes, 2);
    }

    #[test]
    fn linear_pipeline_avoids_capture() {
        let vars = Vars::new([("x", o()), ("y", o()), ("f", SimpleType::order(2)), ("h", SimpleType::order(2))]);
        // swapping arguments through a binder of the same name
        let t = parse_term("(lam x (lam y (app (app (lam x (lam y (app (app f x) y))) y) x)))").unwrap();
        let ts = TypeSet::new([SimpleType::order(2)]);
        let n = normalize_linear(&t, &ts, &vars).unwrap();
        let r = reference_normalize(&t).unwrap();
        assert!(alpha_eq(&n, &r), "{} vs {}", show(&n), show(&r));
        assert_eq!(free_vars(&n), vec!["f"]);
        assert!(normalize_linear(&shadowing_chain(2), &TypeSet::new([SimpleType::order(2)]), &vars).unwrap_err().is_undefined());
        assert!(normalize_linear(&parse_term("(app (lam x x) y)").unwrap(), &TypeSet::new([o()]), &vars).unwrap_err().is_undefined());
        let id = normalize_linear(&parse_term("(app (lam x x) y)").unwrap(), &TypeSet::new([SimpleType::order(1)]), &vars).unwrap();
        assert_eq!(show(&id), "y");
    }
}
