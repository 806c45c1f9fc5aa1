//! Finite monoids, branch homomorphisms and factorisation forests for terms.
//!
//! A branch homomorphism gives every (label, port) pair a monoid element;
//! the value of a path is the product of the values along it, root first.
//! [`factorise`] turns a term into a nested factorisation in which every
//! layer is homogeneous for that homomorphism.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{bail, Error, Result};
use crate::matrix::Twist;
use crate::prime::factorize_by;
use crate::sexp::{Sexp, ToSexp};
use crate::term::{Ranked, Slot, Term};

/// A finite monoid given by its multiplication table. Elements are indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteMonoid {
    names: Vec<String>,
    unit: usize,
    table: Vec<usize>,
}

impl FiniteMonoid {
    /// Checks totality, associativity and the unit laws.
    pub fn new(names: Vec<String>, unit: usize, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = names.len();
        if unit >= n {
            bail!(Validation, "unit is not an element");
        }
        if table.len() != n || table.iter().any(|r| r.len() != n) {
            bail!(Validation, "multiplication table must be {n} x {n}");
        }
        if table.iter().flatten().any(|&z| z >= n) {
            bail!(Validation, "multiplication table mentions an unknown element");
        }
        let m = FiniteMonoid { names, unit, table: table.into_iter().flatten().collect() };
        for x in 0..n {
            if m.mul(unit, x) != x || m.mul(x, unit) != x {
                bail!(Validation, "unit law fails at {}", m.names[x]);
            }
            for y in 0..n {
                for z in 0..n {
                    if m.mul(m.mul(x, y), z) != m.mul(x, m.mul(y, z)) {
                        bail!(Validation, "not associative at ({}, {}, {})", m.names[x], m.names[y], m.names[z]);
                    }
                }
            }
        }
        Ok(m)
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn name(&self, x: usize) -> &str {
        &self.names[x]
    }

    pub fn element(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn mul(&self, x: usize, y: usize) -> usize {
        self.table[x * self.size() + y]
    }

    pub fn product(&self, xs: impl IntoIterator<Item = usize>) -> usize {
        xs.into_iter().fold(self.unit, |acc, x| self.mul(acc, x))
    }

    /// Every element satisfies `m^n = m^(n+1)` for some `n <= |M|`.
    pub fn check_aperiodic(&self) -> bool {
        (0..self.size()).all(|x| {
            let mut p = x;
            for _ in 0..self.size() {
                let next = self.mul(p, x);
                if next == p {
                    return true;
                }
                p = next;
            }
            false
        })
    }

    /// The subsemigroup generated by `gens`, sorted.
    pub fn closure(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen: BTreeSet<usize> = gens.iter().copied().collect();
        let mut todo: Vec<usize> = seen.iter().copied().collect();
        while let Some(x) = todo.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if seen.insert(y) {
                    todo.push(y);
                }
            }
        }
        seen.into_iter().collect()
    }

    /// The monoid generated by partial maps on `{1..k}` under composition,
    /// `x * y = x ∘ y`. The identity is added as the unit.
    pub fn from_maps(k: usize, gens: &[Twist]) -> FiniteMonoid {
        let id = Twist::identity(k);
        let mut elems = vec![id.clone()];
        let mut index: HashMap<Twist, usize> = HashMap::from([(id, 0)]);
        let mut i = 0;
        while i < elems.len() {
            for g in gens {
                let y = elems[i].compose(g);
                if !index.contains_key(&y) {
                    index.insert(y.clone(), elems.len());
                    elems.push(y);
                }
            }
            i += 1;
        }
        let n = elems.len();
        let mut table = Vec::with_capacity(n * n);
        for x in &elems {
            for y in &elems {
                table.push(index[&x.compose(y)]);
            }
        }
        FiniteMonoid { names: elems.iter().map(Twist::to_string).collect(), unit: 0, table }
    }

    /// All monotone partial maps on `{1..k}`, in enumeration order after the
    /// identity.
    pub fn monotone_partial_maps(k: usize) -> (FiniteMonoid, Vec<Twist>) {
        let mut elems = vec![Twist::identity(k)];
        elems.extend(Twist::all_monotone(k).into_iter().filter(|t| *t != Twist::identity(k)));
        let index: HashMap<&Twist, usize> = elems.iter().enumerate().map(|(i, t)| (t, i)).collect();
        let n = elems.len();
        let mut table = Vec::with_capacity(n * n);
        for x in &elems {
            for y in &elems {
                table.push(index[&x.compose(y)]);
            }
        }
        let m = FiniteMonoid { names: elems.iter().map(Twist::to_string).collect(), unit: 0, table };
        (m, elems)
    }

    /// `Z/n`.
    pub fn cyclic(n: usize) -> FiniteMonoid {
        let table = (0..n).map(|x| (0..n).map(|y| (x + y) % n).collect()).collect();
        FiniteMonoid::new((0..n).map(|i| i.to_string()).collect(), 0, table).expect("cyclic group")
    }

    /// Reads `(monoid (elems ...) (unit u) (mul ((x y z) ...)))`. Products
    /// involving the unit may be omitted.
    pub fn from_sexp(s: &Sexp) -> Result<Self> {
        let items = s.expect_tagged("monoid")?;
        let [elems, unit, mul] = items else { return Err(s.error("expected (monoid (elems ...) (unit u) (mul ...))")) };
        let names: Vec<String> = elems
            .expect_tagged("elems")?
            .iter()
            .map(|e| e.expect_atom("an element").map(str::to_string))
            .collect::<Result<_>>()?;
        let find = |e: &Sexp| -> Result<usize> {
            let n = e.expect_atom("an element")?;
            names.iter().position(|x| x == n).ok_or_else(|| e.error(format!("unknown element `{n}`")))
        };
        let [u] = unit.expect_tagged("unit")? else { return Err(unit.error("expected (unit u)")) };
        let u = find(u)?;
        let n = names.len();
        let mut table = vec![vec![None; n]; n];
        for x in 0..n {
            table[u][x] = Some(x);
            table[x][u] = Some(x);
        }
        let [entries] = mul.expect_tagged("mul")? else { return Err(mul.error("expected (mul ((x y z) ...))")) };
        for e in entries.expect_list("products")? {
            let [x, y, z] = e.expect_list("(x y z)")? else { return Err(e.error("expected (x y z)")) };
            let (x, y, z) = (find(x)?, find(y)?, find(z)?);
            if table[x][y].is_some_and(|w| w != z) {
                return Err(e.error("conflicting product"));
            }
            table[x][y] = Some(z);
        }
        let table: Option<Vec<Vec<usize>>> = table.into_iter().map(|r| r.into_iter().collect()).collect();
        let table = table.ok_or_else(|| mul.error("multiplication table is not total"))?;
        FiniteMonoid::new(names, u, table).map_err(|e| s.error(e.to_string()))
    }
}

impl ToSexp for FiniteMonoid {
    fn to_sexp(&self) -> Sexp {
        let n = self.size();
        let mut products = Vec::new();
        for x in (0..n).filter(|&x| x != self.unit) {
            for y in (0..n).filter(|&y| y != self.unit) {
                products.push(Sexp::list(vec![
                    Sexp::atom(self.name(x)),
                    Sexp::atom(self.name(y)),
                    Sexp::atom(self.name(self.mul(x, y))),
                ]));
            }
        }
        let mut elems = vec![Sexp::atom("elems")];
        elems.extend(self.names.iter().map(|n| Sexp::atom(n.clone())));
        Sexp::list(vec![
            Sexp::atom("monoid"),
            Sexp::list(elems),
            Sexp::list(vec![Sexp::atom("unit"), Sexp::atom(self.name(self.unit))]),
            Sexp::list(vec![Sexp::atom("mul"), Sexp::list(products)]),
        ])
    }
}

/// A nested factorisation: a letter, or a term whose labels are nested
/// factorisations one level shallower.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NestedTerm<L> {
    Letter(L),
    Layer(Term<NestedTerm<L>>),
}

impl<L: Ranked> Ranked for NestedTerm<L> {
    fn arity(&self) -> usize {
        match self {
            NestedTerm::Letter(l) => l.arity(),
            NestedTerm::Layer(t) => t.arity(),
        }
    }
}

impl<L: Ranked + Clone> NestedTerm<L> {
    /// Letters have depth 1; a layer is one deeper than its deepest label.
    pub fn depth(&self) -> usize {
        match self {
            NestedTerm::Letter(_) => 1,
            NestedTerm::Layer(t) => 1 + t.labels().map(NestedTerm::depth).max().unwrap_or(1),
        }
    }

    /// All letters sit at the same depth.
    pub fn is_uniform(&self) -> bool {
        fn go<L: Ranked + Clone>(n: &NestedTerm<L>, d: usize) -> bool {
            match n {
                NestedTerm::Letter(_) => d == 1,
                NestedTerm::Layer(t) => d > 1 && t.labels().all(|l| go(l, d - 1)),
            }
        }
        go(self, self.depth())
    }

    /// Flattens every layer.
    pub fn flat(&self) -> Term<L> {
        match self {
            NestedTerm::Letter(l) => Term::unit(l.clone()),
            NestedTerm::Layer(t) => Term::flatten(&t.map(NestedTerm::flat)),
        }
    }

    /// Wraps in single-node layers until the depth is `d`.
    pub fn raise_to(self, d: usize) -> Self {
        let mut n = self;
        let mut cur = n.depth();
        while cur < d {
            n = NestedTerm::Layer(Term::unit(n));
            cur += 1;
        }
        n
    }

    pub fn map_letters<M: Ranked + Clone>(&self, f: &mut impl FnMut(&L) -> NestedTerm<M>) -> NestedTerm<M> {
        match self {
            NestedTerm::Letter(l) => f(l),
            NestedTerm::Layer(t) => NestedTerm::Layer(t.map(|x| x.map_letters(f))),
        }
    }
}

impl<L: Ranked + ToSexp> ToSexp for NestedTerm<L> {
    fn to_sexp(&self) -> Sexp {
        match self {
            NestedTerm::Letter(l) => l.to_sexp(),
            NestedTerm::Layer(t) => Sexp::list(vec![Sexp::atom("layer"), t.to_sexp_with(NestedTerm::to_sexp)]),
        }
    }
}

impl<L: Ranked + ToSexp> fmt::Display for NestedTerm<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sexp())
    }
}

/// Value of the branch from the root of `t` to each of its ports, given the
/// value of each label's branches (`val(label, child index)`, 0-based).
pub fn branch_values<L: Ranked>(m: &FiniteMonoid, t: &Term<L>, mut val: impl FnMut(&L, usize) -> usize) -> Vec<usize> {
    let parents = t.parents();
    let mut at = vec![m.unit(); t.len()];
    let mut out = Vec::new();
    for pos in 0..t.len() {
        if let Some((p, i)) = parents[pos] {
            let l = t.label(p).expect("parents are nodes");
            at[pos] = m.mul(at[p], val(l, i));
        }
        if matches!(t.slots()[pos], Slot::Port) {
            out.push(at[pos]);
        }
    }
    out
}

/// Branch values of a nested factorisation, computed layer by layer.
pub fn nested_branch_values<L: Ranked + Clone>(
    m: &FiniteMonoid,
    n: &NestedTerm<L>,
    h: &impl Fn(&L, usize) -> usize,
) -> Vec<usize> {
    match n {
        NestedTerm::Letter(l) => (0..l.arity()).map(|i| h(l, i)).collect(),
        NestedTerm::Layer(t) => {
            let inner: Vec<Vec<usize>> = t.labels().map(|l| nested_branch_values(m, l, h)).collect();
            let idx: HashMap<usize, usize> = t.node_positions().into_iter().enumerate().map(|(i, p)| (p, i)).collect();
            let parents = t.parents();
            let mut at = vec![m.unit(); t.len()];
            let mut out = Vec::new();
            for pos in 0..t.len() {
                if let Some((p, i)) = parents[pos] {
                    at[pos] = m.mul(at[p], inner[idx[&p]][i]);
                }
                if matches!(t.slots()[pos], Slot::Port) {
                    out.push(at[pos]);
                }
            }
            out
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Clause {
    /// Every internal edge leaves the root.
    Shallow,
    /// All internal edges have the same value.
    Constant,
    /// `ab = a` for all internal edge values `a`, `b`.
    Absorbing,
}

/// Values of the internal edges of a layer (edges between two nodes):
/// `val(parent label, child index)` for each.
pub fn internal_edge_values<L: Ranked>(t: &Term<L>, mut val: impl FnMut(&L, usize) -> usize) -> Vec<(usize, usize)> {
    let parents = t.parents();
    let mut out = Vec::new();
    for pos in 0..t.len() {
        if let (Some((p, i)), Slot::Node(_)) = (parents[pos], &t.slots()[pos]) {
            out.push((p, val(t.label(p).unwrap(), i)));
        }
    }
    out
}

/// Which clause, if any, makes a layer homogeneous.
pub fn homogeneity<L: Ranked>(m: &FiniteMonoid, t: &Term<L>, val: impl FnMut(&L, usize) -> usize) -> Option<Clause> {
    let edges = internal_edge_values(t, val);
    if edges.iter().all(|&(p, _)| p == 0) {
        return Some(Clause::Shallow);
    }
    let values: BTreeSet<usize> = edges.iter().map(|e| e.1).collect();
    if values.len() == 1 {
        return Some(Clause::Constant);
    }
    if values.iter().all(|&a| values.iter().all(|&b| m.mul(a, b) == a)) {
        return Some(Clause::Absorbing);
    }
    None
}

/// Homogeneity of a depth-2 factorisation; each label's branch values
/// come from `h`.
pub fn is_homogeneous<L: Ranked>(m: &FiniteMonoid, f: &Term<Term<L>>, h: impl Fn(&L, usize) -> usize) -> Option<Clause> {
    let vals: Vec<Vec<usize>> = f.labels().map(|l| branch_values(m, l, |x, i| h(x, i))).collect();
    let idx: HashMap<usize, usize> = f.node_positions().into_iter().enumerate().map(|(i, p)| (p, i)).collect();
    let mut pos_of = f.node_positions().into_iter();
    let tagged = f.map(|l| (pos_of.next().unwrap(), l.arity()));
    homogeneity(m, &tagged, |&(p, _), i| vals[idx[&p]][i])
}

impl Ranked for (usize, usize) {
    fn arity(&self) -> usize {
        self.1
    }
}

/// Every layer, at every depth, is homogeneous.
pub fn is_hereditarily_homogeneous<L: Ranked + Clone>(m: &FiniteMonoid, n: &NestedTerm<L>, h: &impl Fn(&L, usize) -> usize) -> bool {
    match n {
        NestedTerm::Letter(_) => true,
        NestedTerm::Layer(t) => {
            let vals: Vec<Vec<usize>> = t.labels().map(|l| nested_branch_values(m, l, h)).collect();
            let mut k = 0;
            let tagged = t.map(|l| {
                k += 1;
                (k - 1, l.arity())
            });
            homogeneity(m, &tagged, |&(i, _), c| vals[i][c]).is_some()
                && t.labels().all(|l| is_hereditarily_homogeneous(m, l, h))
        }
    }
}

/// What happened during one run of [`factorise`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub calls: usize,
    pub splits: usize,
    pub depth: usize,
    /// `(|<A>|, |A|)` went down strictly on every recursive call.
    pub measure_decreased: bool,
    /// Cut edges all carried the chosen element, and no factor had that
    /// element on an edge below its root.
    pub cuts_well_placed: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Id {
    idx: usize,
    arity: usize,
}

impl Ranked for Id {
    fn arity(&self) -> usize {
        self.arity
    }
}

struct Ctx<'m> {
    m: &'m FiniteMonoid,
    /// Branch values of each letter id.
    vals: Vec<Vec<usize>>,
    stats: Stats,
}

impl Ctx<'_> {
    fn new_id(&mut self, vals: Vec<usize>) -> Id {
        self.vals.push(vals);
        Id { idx: self.vals.len() - 1, arity: self.vals.last().unwrap().len() }
    }

    fn fact(&mut self, t: &Term<Id>, bound: Option<(usize, usize)>) -> Result<NestedTerm<Id>> {
        self.stats.calls += 1;
        let edges = internal_edge_values(t, |l, i| self.vals[l.idx][i]);
        let a_set: Vec<usize> = edges.iter().map(|e| e.1).collect::<BTreeSet<_>>().into_iter().collect();
        let s = self.m.closure(&a_set);
        let measure = (s.len(), a_set.len());
        if let Some(b) = bound {
            if measure >= b {
                self.stats.measure_decreased = false;
            }
        }
        let here = NestedTerm::Layer(t.map(|l| NestedTerm::Letter(*l)));
        if homogeneity(self.m, t, |l, i| self.vals[l.idx][i]).is_some() {
            return Ok(here);
        }
        let m = self.m;
        let Some(&a) = a_set.iter().find(|&&a| {
            let sa: Vec<usize> = s.iter().map(|&b| m.mul(b, a)).collect();
            m.closure(&sa).len() < s.len()
        }) else {
            bail!(Precondition, "no element shrinks the generated subsemigroup; is the monoid aperiodic?");
        };
        self.stats.splits += 1;

        // Cut an edge carrying `a` when the edge above it exists and is
        // kept. Every factor then has `a` only on edges leaving its root.
        let parents = t.parents();
        let mut cut = vec![false; t.len()];
        for pos in 1..t.len() {
            let Some((p, i)) = parents[pos] else { continue };
            if matches!(t.slots()[pos], Slot::Port) {
                continue;
            }
            let sensitive = self.vals[t.label(p).unwrap().idx][i] == a;
            cut[pos] = sensitive && p != 0 && !cut[p];
        }
        let quotient = factorize_by(t, |_, c| !cut[c]);

        let mut factor_nests = Vec::new();
        let mut ids = Vec::new();
        for f in quotient.labels() {
            factor_nests.push(self.factor_nest(f, a, measure)?);
            let vals = branch_values(self.m, f, |l, i| self.vals[l.idx][i]);
            ids.push(self.new_id(vals));
        }
        let mut next = ids.iter();
        let q = quotient.map(|_| *next.next().unwrap());
        let d = factor_nests.iter().map(NestedTerm::depth).max().unwrap_or(1);
        let factor_nests: Vec<NestedTerm<Id>> = factor_nests.into_iter().map(|n| n.raise_to(d)).collect();
        if q.size() == 1 && q.arity() == 0 || q.size() == 1 && q.len() == 1 + q.arity() {
            return Ok(factor_nests.into_iter().next().unwrap());
        }
        let by_id: HashMap<usize, usize> = ids.iter().enumerate().map(|(i, id)| (id.idx, i)).collect();
        let qn = self.fact(&q, Some(measure))?;
        Ok(qn.map_letters(&mut |id| factor_nests[by_id[&id.idx]].clone()))
    }

    /// A factor in which `a` only labels edges leaving the root: one shallow
    /// layer over the root letter and the factorised child subterms.
    fn factor_nest(&mut self, f: &Term<Id>, a: usize, measure: (usize, usize)) -> Result<NestedTerm<Id>> {
        let below_root_ok = internal_edge_values(f, |l, i| self.vals[l.idx][i])
            .iter()
            .all(|&(p, v)| p == 0 || v != a);
        if !below_root_ok {
            self.stats.cuts_well_placed = false;
        }
        let ends = f.ends();
        let root = *f.root().expect("factors are nonempty");
        let mut kids = Vec::new();
        for c in f.children_of(0, &ends) {
            if matches!(f.slots()[c], Slot::Port) {
                kids.push(None);
            } else {
                kids.push(Some(self.fact(&f.subterm(c, &ends), Some(measure))?));
            }
        }
        let d = kids.iter().flatten().map(NestedTerm::depth).max().unwrap_or(1);
        let mut slots = vec![Slot::Node(NestedTerm::Letter(root).raise_to(d))];
        for k in kids {
            match k {
                None => slots.push(Slot::Port),
                Some(n) => {
                    let n = n.raise_to(d);
                    let ports = n.arity();
                    slots.push(Slot::Node(n));
                    slots.extend((0..ports).map(|_| Slot::Port));
                }
            }
        }
        Ok(NestedTerm::Layer(Term::from_slots(slots)?))
    }
}

/// Result of [`factorise`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorisation<L> {
    pub nest: NestedTerm<L>,
    pub stats: Stats,
}

/// A hereditarily homogeneous nested factorisation of `t` whose flattening
/// is `t`. `h(label, child index)` is the branch homomorphism into `m`,
/// which must be aperiodic.
pub fn factorise<L: Ranked + Clone>(
    t: &Term<L>,
    m: &FiniteMonoid,
    h: impl Fn(&L, usize) -> usize,
) -> Result<Factorisation<L>> {
    if !m.check_aperiodic() {
        bail!(Precondition, "monoid is not aperiodic");
    }
    let mut ctx = Ctx {
        m,
        vals: Vec::new(),
        stats: Stats { measure_decreased: true, cuts_well_placed: true, ..Stats::default() },
    };
    let mut letters = Vec::new();
    let mut slots = Vec::with_capacity(t.len());
    for s in t.slots() {
        slots.push(match s {
            Slot::Port => Slot::Port,
            Slot::Node(l) => {
                let vals = (0..l.arity()).map(|i| h(l, i)).collect::<Vec<_>>();
                if let Some(&bad) = vals.iter().find(|&&v| v >= m.size()) {
                    bail!(Validation, "branch value {bad} is not a monoid element");
                }
                letters.push(l.clone());
                Slot::Node(ctx.new_id(vals))
            }
        });
    }
    let ids = Term::from_slots(slots)?;
    let nest = ctx.fact(&ids, None)?;
    let nest = nest.map_letters(&mut |id| NestedTerm::Letter(letters[id.idx].clone()));
    ctx.stats.depth = nest.depth();
    if !nest.is_uniform() {
        return Err(Error::Structural("factorisation depth is not uniform".into()));
    }
    Ok(Factorisation { nest, stats: ctx.stats })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::{RankedAlphabet, Sym};

    fn zero_monoid(left: bool) -> FiniteMonoid {
        // 1, x, y with xy = x (left zero) or xy = y (right zero)
        let pick = |a: usize, b: usize| if left { a } else { b };
        let table = vec![vec![0, 1, 2], vec![1, 1, pick(1, 2)], vec![2, pick(2, 1), 2]];
        FiniteMonoid::new(vec!["1".into(), "x".into(), "y".into()], 0, table).unwrap()
    }

    fn chain(s: &str) -> Term<Sym> {
        let ab = RankedAlphabet::new([("a", 1), ("b", 1), ("c", 0)].map(|(n, a)| (n.to_string(), a))).unwrap();
        ab.parse_term(s).unwrap()
    }

    #[test]
    fn aperiodicity() {
        let u1 = FiniteMonoid::new(vec!["1".into(), "e".into()], 0, vec![vec![0, 1], vec![1, 1]]).unwrap();
        assert!(u1.check_aperiodic());
        assert!(!FiniteMonoid::cyclic(2).check_aperiodic());
        let (mono, _) = FiniteMonoid::monotone_partial_maps(3);
        assert!(mono.check_aperiodic());
    }

    #[test]
    fn branch_products() {
        let m = zero_monoid(false);
        let h = |s: &Sym, _: usize| if s.name == "a" { 1 } else { 2 };
        let t = chain("(a _)");
        assert_eq!(branch_values(&m, &t, h), vec![1]);
        let t = chain("(a (b _))");
        assert_eq!(branch_values(&m, &t, h), vec![m.mul(1, 2)]);
    }

    #[test]
    fn clauses() {
        let m = zero_monoid(true);
        let h = |s: &Sym, _: usize| if s.name == "a" { 1 } else { 2 };
        let one = |s: &str| Term::unit(chain(s));
        let shallow: Term<Term<Sym>> = Term::node(chain("(a _)"), vec![one("c")]);
        assert_eq!(is_homogeneous(&m, &shallow, h), Some(Clause::Shallow));
        let deep = Term::node(chain("(a _)"), vec![Term::node(chain("(a _)"), vec![one("c")])]);
        assert_eq!(is_homogeneous(&m, &deep, h), Some(Clause::Constant));
        let mixed = Term::node(
            chain("(a _)"),
            vec![Term::node(chain("(b _)"), vec![Term::node(chain("(a _)"), vec![one("c")])])],
        );
        assert_eq!(is_homogeneous(&m, &mixed, h), Some(Clause::Absorbing));
        assert_eq!(is_homogeneous(&zero_monoid(false), &mixed, h), None);
    }

    #[test]
    fn factorise_left_zero_is_one_layer() {
        let m = zero_monoid(true);
        let h = |s: &Sym, _: usize| if s.name == "a" { 1 } else { 2 };
        let t = chain("(a (b (a (b (a c)))))");
        let f = factorise(&t, &m, h).unwrap();
        assert_eq!(f.nest.depth(), 2);
        assert_eq!(f.nest.flat(), t);
    }

    #[test]
    fn factorise_right_zero_recurses() {
        let m = zero_monoid(false);
        let h = |s: &Sym, _: usize| if s.name == "a" { 1 } else { 2 };
        let t = chain("(a (b (a (b (b (a (a c)))))))");
        let f = factorise(&t, &m, h).unwrap();
        assert!(f.stats.splits > 0);
        assert_eq!(f.nest.flat(), t);
        assert!(is_hereditarily_homogeneous(&m, &f.nest, &h));
        assert!(f.stats.measure_decreased && f.stats.cuts_well_placed);
    }

    #[test]
    fn violator_is_not_hereditarily_homogeneous() {
        let m = zero_monoid(false);
        let h = |s: &Sym, _: usize| if s.name == "a" { 1 } else { 2 };
        let t = chain("(a (b (a c)))");
        let flat = NestedTerm::Layer(t.map(|l| NestedTerm::Letter(l.clone())));
        assert!(!is_hereditarily_homogeneous(&m, &flat, &h));
        assert!(is_hereditarily_homogeneous(&m, &NestedTerm::Letter(Sym::new("a", 1)), &h));
    }

    #[test]
    fn monoid_file_round_trip() {
        let m = zero_monoid(false);
        let s = m.to_sexp();
        assert_eq!(FiniteMonoid::from_sexp(&s).unwrap(), m);
    }
}
