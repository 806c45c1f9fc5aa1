//! Register tree transducers with first-order relabelling as the
//! transition function.
//!
//! A run relabels the input into a tree of register updates and evaluates
//! that tree bottom-up. The second route replaces each update by its
//! λ-representation, unfolds the matrix power, and normalises the
//! coordinate of the output register.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{bail, Error, Result};
use crate::lambda::{self, Lam, LambdaTerm, SimpleType, TypeSet, Vars};
use crate::matrix::{first_non_monotone, unfold_terms, Mat};
use crate::relabel::{run_program_over, Program};
use crate::sexp::{self, Sexp, ToSexp};
use crate::term::{Ranked, Slot, Term};
use crate::value::{Grouping, RankedAlphabet, Sym};

/// Registers in their order, with the output register's index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegisterSet {
    pub regs: Vec<(String, usize)>,
    pub output: usize,
}

impl RegisterSet {
    pub fn new(regs: Vec<(String, usize)>, output: &str) -> Result<RegisterSet> {
        let names: BTreeSet<&String> = regs.iter().map(|r| &r.0).collect();
        if names.len() != regs.len() {
            bail!(Validation, "register names must be distinct");
        }
        let Some(out) = regs.iter().position(|r| r.0 == output) else {
            bail!(Validation, "output register `{output}` is not declared");
        };
        if regs[out].1 != 0 {
            bail!(Validation, "output register `{output}` has arity {}, not 0", regs[out].1);
        }
        Ok(RegisterSet { regs, output: out })
    }

    pub fn len(&self) -> usize {
        self.regs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regs.is_empty()
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.regs.iter().position(|r| r.0 == name)
    }

    pub fn arity(&self, r: usize) -> usize {
        self.regs[r].1
    }

    pub fn max_arity(&self) -> usize {
        self.regs.iter().map(|r| r.1).max().unwrap_or(0)
    }
}

/// A node of an update body: an output letter or the `copy`-th copy of
/// register `reg` (both 1-based in syntax, `reg` 0-based here).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UpdLabel {
    Out(Sym),
    Reg { reg: usize, copy: usize, arity: usize },
}

impl Ranked for UpdLabel {
    fn arity(&self) -> usize {
        match self {
            UpdLabel::Out(s) => s.arity,
            UpdLabel::Reg { arity, .. } => *arity,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Update {
    pub name: String,
    pub arity: usize,
    /// One body per register, in register order. Ports are the register's
    /// parameters, left to right.
    pub bodies: Vec<Term<UpdLabel>>,
}

impl Update {
    /// Placeholders in register order, then copy index.
    pub fn placeholders(&self) -> Vec<(usize, usize, usize)> {
        let mut out: Vec<(usize, usize, usize)> = Vec::new();
        for (s, b) in self.bodies.iter().enumerate() {
            for l in b.labels() {
                if let UpdLabel::Reg { reg, copy, .. } = l {
                    out.push((*reg, *copy, s));
                }
            }
        }
        out.sort();
        out
    }
}

pub type Valuation = Vec<Term<Sym>>;

#[derive(Clone, Debug)]
pub struct Transducer {
    pub input: RankedAlphabet,
    pub output: RankedAlphabet,
    pub registers: RegisterSet,
    pub updates: Vec<Update>,
    pub relabel: Program,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Diagnostic {
    pub severity: Severity,
    pub update: Option<String>,
    pub msg: String,
}

impl Diagnostic {
    fn error(update: &Update, msg: String) -> Diagnostic {
        Diagnostic { severity: Severity::Error, update: Some(update.name.clone()), msg }
    }
}

impl ToSexp for Diagnostic {
    fn to_sexp(&self) -> Sexp {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        let mut items = vec![Sexp::atom(sev)];
        if let Some(u) = &self.update {
            items.push(Sexp::list(vec![Sexp::atom("update"), Sexp::atom(u.clone())]));
        }
        items.push(Sexp::atom(format!("{:?}", self.msg)));
        Sexp::list(items)
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sexp())
    }
}

/// Placeholders used twice, as `(register, copy)` pairs.
pub fn single_use_violations(u: &Update) -> Vec<(usize, usize)> {
    let ph = u.placeholders();
    let mut out: Vec<(usize, usize)> = ph.windows(2).filter(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)).map(|w| (w[0].0, w[0].1)).collect();
    out.dedup();
    out
}

/// A copy index and two crossing `(register, slot)` edges.
pub type Crossing = (usize, (usize, usize), (usize, usize));

/// Pairs `(r1 -> s1, r2 -> s2)` along copy `i` with `r1 < r2` and `s1 > s2`.
/// A register sent to two places also counts, with `r1 = r2`.
pub fn monotone_violations(u: &Update) -> Vec<Crossing> {
    let mut out = Vec::new();
    for i in 1..=u.arity {
        let edges: Vec<(usize, usize)> = u.placeholders().into_iter().filter(|p| p.1 == i).map(|p| (p.0, p.2)).collect();
        for (a, &(r1, s1)) in edges.iter().enumerate() {
            for &(r2, s2) in &edges[a + 1..] {
                if r1 <= r2 && s1 > s2 || r1 == r2 && s1 != s2 {
                    out.push((i, (r1, s1), (r2, s2)));
                }
            }
        }
    }
    out
}

pub fn is_monotone_update(u: &Update) -> bool {
    monotone_violations(u).is_empty()
}

/// Checks every update for arity coherence, single use and monotonicity,
/// and the relabelling against the update names.
pub fn validate(tr: &Transducer) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let regs = &tr.registers;
    let mut seen = BTreeSet::new();
    for u in &tr.updates {
        if !seen.insert(&u.name) {
            out.push(Diagnostic::error(u, format!("update `{}` defined twice", u.name)));
        }
        if u.bodies.len() != regs.len() {
            out.push(Diagnostic::error(u, format!("{} bodies for {} registers", u.bodies.len(), regs.len())));
            continue;
        }
        for (s, b) in u.bodies.iter().enumerate() {
            let (name, a) = &regs.regs[s];
            if b.arity() != *a {
                out.push(Diagnostic::error(u, format!("body of `{name}` has {} ports, register arity is {a}", b.arity())));
            }
            for l in b.labels() {
                match l {
                    UpdLabel::Out(sym) if !tr.output.contains(sym) => {
                        out.push(Diagnostic::error(u, format!("`{}` of arity {} is not an output letter", sym.name, sym.arity)))
                    }
                    UpdLabel::Reg { reg, copy, arity } => {
                        if *copy == 0 || *copy > u.arity {
                            out.push(Diagnostic::error(u, format!("copy {copy} of `{}` in an update of arity {}", regs.regs[*reg].0, u.arity)));
                        }
                        if *arity != regs.arity(*reg) {
                            out.push(Diagnostic::error(u, format!("placeholder of `{}` given {arity} arguments", regs.regs[*reg].0)));
                        }
                    }
                    UpdLabel::Out(_) => {}
                }
            }
        }
        for (r, i) in single_use_violations(u) {
            out.push(Diagnostic::error(u, format!("single use: copy {i} of `{}` appears more than once", regs.regs[r].0)));
        }
        for (i, (r1, s1), (r2, s2)) in monotone_violations(u) {
            let n = |x: usize| &regs.regs[x].0;
            out.push(Diagnostic::error(
                u,
                format!("monotone: along copy {i}, `{}` goes to `{}` but `{}` goes to `{}`", n(r1), n(s1), n(r2), n(s2)),
            ));
        }
    }
    match tr.relabel.output_alphabet(&tr.input) {
        Err(e) => out.push(Diagnostic { severity: Severity::Error, update: None, msg: format!("relabelling: {e}") }),
        Ok(alpha) => {
            for s in alpha.symbols() {
                match tr.updates.iter().find(|u| u.name == s.name) {
                    Some(u) if u.arity != s.arity => out.push(Diagnostic::error(
                        u,
                        format!("relabelling yields `{}` with arity {}, update arity is {}", s.name, s.arity, u.arity),
                    )),
                    Some(_) => {}
                    None => out.push(Diagnostic {
                        severity: Severity::Warning,
                        update: None,
                        msg: format!("relabelling may yield `{}`, which names no update; such runs are undefined", s.name),
                    }),
                }
            }
        }
    }
    out
}

pub fn has_errors(d: &[Diagnostic]) -> bool {
    d.iter().any(|d| d.severity == Severity::Error)
}

/// Plugs the `i`-th valuation into the `i`-th copies.
pub fn apply_update(u: &Update, vals: &[Valuation]) -> Result<Valuation> {
    if vals.len() != u.arity {
        bail!(Arity, "update `{}` of arity {} given {} valuations", u.name, u.arity, vals.len());
    }
    u.bodies
        .iter()
        .map(|b| {
            b.fold_up(|_, s, kids: Vec<Term<Sym>>| match s {
                Slot::Port => Ok(Term::port()),
                Slot::Node(UpdLabel::Out(sym)) => Term::try_node(sym.clone(), kids),
                Slot::Node(UpdLabel::Reg { reg, copy, .. }) => {
                    let v = vals[copy - 1].get(*reg).ok_or_else(|| Error::Arity(format!("no register {reg}")))?;
                    v.substitute(&kids)
                }
            })
        })
        .collect()
}

impl Transducer {
    pub fn update(&self, name: &str) -> Option<&Update> {
        self.updates.iter().find(|u| u.name == name)
    }

    /// The relabelled input, checked to name updates of matching arity.
    pub fn update_tree(&self, input: &Term<Sym>) -> Result<Term<Sym>> {
        for s in input.labels() {
            if !self.input.contains(s) {
                bail!(Type, "`{}` of arity {} is not an input letter", s.name, s.arity);
            }
        }
        let t = run_program_over(input, &self.relabel, &self.input)?;
        for s in t.labels() {
            match self.update(&s.name) {
                Some(u) if u.arity == s.arity => {}
                _ => bail!(Undefined, "relabelling produced `{}`, which is not an update of arity {}", s.name, s.arity),
            }
        }
        Ok(t)
    }
}

pub fn evaluate_update_tree(tr: &Transducer, t: &Term<Sym>) -> Result<Valuation> {
    t.fold_up(|_, s, kids| match s {
        Slot::Port => bail!(Structural, "update trees have no ports"),
        Slot::Node(l) => {
            let u = tr.update(&l.name).ok_or_else(|| Error::Undefined(format!("no update `{}`", l.name)))?;
            apply_update(u, &kids)
        }
    })
}

pub fn run(tr: &Transducer, input: &Term<Sym>) -> Result<Term<Sym>> {
    let t = tr.update_tree(input)?;
    let mut v = evaluate_update_tree(tr, &t)?;
    Ok(v.swap_remove(tr.registers.output))
}

/// Name of the `j`-th parameter variable (1-based).
pub fn param(j: usize) -> String {
    format!("x{j}")
}

/// The type set `{o^i -> o : i <= bound}`.
pub fn type_bound(bound: usize) -> TypeSet {
    TypeSet::new([SimpleType::order(bound)])
}

/// The type set and variables the λ-representations of `tr` live in. The
/// bound covers both output letters and register arities.
pub fn lambda_setting(tr: &Transducer) -> (TypeSet, Vars) {
    let bound = tr.output.max_arity().max(tr.registers.max_arity());
    let vars = Vars::new((1..=tr.registers.max_arity()).map(|j| (param(j), SimpleType::O)));
    (type_bound(bound), vars)
}

/// Register `s` becomes `λx1 ... λxa. M`, where letters become output
/// letters, parameters become the `x`s, and a placeholder applied to its
/// arguments becomes a port applied to them. The grouping sends the port of
/// copy `i` of register `r` to slot `r` of outer port `i`.
pub fn lambda_repr(u: &Update, regs: &RegisterSet) -> Result<Mat<LambdaTerm>> {
    if u.bodies.len() != regs.len() {
        bail!(Validation, "update `{}` has {} bodies for {} registers", u.name, u.bodies.len(), regs.len());
    }
    if !single_use_violations(u).is_empty() {
        bail!(Validation, "update `{}` is not single use", u.name);
    }
    let mut tuple = Vec::with_capacity(regs.len());
    let mut grouping = Vec::new();
    for (s, b) in u.bodies.iter().enumerate() {
        let ports_before = b.ports_before();
        let mut holes: Vec<(usize, usize)> = Vec::new();
        let body = b.fold_up(|pos, slot, kids: Vec<LambdaTerm>| match slot {
            Slot::Port => Ok(Term::unit(Lam::Var(param(ports_before[pos] + 1)))),
            Slot::Node(UpdLabel::Out(sym)) => Term::try_node(Lam::Out(sym.name.clone(), sym.arity), kids),
            Slot::Node(UpdLabel::Reg { reg, copy, .. }) => {
                holes.push((*copy, reg + 1));
                let mut acc = Term::port();
                for k in kids {
                    acc = Term::node(Lam::App, vec![acc, k]);
                }
                Ok(acc)
            }
        })?;
        // fold_up meets placeholders right to left
        holes.reverse();
        grouping.extend(holes);
        let mut t = body;
        for j in (1..=regs.arity(s)).rev() {
            t = Term::node(Lam::Abs(param(j)), vec![t]);
        }
        tuple.push(t);
    }
    Mat::new(tuple, Grouping::from_vec_unchecked(grouping), u.arity)
}

fn lam_to_output(t: &LambdaTerm) -> Result<Term<Sym>> {
    t.try_map(|l| match l {
        Lam::Out(a, n) => Ok(Sym::new(a.clone(), *n)),
        other => bail!(Structural, "normal form still holds `{other}`"),
    })
}

/// The λ-route: unfold the λ-representations along the update tree,
/// project onto the output register, normalise.
pub fn run_via_lambda(tr: &Transducer, input: &Term<Sym>) -> Result<Term<Sym>> {
    let t = tr.update_tree(input)?;
    let mut reprs: BTreeMap<&str, Mat<LambdaTerm>> = BTreeMap::new();
    for u in &tr.updates {
        reprs.insert(&u.name, lambda_repr(u, &tr.registers)?);
    }
    let mt: Term<Mat<LambdaTerm>> = t.map(|s| reprs[s.name.as_str()].clone());
    if let Some(n) = first_non_monotone(&mt) {
        bail!(Undefined, "non-monotone update at node {n}");
    }
    let m = unfold_terms(tr.registers.len(), &mt)?;
    let body = &m.tuple[tr.registers.output];
    let (types, vars) = lambda_setting(tr);
    let nf = lambda::normalize_linear(body, &types, &vars)?;
    lam_to_output(&nf)
}

/// Runs both routes and insists they agree.
pub fn run_both(tr: &Transducer, input: &Term<Sym>) -> Result<Term<Sym>> {
    let a = run(tr, input);
    let b = run_via_lambda(tr, input);
    match (a, b) {
        (Ok(a), Ok(b)) if a == b => Ok(a),
        (Ok(a), Ok(b)) => bail!(Validation, "routes disagree: direct {a}, lambda {b}"),
        (Err(a), Err(b)) if a.is_undefined() && b.is_undefined() => Err(a),
        (a, b) => bail!(Validation, "routes disagree: direct {}, lambda {}", show(&a), show(&b)),
    }
}

fn show(r: &Result<Term<Sym>>) -> String {
    match r {
        Ok(t) => t.to_string(),
        Err(e) => format!("error ({e})"),
    }
}

fn body_from_sexp(s: &Sexp, out: &RankedAlphabet, regs: &RegisterSet) -> Result<Term<UpdLabel>> {
    // bodies are small hand-written terms
    if s.as_atom() == Some("_") {
        return Ok(Term::port());
    }
    if let Some(a) = s.as_atom() {
        let sym = out.sym(a).map_err(|e| s.error(e.to_string()))?;
        return Term::try_node(UpdLabel::Out(sym), vec![]).map_err(|e| s.error(e.to_string()));
    }
    let items = s.expect_list("a term")?;
    let head = items.first().ok_or_else(|| s.error("empty list is not a term"))?.expect_atom("a symbol")?;
    if head == "reg" {
        let [_, r, i, args @ ..] = items else { return Err(s.error("expected (reg r i args ...)")) };
        let name = r.expect_atom("a register")?;
        let reg = regs.index(name).ok_or_else(|| r.error(format!("unknown register `{name}`")))?;
        let copy = i.expect_usize("a copy index")?;
        let kids = args.iter().map(|a| body_from_sexp(a, out, regs)).collect::<Result<Vec<_>>>()?;
        if kids.len() != regs.arity(reg) {
            return Err(s.error(format!("register `{name}` has arity {}, given {} arguments", regs.arity(reg), kids.len())));
        }
        return Ok(Term::node(UpdLabel::Reg { reg, copy, arity: kids.len() }, kids));
    }
    let sym = out.sym(head).map_err(|e| items[0].error(e.to_string()))?;
    let kids = items[1..].iter().map(|a| body_from_sexp(a, out, regs)).collect::<Result<Vec<_>>>()?;
    Term::try_node(UpdLabel::Out(sym), kids).map_err(|e| s.error(e.to_string()))
}

fn body_to_sexp(b: &Term<UpdLabel>, regs: &RegisterSet) -> Sexp {
    b.to_sexp_with(|l| match l {
        UpdLabel::Out(s) => Sexp::atom(s.name.clone()),
        UpdLabel::Reg { reg, copy, .. } => Sexp::atom(format!("reg {} {copy}", regs.regs[*reg].0)),
    })
}

impl Transducer {
    /// Reads `(input ...) (output ...) (registers ...) (output-register r)
    /// (update name n ((r body) ...)) ... [(relabel ...)]`. Registers an
    /// update leaves out are rejected.
    pub fn from_sexps(items: &[Sexp]) -> Result<Transducer> {
        let find = |tag: &str| items.iter().find(|s| s.head() == Some(tag));
        let need = |tag: &str| find(tag).ok_or_else(|| Error::Validation(format!("missing ({tag} ...)")));
        for s in items {
            match s.head() {
                Some("input" | "output" | "registers" | "output-register" | "update" | "relabel") => {}
                _ => return Err(s.error("expected input, output, registers, output-register, update or relabel")),
            }
        }
        let input = RankedAlphabet::from_sexp_items(need("input")?.expect_tagged("input")?)?;
        let output = RankedAlphabet::from_sexp_items(need("output")?.expect_tagged("output")?)?;
        let regs_alpha = need("registers")?.expect_tagged("registers")?;
        let mut regs = Vec::new();
        for r in regs_alpha {
            let pair = r.expect_list("(name arity)")?;
            let [n, a] = pair else { return Err(r.error("expected (name arity)")) };
            regs.push((n.expect_atom("a register name")?.to_string(), a.expect_usize("an arity")?));
        }
        let out_item = need("output-register")?;
        let [out_name] = out_item.expect_tagged("output-register")? else {
            return Err(out_item.error("expected (output-register r)"));
        };
        let registers = RegisterSet::new(regs, out_name.expect_atom("a register")?).map_err(|e| out_item.error(e.to_string()))?;
        let mut updates = Vec::new();
        for s in items.iter().filter(|s| s.head() == Some("update")) {
            let [name, n, bodies] = s.expect_tagged("update")? else {
                return Err(s.error("expected (update name n ((r body) ...))"));
            };
            let mut by_reg: Vec<Option<Term<UpdLabel>>> = vec![None; registers.len()];
            for rb in bodies.expect_list("register bodies")? {
                let [r, b] = rb.expect_list("(r body)")? else { return Err(rb.error("expected (r body)")) };
                let rn = r.expect_atom("a register")?;
                let idx = registers.index(rn).ok_or_else(|| r.error(format!("unknown register `{rn}`")))?;
                if by_reg[idx].is_some() {
                    return Err(rb.error(format!("register `{rn}` given twice")));
                }
                by_reg[idx] = Some(body_from_sexp(b, &output, &registers)?);
            }
            let mut out = Vec::new();
            for (idx, b) in by_reg.into_iter().enumerate() {
                out.push(b.ok_or_else(|| s.error(format!("no body for register `{}`", registers.regs[idx].0)))?);
            }
            updates.push(Update { name: name.expect_atom("an update name")?.to_string(), arity: n.expect_usize("an arity")?, bodies: out });
        }
        let relabel = match find("relabel") {
            Some(p) => Program::from_sexp(p)?,
            None => Program::default(),
        };
        Ok(Transducer { input, output, registers, updates, relabel })
    }

    pub fn parse(text: &str) -> Result<Transducer> {
        Transducer::from_sexps(&sexp::parse_all(text)?)
    }

    pub fn to_sexps(&self) -> Vec<Sexp> {
        let tagged = |tag: &str, mut rest: Vec<Sexp>| {
            rest.insert(0, Sexp::atom(tag));
            Sexp::list(rest)
        };
        let mut out = vec![
            tagged("input", self.input.to_sexp_items()),
            tagged("output", self.output.to_sexp_items()),
            tagged(
                "registers",
                self.registers.regs.iter().map(|(n, a)| Sexp::list(vec![Sexp::atom(n.clone()), Sexp::atom(a.to_string())])).collect(),
            ),
            tagged("output-register", vec![Sexp::atom(self.registers.regs[self.registers.output].0.clone())]),
        ];
        for u in &self.updates {
            let bodies = u
                .bodies
                .iter()
                .enumerate()
                .map(|(s, b)| Sexp::list(vec![Sexp::atom(self.registers.regs[s].0.clone()), body_to_sexp(b, &self.registers)]))
                .collect();
            out.push(tagged("update", vec![Sexp::atom(u.name.clone()), Sexp::atom(u.arity.to_string()), Sexp::list(bodies)]));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub const MIRROR: &str = "
        (input (a 2) (b 1) (c 0))
        (output (a 2) (b 1) (c 0))
        (registers (out 0))
        (output-register out)
        (update a 2 ((out (a (reg out 2) (reg out 1)))))
        (update b 1 ((out (b (reg out 1)))))
        (update c 0 ((out c)))";

    fn input(src: &str) -> Term<Sym> {
        Sym::parse_term(src, &[("a", 2), ("b", 1), ("c", 0)]).unwrap()
    }

    #[test]
    fn mirror_both_routes() {
        let tr = Transducer::parse(MIRROR).unwrap();
        assert!(validate(&tr).is_empty(), "{:?}", validate(&tr));
        let t = input("(a (b c) (a c (b c)))");
        let want = "(a (a (b c) c) (b c))";
        assert_eq!(run(&tr, &t).unwrap().to_string(), want);
        assert_eq!(run_via_lambda(&tr, &t).unwrap().to_string(), want);
    }

    #[test]
    fn update_application_by_hand() {
        let regs = RegisterSet::new(vec![("r".into(), 0)], "r").unwrap();
        let out = RankedAlphabet::new([("b".into(), 1), ("c".into(), 0), ("a".into(), 2)]).unwrap();
        let body = body_from_sexp(&sexp::parse("(b (reg r 1))").unwrap(), &out, &regs).unwrap();
        let u = Update { name: "w".into(), arity: 1, bodies: vec![body] };
        let c = Sym::parse_term("c", &[("c", 0)]).unwrap();
        assert_eq!(apply_update(&u, &[vec![c.clone()]]).unwrap()[0].to_string(), "(b c)");
        let zero = Update { name: "z".into(), arity: 0, bodies: vec![Term::unit(UpdLabel::Out(Sym::new("c", 0)))] };
        assert_eq!(apply_update(&zero, &[]).unwrap(), vec![c]);
        let m = lambda_repr(&u, &regs).unwrap();
        assert_eq!(m.grouping.as_slice(), &[(1, 1)]);
        assert!(m.twist(1) == crate::matrix::Twist::identity(1));
    }

    #[test]
    fn violations_are_reported() {
        let src = "
            (input (a 1))
            (output (c 0) (f 2))
            (registers (out 0) (p 0) (q 0))
            (output-register out)
            (update a 1 ((out (f (reg out 1) (reg out 1))) (p (reg q 1)) (q (reg p 1))))";
        let tr = Transducer::parse(src).unwrap();
        let d = validate(&tr);
        assert!(d.iter().any(|d| d.msg.starts_with("single use")));
        assert!(d.iter().any(|d| d.msg.starts_with("monotone")));
        assert!(!is_monotone_update(&tr.updates[0]));
    }
}
