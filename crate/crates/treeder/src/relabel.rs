//! First-order relabellings: the three characteristic selections, symbol
//! maps, programs chaining them, and a few node decorations built on top.
//!
//! A selection keeps the tree and replaces each label `a` by `a/1` (node
//! selected) or `a/2` (not selected). Ports are left alone and never count
//! as nodes.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{bail, Result};
use crate::prime::fact_down;
use crate::sexp::{self, Sexp};
use crate::term::{Slot, Term};
use crate::value::{RankedAlphabet, Side, Sym};

pub type Names = BTreeSet<String>;

pub fn names<'a>(it: impl IntoIterator<Item = &'a str>) -> Names {
    it.into_iter().map(String::from).collect()
}

pub fn tagged(s: &Sym, selected: bool) -> Sym {
    Sym::new(format!("{}/{}", s.name, if selected { 1 } else { 2 }), s.arity)
}

/// Splits `a/1` into `(a, true)`.
pub fn untag(s: &Sym) -> Option<(Sym, bool)> {
    let (base, tag) = s.name.rsplit_once('/')?;
    let sel = match tag {
        "1" => true,
        "2" => false,
        _ => return None,
    };
    Some((Sym::new(base, s.arity), sel))
}

fn mark(t: &Term<Sym>, selected: &[bool]) -> Term<Sym> {
    let slots = t
        .slots()
        .iter()
        .zip(selected)
        .map(|(s, &b)| match s {
            Slot::Node(l) => Slot::Node(tagged(l, b)),
            Slot::Port => Slot::Port,
        })
        .collect();
    Term::from_slots(slots).expect("same shape")
}

fn label_in(t: &Term<Sym>, pos: usize, set: &Names) -> bool {
    matches!(&t.slots()[pos], Slot::Node(l) if set.contains(&l.name))
}

/// Selects the nodes that are an `i`-th child (1-based).
pub fn char_child(t: &Term<Sym>, i: usize) -> Term<Sym> {
    let sel: Vec<bool> = t.parents().iter().map(|p| matches!(p, Some((_, j)) if j + 1 == i)).collect();
    mark(t, &sel)
}

/// For each node: does a child start a path of `Γ` nodes ending in `Δ`?
fn until_mask(t: &Term<Sym>, gamma: &Names, delta: &Names, reflexive: bool) -> Vec<bool> {
    let ends = t.ends();
    let n = t.len();
    // reach[y]: y in Δ, or y in Γ with a reaching child
    let mut reach = vec![false; n];
    let mut below = vec![false; n];
    for pos in (0..n).rev() {
        if matches!(t.slots()[pos], Slot::Port) {
            continue;
        }
        below[pos] = t.children_of(pos, &ends).into_iter().any(|c| reach[c]);
        reach[pos] = label_in(t, pos, delta) || (label_in(t, pos, gamma) && below[pos]);
    }
    if reflexive {
        (0..n).map(|p| below[p] || label_in(t, p, delta)).collect()
    } else {
        below
    }
}

/// Selects `x` when some strict descendant `y` has its label in `Δ` and every
/// node strictly between `x` and `y` has its label in `Γ`. With `reflexive`,
/// `y = x` also counts.
pub fn char_until(t: &Term<Sym>, gamma: &Names, delta: &Names, reflexive: bool) -> Term<Sym> {
    mark(t, &until_mask(t, gamma, delta, reflexive))
}

fn since_mask(t: &Term<Sym>, gamma: &Names, delta: &Names, reflexive: bool) -> Vec<bool> {
    let parents = t.parents();
    let n = t.len();
    let mut up = vec![false; n];
    let mut above = vec![false; n];
    for pos in 0..n {
        above[pos] = parents[pos].is_some_and(|(p, _)| up[p]);
        up[pos] = label_in(t, pos, delta) || (label_in(t, pos, gamma) && above[pos]);
    }
    if reflexive {
        (0..n).map(|p| above[p] || label_in(t, p, delta)).collect()
    } else {
        above
    }
}

/// Dual of [`char_until`] along the ancestors.
pub fn char_since(t: &Term<Sym>, gamma: &Names, delta: &Names, reflexive: bool) -> Term<Sym> {
    mark(t, &since_mask(t, gamma, delta, reflexive))
}

/// Renames symbols by name. Unmapped symbols are kept.
pub fn apply_hom(t: &Term<Sym>, f: &BTreeMap<String, String>) -> Term<Sym> {
    t.map(|s| match f.get(&s.name) {
        Some(b) => Sym::new(b.clone(), s.arity),
        None => s.clone(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    Hom(BTreeMap<String, String>),
    Child(usize),
    Until { gamma: Names, delta: Names, reflexive: bool },
    Since { gamma: Names, delta: Names, reflexive: bool },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    pub steps: Vec<Step>,
}

impl Program {
    pub fn new(steps: Vec<Step>) -> Program {
        Program { steps }
    }

    /// `(relabel step ...)`.
    pub fn from_sexp(s: &Sexp) -> Result<Program> {
        let items = s.expect_tagged("relabel")?;
        let mut steps = Vec::new();
        for it in items {
            steps.push(step_from_sexp(it)?);
        }
        Ok(Program { steps })
    }

    pub fn parse(text: &str) -> Result<Program> {
        Program::from_sexp(&sexp::parse(text)?)
    }

    /// The alphabet after running on trees over `input`, or the first
    /// mismatch between a step and the alphabet it receives.
    pub fn output_alphabet(&self, input: &RankedAlphabet) -> Result<RankedAlphabet> {
        let mut cur = input.clone();
        for (k, step) in self.steps.iter().enumerate() {
            let known = |set: &Names, what: &str| -> Result<()> {
                for a in set {
                    if cur.arity_of(a).is_none() {
                        bail!(Validation, "step {}: {what} symbol `{a}` is not in the alphabet", k + 1);
                    }
                }
                Ok(())
            };
            cur = match step {
                Step::Hom(f) => {
                    for a in f.keys() {
                        if cur.arity_of(a).is_none() {
                            bail!(Validation, "step {}: mapped symbol `{a}` is not in the alphabet", k + 1);
                        }
                    }
                    let mut out: BTreeMap<String, usize> = BTreeMap::new();
                    for s in cur.symbols() {
                        let name = f.get(&s.name).cloned().unwrap_or(s.name.clone());
                        if let Some(b) = out.insert(name.clone(), s.arity) {
                            if b != s.arity {
                                bail!(Validation, "step {}: `{name}` would get arities {b} and {}", k + 1, s.arity);
                            }
                        }
                    }
                    RankedAlphabet::new(out)?
                }
                Step::Child(i) => {
                    if *i == 0 {
                        bail!(Validation, "step {}: child positions start at 1", k + 1);
                    }
                    split(&cur)?
                }
                Step::Until { gamma, delta, .. } | Step::Since { gamma, delta, .. } => {
                    known(gamma, "Γ")?;
                    known(delta, "Δ")?;
                    split(&cur)?
                }
            };
        }
        Ok(cur)
    }
}

fn split(a: &RankedAlphabet) -> Result<RankedAlphabet> {
    RankedAlphabet::from_syms(&a.symbols().flat_map(|s| [tagged(&s, true), tagged(&s, false)]).collect::<Vec<_>>())
}

fn name_set(s: &Sexp, tag: &str) -> Result<Names> {
    let items = s.expect_tagged(tag)?;
    items.iter().map(|x| x.expect_atom("a symbol").map(String::from)).collect()
}

fn step_from_sexp(s: &Sexp) -> Result<Step> {
    let head = s.head().ok_or_else(|| s.error("expected a relabelling step"))?;
    let items = &s.expect_list("a step")?[1..];
    match head {
        "hom" => {
            let [pairs] = items else { return Err(s.error("expected (hom ((a b) ...))")) };
            let mut f = BTreeMap::new();
            for p in pairs.expect_list("a list of pairs")? {
                let ab = p.expect_list("(a b)")?;
                if ab.len() != 2 {
                    return Err(p.error("expected (a b)"));
                }
                let a = ab[0].expect_atom("a symbol")?.to_string();
                if f.insert(a.clone(), ab[1].expect_atom("a symbol")?.to_string()).is_some() {
                    return Err(p.error(format!("`{a}` mapped twice")));
                }
            }
            Ok(Step::Hom(f))
        }
        "child" => {
            let [i] = items else { return Err(s.error("expected (child i)")) };
            Ok(Step::Child(i.expect_usize("a child index")?))
        }
        "until" | "since" => {
            let (gd, rest) = match items {
                [g, d, rest @ ..] => ((g, d), rest),
                _ => return Err(s.error(format!("expected ({head} (G ...) (D ...))"))),
            };
            let reflexive = match rest {
                [] => false,
                [r] if r.as_atom() == Some("reflexive") => true,
                _ => return Err(s.error("only `reflexive` may follow the two sets")),
            };
            let gamma = name_set(gd.0, "G")?;
            let delta = name_set(gd.1, "D")?;
            Ok(if head == "until" {
                Step::Until { gamma, delta, reflexive }
            } else {
                Step::Since { gamma, delta, reflexive }
            })
        }
        other => Err(s.error(format!("unknown relabelling step `{other}`"))),
    }
}

pub fn run_step(t: &Term<Sym>, step: &Step) -> Term<Sym> {
    match step {
        Step::Hom(f) => apply_hom(t, f),
        Step::Child(i) => char_child(t, *i),
        Step::Until { gamma, delta, reflexive } => char_until(t, gamma, delta, *reflexive),
        Step::Since { gamma, delta, reflexive } => char_since(t, gamma, delta, *reflexive),
    }
}

/// Runs the steps in order, checking the program against the alphabet of
/// the tree's own labels.
pub fn run_program(t: &Term<Sym>, p: &Program) -> Result<Term<Sym>> {
    let alpha = RankedAlphabet::from_syms(&t.labels().cloned().collect::<BTreeSet<_>>())?;
    run_program_over(t, p, &alpha)
}

/// Like [`run_program`] but against a declared alphabet, which must
/// contain every label of `t`.
pub fn run_program_over(t: &Term<Sym>, p: &Program, alpha: &RankedAlphabet) -> Result<Term<Sym>> {
    if let Some(s) = t.labels().find(|s| alpha.arity_of(&s.name) != Some(s.arity)) {
        bail!(Validation, "symbol `{}/{}` is not in the alphabet", s.name, s.arity);
    }
    p.output_alphabet(alpha)?;
    Ok(p.steps.iter().fold(t.clone(), |t, s| run_step(&t, s)))
}

fn all_names(t: &Term<Sym>) -> Names {
    t.labels().map(|s| s.name.clone()).collect()
}

/// Adds the parent's label: `a[b]`, or `a[-]` at the root.
pub fn parent(t: &Term<Sym>) -> Term<Sym> {
    let parents = t.parents();
    let slots = t
        .slots()
        .iter()
        .enumerate()
        .map(|(pos, s)| match s {
            Slot::Port => Slot::Port,
            Slot::Node(l) => {
                let up = match parents[pos] {
                    Some((p, _)) => t.label(p).expect("parents are nodes").name.clone(),
                    None => "-".into(),
                };
                Slot::Node(Sym::new(format!("{}[{up}]", l.name), l.arity))
            }
        })
        .collect();
    Term::from_slots(slots).expect("same shape")
}

/// Adds the children's labels: `a[b,c]`, ports shown as `_`.
pub fn children(t: &Term<Sym>) -> Term<Sym> {
    let ends = t.ends();
    let slots = t
        .slots()
        .iter()
        .enumerate()
        .map(|(pos, s)| match s {
            Slot::Port => Slot::Port,
            Slot::Node(l) => {
                let kids: Vec<String> = t
                    .children_of(pos, &ends)
                    .into_iter()
                    .map(|c| t.label(c).map_or("_".to_string(), |k| k.name.clone()))
                    .collect();
                Slot::Node(Sym::new(format!("{}[{}]", l.name, kids.join(",")), l.arity))
            }
        })
        .collect();
    Term::from_slots(slots).expect("same shape")
}

/// Selects nodes with a strict descendant labelled in `Γ`.
pub fn descendant_in(t: &Term<Sym>, gamma: &Names) -> Term<Sym> {
    char_until(t, &all_names(t), gamma, false)
}

/// The same selection computed from the descendant factorisation: split
/// nodes by membership in `Γ`, then a node has a descendant-or-self in `Γ`
/// iff its factor is a `Γ` factor or has a factor below it. The strict
/// version asks this of some child.
pub fn descendant_in_by_factors(t: &Term<Sym>, gamma: &Names) -> Term<Sym> {
    let mut positions = t.node_positions().into_iter();
    let at = t.map(|s| At(s.clone(), positions.next().unwrap()));
    let tt = fact_down(&at, |x| if gamma.contains(&x.0.name) { Side::First } else { Side::Second });
    let ends = tt.ends();
    let mut weak = vec![false; t.len()];
    for (pos, s) in tt.slots().iter().enumerate() {
        let Slot::Node(f) = s else { continue };
        let in_gamma = gamma.contains(&f.root().expect("factors are nonempty").0.name);
        let leaf = tt.children_of(pos, &ends).into_iter().all(|c| matches!(tt.slots()[c], Slot::Port));
        for x in f.labels() {
            weak[x.1] = in_gamma || !leaf;
        }
    }
    let ends = t.ends();
    let sel: Vec<bool> = (0..t.len())
        .map(|pos| match t.slots()[pos] {
            Slot::Port => false,
            Slot::Node(_) => t.children_of(pos, &ends).into_iter().any(|c| weak[c]),
        })
        .collect();
    mark(t, &sel)
}

/// A symbol with its position in the original term.
#[derive(Clone)]
struct At(Sym, usize);

impl crate::term::Ranked for At {
    fn arity(&self) -> usize {
        self.0.arity
    }
}

/// Selects nodes with a strict ancestor labelled in `Γ`.
pub fn ancestor_in(t: &Term<Sym>, gamma: &Names) -> Term<Sym> {
    char_since(t, &all_names(t), gamma, false)
}

fn checked(s: &Sym, m: Sym) -> Result<Sym> {
    if m.arity != s.arity {
        bail!(Arity, "`{}` relabelled to `{}` of arity {}", s.name, m.name, m.arity);
    }
    Ok(m)
}

/// `f` at the root, `g` everywhere else.
pub fn root_map(t: &Term<Sym>, f: impl Fn(&Sym) -> Sym, g: impl Fn(&Sym) -> Sym) -> Result<Term<Sym>> {
    let mut slots = Vec::with_capacity(t.len());
    for (pos, s) in t.slots().iter().enumerate() {
        slots.push(match s {
            Slot::Port => Slot::Port,
            Slot::Node(l) => Slot::Node(checked(l, if pos == 0 { f(l) } else { g(l) })?),
        });
    }
    Term::from_slots(slots)
}

/// `f` at nodes without children, `g` elsewhere.
pub fn leaves_map(t: &Term<Sym>, f: impl Fn(&Sym) -> Sym, g: impl Fn(&Sym) -> Sym) -> Result<Term<Sym>> {
    t.try_map(|l| checked(l, if l.arity == 0 { f(l) } else { g(l) }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tree(src: &str) -> Term<Sym> {
        Sym::parse_term(src, &[("a", 2), ("b", 1), ("c", 0)]).unwrap()
    }

    fn selected(t: &Term<Sym>) -> Vec<bool> {
        t.labels().map(|s| untag(s).unwrap().1).collect()
    }

    #[test]
    fn child_tags() {
        let t = tree("(a (b c) c)");
        assert_eq!(selected(&char_child(&t, 1)), [false, true, true, false]);
        assert_eq!(selected(&char_child(&t, 2)), [false, false, false, true]);
    }

    #[test]
    fn until_through_gamma() {
        let t = tree("(a (b c) c)");
        let u = char_until(&t, &names(["b"]), &names(["c"]), false);
        assert_eq!(u.to_string(), "(a/1 (b/1 c/2) c/2)");
        assert!(selected(&char_until(&t, &names(["a", "b"]), &names([]), false)).iter().all(|b| !b));
        // reflexive: the leaves are in Δ themselves
        assert_eq!(selected(&char_until(&t, &names(["b"]), &names(["c"]), true)), [true; 4]);
        assert_eq!(selected(&char_until(&t, &names([]), &names(["b"]), true)), [true, true, false, false]);
    }

    #[test]
    fn since_dual() {
        let t = tree("(a (b c) c)");
        let s = char_since(&t, &names(["b"]), &names(["a"]), false);
        assert_eq!(selected(&s), [false, true, true, true]);
        let s = char_since(&t, &names([]), &names(["b"]), false);
        assert_eq!(selected(&s), [false, false, true, false]);
    }

    #[test]
    fn program_syntax() {
        let p = Program::parse("(relabel (until (G b) (D c)) (hom ((a/1 x) (a/2 y))))").unwrap();
        let t = tree("(a (b c) c)");
        let out = run_program(&t, &p).unwrap();
        assert_eq!(out.to_string(), "(x (b/1 c/2) c/2)");
        assert!(run_program(&t, &Program::parse("(relabel (until (G z) (D c)))").unwrap()).is_err());
        assert_eq!(run_program(&t, &Program::default()).unwrap(), t);
    }

    #[test]
    fn decorations() {
        let t = tree("(a (b c) c)");
        assert_eq!(parent(&t).to_string(), "(a[-] (b[a] c[b]) c[a])");
        assert_eq!(children(&t).to_string(), "(a[b,c] (b[c] c[]) c[])");
        // strict: a leaf in Γ has no descendant
        assert_eq!(selected(&descendant_in(&t, &names(["c"]))), [true, true, false, false]);
        assert_eq!(descendant_in_by_factors(&t, &names(["c"])), descendant_in(&t, &names(["c"])));
        assert_eq!(selected(&ancestor_in(&t, &names(["b"]))), [false, false, true, false]);
        let up = |s: &Sym| Sym::new(s.name.to_uppercase(), s.arity);
        let id = |s: &Sym| s.clone();
        assert_eq!(root_map(&t, up, id).unwrap().to_string(), "(A (b c) c)");
        assert_eq!(leaves_map(&t, up, id).unwrap().to_string(), "(a (b C) C)");
    }
}
