//! Prime functions: coproduct plumbing, factorisations, pre-order, fold
//! utilities, error raising and a few derived helpers.
//!
//! Most operations come in two forms: a typed one on [`Term`] and friends,
//! and a [`Value`] one that the pipeline evaluator dispatches to.

use std::collections::HashSet;

use crate::error::{bail, Result};
use crate::matrix::{self, Mat};
use crate::term::{Ranked, Slot, Term};
use crate::value::{Fold, Grouping, Side, Sym, Value};

/// Reserved names of the two gray symbols used by [`preorder`].
pub const PRE0: &str = "pre0";
pub const PRE2: &str = "pre2";

pub fn coproj(side: Side, v: Value) -> Value {
    Value::inj(side, v)
}

/// `[f, g]`.
pub fn case_of(v: &Value, f: impl FnOnce(&Value) -> Result<Value>, g: impl FnOnce(&Value) -> Result<Value>) -> Result<Value> {
    match v {
        Value::Inj(Side::First, x) => f(x),
        Value::Inj(Side::Second, x) => g(x),
        other => bail!(Type, "case needs an injection, found {}", other.kind()),
    }
}

/// `f + g`.
pub fn plus_lift(v: &Value, f: impl FnOnce(&Value) -> Result<Value>, g: impl FnOnce(&Value) -> Result<Value>) -> Result<Value> {
    match v {
        Value::Inj(Side::First, x) => Ok(Value::inj(Side::First, f(x)?)),
        Value::Inj(Side::Second, x) => Ok(Value::inj(Side::Second, g(x)?)),
        other => bail!(Type, "coproduct lifting needs an injection, found {}", other.kind()),
    }
}

/// `(A + B) ⊗ C -> (A ⊗ C) + (B ⊗ C)`.
pub fn distribute(v: &Value) -> Result<Value> {
    match v {
        Value::Pair(a, c) => match a.as_ref() {
            Value::Inj(side, x) => Ok(Value::inj(*side, Value::pair((**x).clone(), (**c).clone()))),
            other => bail!(Type, "distribute needs an injection on the left, found {}", other.kind()),
        },
        other => bail!(Type, "distribute needs a pair, found {}", other.kind()),
    }
}

/// Groups the nodes of `t` into connected factors: the edge from a node to
/// its child stays inside a factor iff `same(parent, child)`. Ports of `t`
/// become ports of the outer term.
pub fn factorize_by<L: Ranked + Clone>(t: &Term<L>, mut same: impl FnMut(usize, usize) -> bool) -> Term<Term<L>> {
    let ends = t.ends();
    let parents = t.parents();
    let mut out = Vec::new();
    let mut todo = vec![0usize];
    while let Some(p) = todo.pop() {
        if matches!(t.slots()[p], Slot::Port) {
            out.push(Slot::Port);
            continue;
        }
        let mut factor = Vec::new();
        let mut exits = Vec::new();
        let mut i = p;
        while i < ends[p] {
            let inside = i == p
                || (matches!(t.slots()[i], Slot::Node(_)) && same(parents[i].unwrap().0, i));
            if inside {
                factor.push(t.slots()[i].clone());
                i += 1;
            } else {
                factor.push(Slot::Port);
                exits.push(i);
                i = ends[i];
            }
        }
        out.push(Slot::Node(Term::from_slots(factor).expect("factor is a term")));
        todo.extend(exits.into_iter().rev());
    }
    Term::from_slots(out).expect("factorisation is a term")
}

/// Factors are the connected regions of nodes on one side. Such a region
/// has one set of opposing-side proper ancestors, so it lies inside one
/// class of the ancestor equivalence.
pub fn fact_up<L: Ranked + Clone>(t: &Term<L>, side: impl Fn(&L) -> Side) -> Term<Term<L>> {
    let sides: Vec<Option<Side>> = t.slots().iter().map(|s| match s {
        Slot::Node(l) => Some(side(l)),
        Slot::Port => None,
    }).collect();
    factorize_by(t, |p, c| sides[p] == sides[c])
}

/// Refines [`fact_up`]: an edge also breaks when the child has fewer
/// opposing-side descendants than the parent.
pub fn fact_down<L: Ranked + Clone>(t: &Term<L>, side: impl Fn(&L) -> Side) -> Term<Term<L>> {
    let sides: Vec<Option<Side>> = t.slots().iter().map(|s| match s {
        Slot::Node(l) => Some(side(l)),
        Slot::Port => None,
    }).collect();
    let ends = t.ends();
    // prefix counts of nodes on each side
    let mut first = vec![0usize; t.len() + 1];
    let mut second = vec![0usize; t.len() + 1];
    for i in 0..t.len() {
        first[i + 1] = first[i] + usize::from(sides[i] == Some(Side::First));
        second[i + 1] = second[i] + usize::from(sides[i] == Some(Side::Second));
    }
    let opposing_below = |pos: usize| -> usize {
        match sides[pos] {
            Some(Side::First) => second[ends[pos]] - second[pos + 1],
            Some(Side::Second) => first[ends[pos]] - first[pos + 1],
            None => 0,
        }
    };
    factorize_by(t, |p, c| sides[p] == sides[c] && opposing_below(p) == opposing_below(c))
}

fn split_injections(t: &Term<Value>) -> Result<(Term<Value>, Vec<Side>)> {
    let mut sides = Vec::new();
    let mut slots = Vec::with_capacity(t.len());
    for s in t.slots() {
        slots.push(match s {
            Slot::Port => Slot::Port,
            Slot::Node(Value::Inj(side, x)) => {
                sides.push(*side);
                Slot::Node((**x).clone())
            }
            Slot::Node(other) => bail!(Type, "factorisation needs injected labels, found {}", other.kind()),
        });
    }
    Ok((Term::from_slots(slots)?, sides))
}

fn factor_value(tt: Term<Term<(Side, Value)>>) -> Value {
    Value::Term(tt.into_map(|f| {
        let side = f.root().expect("factors are nonempty").0;
        Value::inj(side, Value::Term(f.into_map(|(_, v)| v)))
    }))
}

fn value_fact(v: &Value, down: bool) -> Result<Value> {
    let (plain, sides) = split_injections(v.as_term()?)?;
    let mut sides = sides.into_iter();
    let tagged = plain.map(|x| (sides.next().unwrap(), x.clone()));
    let tt = if down { fact_down(&tagged, |l| l.0) } else { fact_up(&tagged, |l| l.0) };
    Ok(factor_value(tt))
}

impl Ranked for (Side, Value) {
    fn arity(&self) -> usize {
        self.1.arity()
    }
}

pub fn fact_up_value(v: &Value) -> Result<Value> {
    value_fact(v, false)
}

pub fn fact_down_value(v: &Value) -> Result<Value> {
    value_fact(v, true)
}

/// Pre-order listing of `t` as a right-leaning spine
/// `pre2(l(v1), pre2(l(v2), ... pre2(l(vm), pre0)))`, where `l(v)` is the
/// symbol of `v` with non-port children replaced by `pre0`. The output's
/// ports follow the order of the spine, so the k = 1 grouping sends each of
/// them back to the input port it stands for.
pub fn preorder<L: Ranked + Clone>(t: &Term<L>, pre0: L, pre2: L) -> Fold<Term<L>> {
    let ends = t.ends();
    let ports_before = t.ports_before();
    let mut slots = Vec::new();
    let mut grouping = Vec::new();
    for pos in 0..t.len() {
        let Slot::Node(l) = &t.slots()[pos] else { continue };
        slots.push(Slot::Node(pre2.clone()));
        slots.push(Slot::Node(l.clone()));
        for c in t.children_of(pos, &ends) {
            match t.slots()[c] {
                Slot::Port => {
                    slots.push(Slot::Port);
                    grouping.push((ports_before[c] + 1, 1));
                }
                Slot::Node(_) => slots.push(Slot::Node(pre0.clone())),
            }
        }
    }
    slots.push(Slot::Node(pre0));
    Fold {
        payload: Term::from_slots(slots).expect("spine is a term"),
        grouping: Grouping::from_vec_unchecked(grouping),
        k: 1,
        outer: t.arity(),
    }
}

pub fn preorder_sym(t: &Term<Sym>) -> Fold<Term<Sym>> {
    preorder(t, Sym::new(PRE0, 0), Sym::new(PRE2, 2))
}

/// Reads the original labels back off a [`preorder`] spine.
pub fn spine_labels<L: Clone + PartialEq>(spine: &Term<L>, pre0: &L, pre2: &L) -> Vec<L> {
    let mut out = Vec::new();
    let mut after_pre2 = false;
    for s in spine.slots() {
        if let Slot::Node(l) = s {
            if after_pre2 {
                out.push(l.clone());
                after_pre2 = false;
            } else if l == pre2 {
                after_pre2 = true;
            } else {
                debug_assert!(l == pre0);
            }
        }
    }
    out
}

/// Untwisting: a term whose labels carry their own k = 1 grouping becomes
/// one term with a single grouping. This is the unfolding for k = 1.
pub fn untwist<L: Ranked + Clone>(t: &Term<Fold<L>>) -> Result<Fold<Term<L>>> {
    for f in t.labels() {
        if f.k != 1 {
            bail!(Type, "untwist needs 1-folds, found a {}-fold", f.k);
        }
    }
    let mats = t.map(|f| Mat { k: 1, tuple: vec![Term::unit(f.payload.clone())], grouping: f.grouping.clone(), outer: f.outer });
    let m = matrix::unfold_terms(1, &mats)?;
    let Mat { tuple, grouping, outer, .. } = m;
    Ok(Fold { payload: tuple.into_iter().next().unwrap(), grouping, k: 1, outer })
}

/// Reconstruction: reads a `m`-fold as a `k`-fold, `m <= k`.
pub fn increase_fold<T: Ranked>(f: Fold<T>, k: usize) -> Result<Fold<T>> {
    if k < f.k {
        bail!(Precondition, "cannot increase a {}-fold to {k}", f.k);
    }
    Ok(Fold { k, ..f })
}

/// Reconstruction: the partial inverse of [`increase_fold`].
pub fn decrease_fold<T: Ranked>(f: Fold<T>, m: usize) -> Result<Fold<T>> {
    if m == 0 {
        bail!(Precondition, "fold index must be positive");
    }
    if let Some(&(o, s)) = f.grouping.as_slice().iter().find(|&&(_, s)| s > m) {
        bail!(Precondition, "port grouped to ({o}, {s}) does not fit a {m}-fold");
    }
    Ok(Fold { k: m, ..f })
}

/// Reconstruction: swaps the components of a folded pair; the grouping is
/// permuted with the ports.
pub fn fold_tensor_swap(v: &Value) -> Result<Value> {
    let Value::Folded(f) = v else { bail!(Type, "fold-swap needs a fold, found {}", v.kind()) };
    let Value::Pair(a, b) = &f.payload else { bail!(Type, "fold-swap needs a folded pair") };
    let na = a.arity();
    let g = f.grouping.as_slice();
    let map = g[na..].iter().chain(&g[..na]).copied().collect();
    Value::folded(Value::pair((**b).clone(), (**a).clone()), Grouping::from_vec_unchecked(map), f.k, f.outer)
}

/// Reconstruction: the k-fold of `k` unary terminal elements on one outer
/// port, i.e. the interface of a bare port in a k-unfold.
pub fn k_unit(k: usize) -> Result<Value> {
    if k == 0 {
        bail!(Precondition, "fold index must be positive");
    }
    let mut payload = Value::Top(1);
    for _ in 1..k {
        payload = Value::pair(payload, Value::Top(1));
    }
    Value::folded(payload, Grouping::from_vec_unchecked((1..=k).map(|j| (1, j)).collect()), k, 1)
}

fn is_bottom(v: &Value) -> Result<bool> {
    match v {
        Value::Inj(Side::First, _) => Ok(false),
        Value::Inj(Side::Second, _) => Ok(true),
        other => bail!(Type, "error raising needs injected values, found {}", other.kind()),
    }
}

fn strip(v: &Value) -> Value {
    match v {
        Value::Inj(_, x) => (**x).clone(),
        other => other.clone(),
    }
}

/// `C(S + ⊥) -> C(S) + ⊥` for terms, pairs and folds: any `⊥` inside makes
/// the whole value the terminal element of its arity.
pub fn raise(v: &Value) -> Result<Value> {
    let bottom = |n: usize| Ok(Value::inj(Side::Second, Value::Top(n)));
    match v {
        Value::Term(t) => {
            let mut any = false;
            for l in t.labels() {
                any |= is_bottom(l)?;
            }
            if any {
                bottom(t.arity())
            } else {
                Ok(Value::inj(Side::First, Value::Term(t.map(strip))))
            }
        }
        Value::Pair(a, b) => {
            if is_bottom(a)? | is_bottom(b)? {
                bottom(v.arity())
            } else {
                Ok(Value::inj(Side::First, Value::pair(strip(a), strip(b))))
            }
        }
        Value::Folded(f) => {
            if is_bottom(&f.payload)? {
                bottom(f.outer)
            } else {
                Ok(Value::inj(
                    Side::First,
                    Value::Folded(Box::new(Fold { payload: strip(&f.payload), ..(**f).clone() })),
                ))
            }
        }
        other => bail!(Type, "error raising needs a term, pair or fold, found {}", other.kind()),
    }
}

/// Erases every node whose label is in `erase` (all unary) by splicing its
/// child into its place.
pub fn filter_unary<L: Ranked + Clone + Eq + std::hash::Hash>(t: &Term<L>, erase: &HashSet<L>) -> Result<Term<L>> {
    if let Some(l) = erase.iter().find(|l| l.arity() != 1) {
        bail!(Precondition, "filter can only erase unary symbols, one has arity {}", l.arity());
    }
    let slots = t
        .slots()
        .iter()
        .filter(|s| !matches!(s, Slot::Node(l) if erase.contains(l)))
        .cloned()
        .collect();
    Term::from_slots(slots)
}

/// Lifts `g` to terms and flattens.
pub fn homomorphism<L: Ranked + Clone, M: Ranked + Clone>(t: &Term<L>, mut g: impl FnMut(&L) -> Result<Term<M>>) -> Result<Term<M>> {
    Ok(Term::flatten(&t.try_map(|l| g(l))?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::RankedAlphabet;

    fn alpha() -> RankedAlphabet {
        RankedAlphabet::new([("a", 2), ("b", 1), ("c", 0)].map(|(n, a)| (n.to_string(), a))).unwrap()
    }

    fn t(s: &str) -> Term<Sym> {
        alpha().parse_term(s).unwrap()
    }

    #[test]
    fn distribute_and_case() {
        let v = Value::pair(Value::inj(Side::First, Value::sym("a", 2)), Value::sym("g", 0));
        assert_eq!(
            distribute(&v).unwrap(),
            Value::inj(Side::First, Value::pair(Value::sym("a", 2), Value::sym("g", 0)))
        );
        let r = case_of(&Value::inj(Side::Second, Value::Top(0)), |_| Ok(Value::Top(1)), |_| Ok(Value::Top(2)));
        assert_eq!(r.unwrap(), Value::Top(2));
    }

    // labels carry their side in the name suffix: a1 is side 1, b2 side 2
    fn sided(s: &str) -> Term<(Side, Sym)> {
        let ab = RankedAlphabet::new(
            [("a1", 2), ("a2", 2), ("b1", 1), ("b2", 1), ("c1", 0), ("c2", 0)].map(|(n, a)| (n.to_string(), a)),
        )
        .unwrap();
        ab.parse_term(s).unwrap().map(|x| {
            (if x.name.ends_with('1') { Side::First } else { Side::Second }, x.clone())
        })
    }

    impl Ranked for (Side, Sym) {
        fn arity(&self) -> usize {
            self.1.arity
        }
    }

    #[test]
    fn fact_up_chain() {
        let x = sided("(b1 (b2 c1))");
        let f = fact_up(&x, |l| l.0);
        assert_eq!(f.size(), 3);
        assert_eq!(f.height(), 3);
        assert_eq!(Term::flatten(&f), x);
    }

    #[test]
    fn fact_down_separates_by_descendants() {
        let x = sided("(a1 c1 (b2 c2))");
        let up = fact_up(&x, |l| l.0);
        let down = fact_down(&x, |l| l.0);
        assert_eq!(up.size(), 2);
        // root has an opposing descendant, the side-1 leaf has none
        assert_eq!(down.size(), 3);
        assert_eq!(Term::flatten(&down), x);
    }

    #[test]
    fn preorder_examples() {
        let p = preorder_sym(&t("c"));
        assert_eq!(p.payload.to_string(), "(pre2 c pre0)");
        assert!(p.grouping.is_empty());

        let ab = RankedAlphabet::new([("a", 2), ("b", 1), ("c", 0)].map(|(n, a)| (n.to_string(), a))).unwrap();
        let p = preorder_sym(&ab.parse_term("(a (b _) c)").unwrap());
        assert_eq!(p.payload.to_string(), "(pre2 (a pre0 pre0) (pre2 (b _) (pre2 c pre0)))");
        assert_eq!(p.grouping.as_slice(), &[(1, 1)]);

        let p = preorder_sym(&ab.parse_term("(a (b _) _)").unwrap());
        assert_eq!(p.grouping.as_slice(), &[(2, 1), (1, 1)]);

        let p = preorder_sym(&Term::port());
        assert_eq!(p.payload.to_string(), "pre0");
        assert_eq!(p.outer, 1);
    }

    #[test]
    fn untwist_composes_reversals() {
        let rev = Fold {
            payload: Sym::new("a", 2),
            grouping: Grouping::new(vec![(2, 1), (1, 1)], 1, 2).unwrap(),
            k: 1,
            outer: 2,
        };
        let single = untwist(&Term::unit(rev.clone())).unwrap();
        assert_eq!(single.payload, Term::unit(Sym::new("a", 2)));
        assert_eq!(single.grouping.as_slice(), &[(2, 1), (1, 1)]);

        // rev over (port, rev): the lower reversal is undone by the upper one
        let two = Term::node(rev.clone(), vec![Term::port(), Term::unit(rev)]);
        let u = untwist(&two).unwrap();
        assert_eq!(u.payload.to_string(), "(a (a _ _) _)");
        assert_eq!(u.grouping.as_slice(), &[(3, 1), (2, 1), (1, 1)]);
    }

    #[test]
    fn raise_examples() {
        let ok = Value::Term(Term::unit(Value::inj(Side::First, Value::sym("a", 2))));
        assert_eq!(raise(&ok).unwrap(), Value::inj(Side::First, Value::Term(Term::unit(Value::sym("a", 2)))));
        let bad = Value::Term(Term::node(
            Value::inj(Side::First, Value::sym("b", 1)),
            vec![Term::unit(Value::inj(Side::Second, Value::Top(2)))],
        ));
        assert_eq!(raise(&bad).unwrap(), Value::inj(Side::Second, Value::Top(2)));
        let pair = Value::pair(Value::inj(Side::First, Value::Top(1)), Value::inj(Side::Second, Value::Top(0)));
        assert_eq!(raise(&pair).unwrap(), Value::inj(Side::Second, Value::Top(1)));
    }

    #[test]
    fn filter_and_hom() {
        let erase: HashSet<Sym> = [Sym::new("b", 1)].into();
        assert_eq!(filter_unary(&t("(a (b c) c)"), &erase).unwrap(), t("(a c c)"));
        let x = t("(a (b c) (b (b c)))");
        assert_eq!(homomorphism(&x, |l| Ok(Term::unit(l.clone()))).unwrap(), x);
        assert!(filter_unary(&x, &[Sym::new("a", 2)].into()).is_err());
    }

    #[test]
    fn fold_utilities() {
        let f = Fold::trivial(Sym::new("a", 2));
        assert_eq!(increase_fold(f.clone(), 1).unwrap(), f);
        let up = increase_fold(f.clone(), 3).unwrap();
        assert_eq!(decrease_fold(up, 1).unwrap(), f);
        assert_eq!(k_unit(3).unwrap().arity(), 1);
    }
}
