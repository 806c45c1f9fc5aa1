//! Unfolding split into special cases by the shape of the twists, and the
//! monotone unfolding assembled from those cases along a factorisation
//! forest. Every entry point here must agree with
//! [`unfold_general`](crate::matrix::unfold_general) on its domain.
//!
//! Internally a term is first normalised so that every bare port below a
//! node is reached through exactly one slot (slot 1). Ports then carry a
//! [`Ref`] saying which original `(port, slot)` they stand for, which lets
//! the cases below move, split and re-attach ports freely.

use std::collections::HashMap;

use crate::error::{bail, Error, Result};
use crate::factforest::{factorise, nested_branch_values, FiniteMonoid, NestedTerm};
use crate::matrix::{first_non_monotone, shallow_unfold, unfold_terms, Mat, Shallow, Twist, UnionFind};
use crate::term::{Ranked, Slot, Term};
use crate::value::Grouping;

/// Strongest description of the twists on internal edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TwistClass {
    /// Every internal twist is constant (vacuous without internal edges).
    AllConstant,
    AllEqual(Twist),
    /// `a ∘ b = a` whenever `b` hangs directly below `a`.
    Homogeneous,
    Other,
}

/// `(parent, child, twist)` for every edge between two nodes.
fn internal_twists<X: Ranked>(t: &Term<Mat<X>>) -> Vec<(usize, usize, Twist)> {
    let parents = t.parents();
    let mut out = Vec::new();
    for (pos, p) in parents.iter().enumerate() {
        if let (Some((p, i)), Slot::Node(_)) = (p, &t.slots()[pos]) {
            out.push((*p, pos, t.label(*p).unwrap().twist(i + 1)));
        }
    }
    out
}

pub fn classify_twists<X: Ranked>(t: &Term<Mat<X>>) -> TwistClass {
    let edges = internal_twists(t);
    if edges.iter().all(|e| e.2.is_constant()) {
        return TwistClass::AllConstant;
    }
    if edges.iter().all(|e| e.2 == edges[0].2) {
        return TwistClass::AllEqual(edges[0].2.clone());
    }
    let into: HashMap<usize, &Twist> = edges.iter().map(|(_, c, tw)| (*c, tw)).collect();
    let homogeneous = edges.iter().all(|(p, _, b)| into.get(p).is_none_or(|a| a.compose(b) == **a));
    if homogeneous {
        TwistClass::Homogeneous
    } else {
        TwistClass::Other
    }
}

/// Child of a partial shallow term: an element, or the unit placeholder
/// standing for a bare port.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Child<B> {
    Unit,
    Elem(B),
}

impl<B: Ranked> Ranked for Child<B> {
    fn arity(&self) -> usize {
        match self {
            Child::Unit => 1,
            Child::Elem(b) => b.arity(),
        }
    }
}

/// A matrix-power root whose children are matrix-power elements or units.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialShallow<A, B> {
    pub root: Mat<A>,
    pub children: Vec<Option<Mat<B>>>,
}

/// Shallow unfolding where some children are units: a unit child unfolds
/// to k single-port coordinates, one per slot.
pub fn partial_shallow_unfold<A: Ranked + Clone, B: Ranked + Clone>(
    s: &PartialShallow<A, B>,
) -> Result<Mat<Shallow<A, Child<B>>>> {
    let k = s.root.k;
    let children = s
        .children
        .iter()
        .map(|c| match c {
            Some(m) => m.clone().map(Child::Elem),
            None => Mat {
                k,
                tuple: vec![Child::Unit; k],
                grouping: Grouping::from_vec_unchecked((1..=k).map(|j| (1, j)).collect()),
                outer: 1,
            },
        })
        .collect();
    shallow_unfold(&Shallow { root: s.root.clone(), children })
}

/// Original `(port, slot)` of the input, or a cut below a region:
/// `(child position, slot)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Ref {
    Port(usize, usize),
    Cut(usize, usize),
}

/// A normalised term: bare ports use slot 1 exactly once, and `refs[p]`
/// names port `p`.
struct Prep<L> {
    k: usize,
    t: Term<Mat<Term<L>>>,
    refs: Vec<Ref>,
}

/// An unfolding in progress: coordinate terms and the refs of their ports.
struct Unf<L> {
    tuple: Vec<Term<L>>,
    refs: Vec<Vec<Ref>>,
}

enum Item {
    Node(usize),
    Port(Ref),
}

/// Builds a term top-down from `root`; `expand` gives a node's new label
/// and its children.
fn assemble<N: Ranked>(root: Item, mut expand: impl FnMut(usize) -> Result<(N, Vec<Item>)>) -> Result<(Term<N>, Vec<Ref>)> {
    let mut stack = vec![root];
    let mut slots = Vec::new();
    let mut refs = Vec::new();
    while let Some(it) = stack.pop() {
        match it {
            Item::Port(r) => {
                slots.push(Slot::Port);
                refs.push(r);
            }
            Item::Node(pos) => {
                let (label, items) = expand(pos)?;
                slots.push(Slot::Node(label));
                stack.extend(items.into_iter().rev());
            }
        }
    }
    Ok((Term::from_slots(slots)?, refs))
}

struct Shape {
    kids: Vec<Vec<usize>>,
    ports_before: Vec<usize>,
    ends: Vec<usize>,
}

impl Shape {
    fn of<X: Ranked>(t: &Term<X>) -> Shape {
        let ends = t.ends();
        let kids = (0..t.len()).map(|p| t.children_of(p, &ends)).collect();
        Shape { kids, ports_before: t.ports_before(), ends }
    }
}

fn is_port<X>(t: &Term<X>, pos: usize) -> bool {
    matches!(t.slots()[pos], Slot::Port)
}

fn node<X>(t: &Term<X>, pos: usize) -> &X {
    t.label(pos).expect("position holds a node")
}

fn check_input<L: Ranked>(k: usize, t: &Term<Mat<L>>) -> Result<()> {
    if k == 0 {
        bail!(Precondition, "k must be positive");
    }
    for (n, m) in t.labels().enumerate() {
        if m.k != k {
            bail!(Type, "node {n} holds a {}-element in a {k}-unfold", m.k);
        }
        m.validate().map_err(|e| Error::Structural(format!("node {n}: {e}")))?;
    }
    Ok(())
}

/// Splits every bare port into one port per slot that uses it.
fn normalise<L: Ranked + Clone>(k: usize, t: &Term<Mat<Term<L>>>) -> Result<Prep<L>> {
    let sh = Shape::of(t);
    let (t2, refs) = assemble(Item::Node(0), |pos| {
        let m = node(t, pos);
        let mut items = Vec::new();
        let mut at: HashMap<(usize, usize), usize> = HashMap::new();
        for (i, &c) in sh.kids[pos].iter().enumerate() {
            let i = i + 1;
            if is_port(t, c) {
                let mut qs: Vec<usize> = m.grouping.as_slice().iter().filter(|e| e.0 == i).map(|e| e.1).collect();
                qs.sort_unstable();
                for q in qs {
                    items.push(Item::Port(Ref::Port(sh.ports_before[c] + 1, q)));
                    at.insert((i, q), items.len());
                }
            } else {
                items.push(Item::Node(c));
                at.insert((i, 0), items.len());
            }
        }
        let grouping = m
            .grouping
            .as_slice()
            .iter()
            .map(|&(i, q)| match at.get(&(i, 0)) {
                Some(&n) => (n, q),
                None => (at[&(i, q)], 1),
            })
            .collect();
        let label = Mat { k, tuple: m.tuple.clone(), grouping: Grouping::from_vec_unchecked(grouping), outer: items.len() };
        Ok((label, items))
    })?;
    Ok(Prep { k, t: t2, refs })
}

fn split_refs<L>(m: Mat<Term<L>>, mut f: impl FnMut((usize, usize)) -> Ref) -> Unf<L> {
    let mut entries = m.grouping.as_slice().iter();
    let refs = m.tuple.iter().map(|c| entries.by_ref().take(c.arity()).map(|&e| f(e)).collect()).collect();
    Unf { tuple: m.tuple, refs }
}

fn to_mat<L>(u: Unf<L>, outer: usize) -> Result<Mat<Term<L>>> {
    let k = u.tuple.len();
    let mut grouping = Vec::new();
    for r in u.refs.into_iter().flatten() {
        match r {
            Ref::Port(p, q) => grouping.push((p, q)),
            Ref::Cut(..) => bail!(Structural, "a cut survived recombination"),
        }
    }
    Ok(Mat { k, tuple: u.tuple, grouping: Grouping::new(grouping, k, outer)?, outer })
}

/// Direct unfolding; used for k = 1, where it is untwisting.
fn base<L: Ranked + Clone>(p: &Prep<L>) -> Result<Unf<L>> {
    let m = unfold_terms(p.k, &p.t)?;
    Ok(split_refs(m, |(o, _)| p.refs[o - 1]))
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Cell<L> {
    Base(L),
    Split(usize),
}

impl<L: Ranked> Ranked for Cell<L> {
    fn arity(&self) -> usize {
        match self {
            Cell::Base(l) => l.arity(),
            Cell::Split(k) => *k,
        }
    }
}

/// Constant twists put each child wholly inside one coordinate of its
/// parent. Every node is cut into its k coordinate pieces, each piece is
/// linked to the pieces its slots name, the k root pieces hang under one
/// split node, and a single flatten assembles all coordinates at once.
fn constant_twist<L: Ranked + Clone>(p: &Prep<L>) -> Result<Unf<L>> {
    let k = p.k;
    let t = &p.t;
    let sh = Shape::of(t);
    enum Piece {
        Split,
        At(usize, usize),
        Port(Ref),
    }
    let mut stack = vec![Piece::Split];
    let mut slots: Vec<Slot<Term<Cell<L>>>> = Vec::new();
    let mut refs = Vec::new();
    while let Some(it) = stack.pop() {
        match it {
            Piece::Split => {
                slots.push(Slot::Node(Term::unit(Cell::Split(k))));
                stack.extend((1..=k).rev().map(|j| Piece::At(0, j)));
            }
            Piece::Port(r) => {
                slots.push(Slot::Port);
                refs.push(r);
            }
            Piece::At(pos, j) => {
                let m = node(t, pos);
                let member = &m.tuple[j - 1];
                slots.push(Slot::Node(member.map(|l| Cell::Base(l.clone()))));
                let start = m.offsets()[j - 1];
                let mut next = Vec::with_capacity(member.arity());
                for e in start..start + member.arity() {
                    let (i, q) = m.grouping.get(e);
                    let c = sh.kids[pos][i - 1];
                    next.push(if is_port(t, c) { Piece::Port(p.refs[sh.ports_before[c]]) } else { Piece::At(c, q) });
                }
                stack.extend(next.into_iter().rev());
            }
        }
    }
    let flat = Term::flatten(&Term::from_slots(slots)?);
    let ends = flat.ends();
    let mut refs = refs.into_iter();
    let mut tuple = Vec::with_capacity(k);
    let mut out_refs = Vec::with_capacity(k);
    for c in flat.children_of(0, &ends) {
        let piece = flat.subterm(c, &ends).map(|l| match l {
            Cell::Base(l) => l.clone(),
            Cell::Split(_) => unreachable!("split only at the root"),
        });
        out_refs.push(refs.by_ref().take(piece.arity()).collect());
        tuple.push(piece);
    }
    Ok(Unf { tuple, refs: out_refs })
}

/// Restriction to the coordinates in `s` (sorted, 1-based). Internal
/// edges must keep `s` and its complement apart.
fn project<L: Ranked + Clone>(p: &Prep<L>, s: &[usize]) -> Result<Prep<L>> {
    let t = &p.t;
    let sh = Shape::of(t);
    let mut index = vec![0; p.k + 1];
    for (n, &j) in s.iter().enumerate() {
        index[j] = n + 1;
    }
    let (t2, refs) = assemble(Item::Node(0), |pos| {
        let m = node(t, pos);
        let owners = m.owners();
        let mut items = Vec::new();
        let mut at = vec![0; m.outer + 1];
        for (i, &c) in sh.kids[pos].iter().enumerate() {
            if is_port(t, c) {
                let Some(e) = m.grouping.as_slice().iter().position(|e| e.0 == i + 1) else { continue };
                if index[owners[e]] == 0 {
                    continue;
                }
                items.push(Item::Port(p.refs[sh.ports_before[c]]));
            } else {
                items.push(Item::Node(c));
            }
            at[i + 1] = items.len();
        }
        let mut grouping = Vec::new();
        for (e, &(i, q)) in m.grouping.as_slice().iter().enumerate() {
            if index[owners[e]] == 0 {
                continue;
            }
            if is_port(t, sh.kids[pos][i - 1]) {
                grouping.push((at[i], 1));
            } else if index[q] == 0 {
                bail!(Precondition, "coordinates {s:?} are not closed under the twists");
            } else {
                grouping.push((at[i], index[q]));
            }
        }
        let tuple = s.iter().map(|&j| m.tuple[j - 1].clone()).collect();
        Ok((Mat { k: s.len(), tuple, grouping: Grouping::from_vec_unchecked(grouping), outer: items.len() }, items))
    })?;
    Ok(Prep { k: s.len(), t: t2, refs })
}

fn restrict(a: &Twist, s: &[usize]) -> Twist {
    let pos = |v: usize| s.iter().position(|&x| x == v).map(|n| n + 1);
    Twist(s.iter().map(|&q| a.apply(q).and_then(pos)).collect())
}

fn merge<L>(k: usize, parts: Vec<(Vec<usize>, Unf<L>)>) -> Unf<L> {
    let mut tuple: Vec<Option<Term<L>>> = (0..k).map(|_| None).collect();
    let mut refs: Vec<Vec<Ref>> = vec![Vec::new(); k];
    for (s, u) in parts {
        for ((j, t), r) in s.into_iter().zip(u.tuple).zip(u.refs) {
            tuple[j - 1] = Some(t);
            refs[j - 1] = r;
        }
    }
    Unf { tuple: tuple.into_iter().map(|t| t.expect("parts cover all coordinates")).collect(), refs }
}

fn reverse_twist(a: &Twist) -> Twist {
    let k = a.k();
    Twist((1..=k).map(|q| a.apply(k + 1 - q).map(|v| k + 1 - v)).collect())
}

/// Coordinate `j` becomes `k + 1 - j` everywhere.
fn reverse<L: Ranked + Clone>(p: &Prep<L>) -> Prep<L> {
    let k = p.k;
    let sh = Shape::of(&p.t);
    let mut pos = 0;
    let t = p.t.map(|m| {
        while is_port(&p.t, pos) {
            pos += 1;
        }
        let here = pos;
        pos += 1;
        let off = m.offsets();
        let mut grouping = Vec::new();
        for j in (0..k).rev() {
            for e in off[j]..off[j + 1] {
                let (i, q) = m.grouping.get(e);
                let bare = is_port(&p.t, sh.kids[here][i - 1]);
                grouping.push((i, if bare { q } else { k + 1 - q }));
            }
        }
        let tuple = m.tuple.iter().rev().cloned().collect();
        Mat { k, tuple, grouping: Grouping::from_vec_unchecked(grouping), outer: m.outer }
    });
    Prep { k, t, refs: p.refs.clone() }
}

fn reverse_unf<L>(mut u: Unf<L>) -> Unf<L> {
    u.tuple.reverse();
    u.refs.reverse();
    u
}

/// With `k` outside the image of the shared twist, coordinate `k` of every
/// node only reaches bare ports. Each such piece is pulled into its parent
/// (together with its ports), leaving a (k-1)-term; the root's piece is
/// the last coordinate of the result.
fn pull_last<L: Ranked + Clone>(p: &Prep<L>) -> Result<(Prep<L>, Term<L>, Vec<Ref>)> {
    let k = p.k;
    let t = &p.t;
    let sh = Shape::of(t);
    // the last coordinate of each node, with the refs of its ports
    let last = |pos: usize| -> Result<(Term<L>, Vec<Ref>)> {
        let m = node(t, pos);
        let off = m.offsets();
        let mut refs = Vec::new();
        for e in off[k - 1]..off[k] {
            let c = sh.kids[pos][m.grouping.get(e).0 - 1];
            if !is_port(t, c) {
                bail!(Precondition, "coordinate {k} is reached through an internal edge");
            }
            refs.push(p.refs[sh.ports_before[c]]);
        }
        Ok((m.tuple[k - 1].clone(), refs))
    };
    let (t2, refs) = assemble(Item::Node(0), |pos| {
        let m = node(t, pos);
        let owners = m.owners();
        let mut items = Vec::new();
        let mut at = vec![0; m.outer + 1];
        let mut pulled: HashMap<usize, (Term<L>, usize)> = HashMap::new();
        for (i, &c) in sh.kids[pos].iter().enumerate() {
            let i = i + 1;
            if is_port(t, c) {
                let Some(e) = m.grouping.as_slice().iter().position(|e| e.0 == i) else { continue };
                if owners[e] == k {
                    continue;
                }
                items.push(Item::Port(p.refs[sh.ports_before[c]]));
                at[i] = items.len();
            } else {
                items.push(Item::Node(c));
                at[i] = items.len();
                if m.grouping.preimage(i, k).is_some() {
                    let (piece, prefs) = last(c)?;
                    let first = items.len() + 1;
                    items.extend(prefs.into_iter().map(Item::Port));
                    pulled.insert(i, (piece, first));
                }
            }
        }
        let off = m.offsets();
        let mut tuple = Vec::with_capacity(k - 1);
        let mut grouping = Vec::new();
        for j in 0..k - 1 {
            let mut args = Vec::new();
            for e in off[j]..off[j + 1] {
                let (i, q) = m.grouping.get(e);
                if is_port(t, sh.kids[pos][i - 1]) {
                    grouping.push((at[i], 1));
                    args.push(Term::port());
                } else if q < k {
                    grouping.push((at[i], q));
                    args.push(Term::port());
                } else {
                    let (piece, first) = &pulled[&i];
                    grouping.extend((0..piece.arity()).map(|r| (first + r, 1)));
                    args.push(piece.clone());
                }
            }
            tuple.push(m.tuple[j].substitute(&args)?);
        }
        Ok((Mat { k: k - 1, tuple, grouping: Grouping::from_vec_unchecked(grouping), outer: items.len() }, items))
    })?;
    let (root_piece, root_refs) = last(0)?;
    Ok((Prep { k: k - 1, t: t2, refs }, root_piece, root_refs))
}

/// All internal twists equal `a`, a monotone map.
fn alpha<L: Ranked + Clone>(p: &Prep<L>, a: &Twist) -> Result<Unf<L>> {
    let k = p.k;
    if k == 1 {
        return base(p);
    }
    if a.is_constant() {
        return constant_twist(p);
    }
    if !a.is_weakly_connected() {
        let mut uf = UnionFind::new(k);
        for (q, v) in a.0.iter().enumerate() {
            if let Some(v) = v {
                uf.union(q, v - 1);
            }
        }
        let root = uf.find(0);
        let (s, c): (Vec<usize>, Vec<usize>) = (1..=k).partition(|&j| uf.find(j - 1) == root);
        let us = alpha(&project(p, &s)?, &restrict(a, &s))?;
        let uc = alpha(&project(p, &c)?, &restrict(a, &c))?;
        return Ok(merge(k, vec![(s, us), (c, uc)]));
    }
    let image: Vec<usize> = a.0.iter().flatten().copied().collect();
    if !image.contains(&k) {
        let (rest, piece, refs) = pull_last(p)?;
        let mut u = alpha(&rest, &Twist(a.0[..k - 1].to_vec()))?;
        u.tuple.push(piece);
        u.refs.push(refs);
        return Ok(u);
    }
    if !image.contains(&1) {
        return Ok(reverse_unf(alpha(&reverse(p), &reverse_twist(a))?));
    }
    bail!(Precondition, "twist {a} is connected and reaches both 1 and {k}; is it monotone?")
}

/// Dispatch for terms that are homogeneous or better. The top region
/// sharing one kind of twist with the root is unfolded on its own; the
/// subterms hanging below it are unfolded recursively and substituted in.
fn homogeneous<L: Ranked + Clone>(p: &Prep<L>) -> Result<Unf<L>> {
    match classify_twists(&p.t) {
        TwistClass::AllConstant => return constant_twist(p),
        TwistClass::AllEqual(a) => return alpha(p, &a),
        _ => {}
    }
    let t = &p.t;
    let sh = Shape::of(t);
    let root = node(t, 0);
    let first = sh.kids[0].iter().position(|&c| !is_port(t, c)).map(|i| root.twist(i + 1));
    let mut inside = vec![false; t.len()];
    inside[0] = true;
    for pos in 0..t.len() {
        if !inside[pos] || is_port(t, pos) {
            continue;
        }
        let m = node(t, pos);
        for (i, &c) in sh.kids[pos].iter().enumerate() {
            if is_port(t, c) {
                continue;
            }
            let tw = m.twist(i + 1);
            inside[c] = match &first {
                Some(a) if a.is_constant() => tw.is_constant(),
                Some(a) => tw == *a,
                None => false,
            };
        }
    }
    let (top, refs) = assemble(Item::Node(0), |pos| {
        let m = node(t, pos);
        let mut items = Vec::new();
        let mut at: HashMap<(usize, usize), usize> = HashMap::new();
        for (i, &c) in sh.kids[pos].iter().enumerate() {
            let i = i + 1;
            if is_port(t, c) {
                items.push(Item::Port(p.refs[sh.ports_before[c]]));
                at.insert((i, 0), items.len());
            } else if inside[c] {
                items.push(Item::Node(c));
                at.insert((i, 0), items.len());
            } else {
                for q in 1..=p.k {
                    if m.grouping.preimage(i, q).is_some() {
                        items.push(Item::Port(Ref::Cut(c, q)));
                        at.insert((i, q), items.len());
                    }
                }
            }
        }
        let grouping = m
            .grouping
            .as_slice()
            .iter()
            .map(|&(i, q)| {
                let c = sh.kids[pos][i - 1];
                if is_port(t, c) {
                    (at[&(i, 0)], 1)
                } else if inside[c] {
                    (at[&(i, 0)], q)
                } else {
                    (at[&(i, q)], 1)
                }
            })
            .collect();
        Ok((Mat { k: p.k, tuple: m.tuple.clone(), grouping: Grouping::from_vec_unchecked(grouping), outer: items.len() }, items))
    })?;
    let top = Prep { k: p.k, t: top, refs };
    let unf_top = match classify_twists(&top.t) {
        TwistClass::AllConstant => constant_twist(&top)?,
        TwistClass::AllEqual(a) => alpha(&top, &a)?,
        c => bail!(Structural, "top region classified as {c:?}"),
    };
    let mut below: HashMap<usize, Unf<L>> = HashMap::new();
    for pos in 0..t.len() {
        if inside[pos] || is_port(t, pos) || !t.parents()[pos].is_some_and(|(pp, _)| inside[pp]) {
            continue;
        }
        let sub = t.subterm(pos, &sh.ends);
        let start = sh.ports_before[pos];
        let refs = p.refs[start..start + sub.arity()].to_vec();
        below.insert(pos, homogeneous(&Prep { k: p.k, t: sub, refs })?);
    }
    let mut tuple = Vec::with_capacity(p.k);
    let mut out_refs = Vec::with_capacity(p.k);
    for (coord, crefs) in unf_top.tuple.into_iter().zip(unf_top.refs) {
        let mut args = Vec::with_capacity(crefs.len());
        let mut r = Vec::new();
        for x in crefs {
            match x {
                Ref::Cut(c, q) => {
                    let u = &below[&c];
                    args.push(u.tuple[q - 1].clone());
                    r.extend(u.refs[q - 1].iter().copied());
                }
                other => {
                    args.push(Term::port());
                    r.push(other);
                }
            }
        }
        tuple.push(coord.substitute(&args)?);
        out_refs.push(r);
    }
    Ok(Unf { tuple, refs: out_refs })
}

fn run<L: Ranked + Clone>(
    k: usize,
    t: &Term<Mat<L>>,
    f: impl FnOnce(&Prep<L>) -> Result<Unf<L>>,
) -> Result<Mat<Term<L>>> {
    check_input(k, t)?;
    if t.is_port() {
        return Ok(Mat::fan(k));
    }
    let p = normalise(k, &t.map(Mat::lift_unit))?;
    to_mat(f(&p)?, t.arity())
}

/// Unfolding for terms whose internal twists are all constant.
pub fn unfold_constant_twist<L: Ranked + Clone>(k: usize, t: &Term<Mat<L>>) -> Result<Mat<Term<L>>> {
    if classify_twists(t) != TwistClass::AllConstant {
        bail!(Precondition, "some internal twist is not constant");
    }
    run(k, t, constant_twist)
}

/// Unfolding for terms whose internal twists all equal the monotone `a`.
pub fn unfold_alpha_homogeneous<L: Ranked + Clone>(k: usize, t: &Term<Mat<L>>, a: &Twist) -> Result<Mat<Term<L>>> {
    if a.k() != k || !a.is_monotone() {
        bail!(Precondition, "{a} is not a monotone map on 1..{k}");
    }
    if internal_twists(t).iter().any(|e| e.2 != *a) {
        bail!(Precondition, "some internal twist differs from {a}");
    }
    run(k, t, |p| alpha(p, a))
}

/// Unfolding for homogeneous terms with monotone twists.
pub fn unfold_homogeneous<L: Ranked + Clone>(k: usize, t: &Term<Mat<L>>) -> Result<Mat<Term<L>>> {
    match classify_twists(t) {
        TwistClass::Other => bail!(Precondition, "term is not homogeneous"),
        TwistClass::AllEqual(a) if !a.is_monotone() => bail!(Precondition, "shared twist {a} is not monotone"),
        _ => {}
    }
    if let Some(n) = first_non_monotone(t) {
        bail!(Precondition, "non-monotone label at node {n}");
    }
    run(k, t, homogeneous)
}

/// Unfolds one layer of a factorisation whose labels are already unfolded.
fn unfold_layer<L: Ranked + Clone>(k: usize, layer: &Term<Mat<Term<L>>>) -> Result<Mat<Term<L>>> {
    if layer.is_port() {
        return Ok(Mat::fan(k));
    }
    let sh = Shape::of(layer);
    let shallow = sh.kids[0].iter().all(|&c| sh.kids[c].iter().all(|&g| is_port(layer, g)));
    if shallow {
        let children = sh.kids[0].iter().map(|&c| layer.label(c).cloned()).collect();
        let m = partial_shallow_unfold(&PartialShallow { root: node(layer, 0).clone(), children })?;
        let tuple = m
            .tuple
            .iter()
            .map(|s| {
                let args: Vec<Term<L>> = s
                    .children
                    .iter()
                    .map(|c| match c {
                        Child::Unit => Term::port(),
                        Child::Elem(t) => t.clone(),
                    })
                    .collect();
                s.root.substitute(&args)
            })
            .collect::<Result<_>>()?;
        return Ok(Mat { k, tuple, grouping: m.grouping, outer: m.outer });
    }
    let p = normalise(k, layer)?;
    let u = match classify_twists(&p.t) {
        TwistClass::AllConstant => constant_twist(&p)?,
        TwistClass::AllEqual(a) => alpha(&p, &a)?,
        TwistClass::Homogeneous => homogeneous(&p)?,
        TwistClass::Other => bail!(Structural, "a factorisation layer is not homogeneous"),
    };
    to_mat(u, layer.arity())
}

/// Monoid, its elements as twists, the branch map and the trace being built.
type Context<'a> = (&'a FiniteMonoid, &'a [Twist], &'a dyn Fn(&(usize, usize), usize) -> usize, &'a mut DecompTrace);

/// What [`unfold_monotone_decomposed_traced`] observed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DecompTrace {
    pub depth: usize,
    pub layers: usize,
    pub consistent: bool,
}

/// The monotone unfolding assembled from the special cases: twists go to
/// the monoid of monotone partial maps, the term is factorised, and each
/// layer is unfolded bottom-up by the case its twists fall into.
pub fn unfold_monotone_decomposed<L: Ranked + Clone>(k: usize, t: &Term<Mat<L>>) -> Result<Mat<Term<L>>> {
    unfold_monotone_decomposed_traced(k, t).map(|r| r.0)
}

pub fn unfold_monotone_decomposed_traced<L: Ranked + Clone>(
    k: usize,
    t: &Term<Mat<L>>,
) -> Result<(Mat<Term<L>>, DecompTrace)> {
    check_input(k, t)?;
    if let Some(n) = first_non_monotone(t) {
        bail!(Undefined, "non-monotone label at node {n}");
    }
    if t.is_port() {
        return Ok((Mat::fan(k), DecompTrace { depth: 0, layers: 0, consistent: true }));
    }
    let (monoid, elems) = FiniteMonoid::monotone_partial_maps(k);
    let index: HashMap<&Twist, usize> = elems.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let labels: Vec<&Mat<L>> = t.labels().collect();
    let twists: Vec<Vec<usize>> = labels.iter().map(|m| m.twists().iter().map(|tw| index[tw]).collect()).collect();
    let mut n = 0;
    let ids = t.map(|m| {
        n += 1;
        (n - 1, m.outer)
    });
    let h = |l: &(usize, usize), i: usize| twists[l.0][i];
    let f = factorise(&ids, &monoid, h)?;
    let mut trace = DecompTrace { depth: f.nest.depth(), layers: 0, consistent: true };

    fn g<L: Ranked + Clone>(
        k: usize,
        nest: &NestedTerm<(usize, usize)>,
        labels: &[&Mat<L>],
        cx: &mut Context<'_>,
    ) -> Result<Mat<Term<L>>> {
        match nest {
            NestedTerm::Letter((n, _)) => Ok(labels[*n].lift_unit()),
            NestedTerm::Layer(layer) => {
                let inner = layer.try_map(|l| g(k, l, labels, cx))?;
                let out = unfold_layer(k, &inner)?;
                cx.3.layers += 1;
                let expected: Vec<Twist> = nested_branch_values(cx.0, nest, &cx.2).into_iter().map(|e| cx.1[e].clone()).collect();
                if out.twists() != expected {
                    cx.3.consistent = false;
                }
                Ok(out)
            }
        }
    }
    let mut cx: Context<'_> =
        (&monoid, &elems, &h, &mut trace);
    let out = g(k, &f.nest, &labels, &mut cx)?;
    if !trace.consistent {
        bail!(Structural, "twists of a decomposed unfolding disagree with the composed path twists");
    }
    Ok((out, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{self, TwistDomain};
    use crate::matrix::unfold_general;
    use crate::value::Sym;

    fn same(a: &Mat<Term<Sym>>, b: &Mat<Term<Sym>>) {
        assert_eq!(a, b, "\n{a}\n{b}");
    }

    #[test]
    fn classify_examples() {
        let mut r = gen::rng(1);
        let t = gen::mat_term(&mut r, 2, 6, &TwistDomain::Equal(Twist::identity(2)));
        if internal_twists(&t).is_empty() {
            assert_eq!(classify_twists(&t), TwistClass::AllConstant);
        } else {
            assert_eq!(classify_twists(&t), TwistClass::AllEqual(Twist::identity(2)));
        }
        let c1 = Twist::constant(2, 1);
        let swap = Twist(vec![Some(2), Some(1)]);
        assert_eq!(c1.compose(&swap), c1);
        let child = gen::mat_with_twists(&mut r, 2, std::slice::from_ref(&swap));
        let leaf = gen::mat_with_twists(&mut r, 2, &[]);
        let mid = Term::node(child, vec![Term::unit(leaf)]);
        let top = Term::node(gen::mat_with_twists(&mut r, 2, &[c1]), vec![mid]);
        assert_eq!(classify_twists(&top), TwistClass::Homogeneous);
    }

    #[test]
    fn partial_shallow_units() {
        let mut r = gen::rng(2);
        let root = gen::mat_with_twists(&mut r, 2, &[Twist(vec![Some(2), Some(1)]), Twist::identity(2)]);
        let all_unit: PartialShallow<Sym, Sym> = PartialShallow { root: root.clone(), children: vec![None, None] };
        let m = partial_shallow_unfold(&all_unit).unwrap();
        assert_eq!(m.grouping, root.grouping);
        for (s, a) in m.tuple.iter().zip(&root.tuple) {
            assert_eq!(&s.root, a);
            assert!(s.children.iter().all(|c| *c == Child::Unit));
        }
    }

    #[test]
    fn absorbing_pairs_of_monotone_maps() {
        let total = |t: &Twist| t.0.iter().all(Option::is_some);
        for k in 1..=4 {
            let all = Twist::all_monotone(k);
            for a in &all {
                let img: Vec<usize> = a.0.iter().flatten().copied().collect();
                if a.is_weakly_connected() && !a.is_constant() {
                    assert!(!img.contains(&1) || !img.contains(&k), "{a}");
                }
                for b in &all {
                    if a.compose(b) != *a {
                        continue;
                    }
                    if total(a) && total(b) && !a.is_weakly_connected() {
                        assert!(!b.is_weakly_connected(), "{a} {b}");
                    }
                    // only the upper twist is forced to be constant
                    if a.is_weakly_connected() && b.is_weakly_connected() {
                        assert!(a.is_constant(), "{a} {b}");
                    }
                }
            }
        }
        let a = Twist::constant(3, 1);
        let b = Twist(vec![Some(1), Some(1), Some(2)]);
        assert_eq!(a.compose(&b), a);
        assert_eq!(b.compose(&a), a);
        assert!(b.is_weakly_connected() && !b.is_constant());
    }

    #[test]
    fn specialised_cases_match_general() {
        let mut r = gen::rng(3);
        for round in 0..200 {
            let k = 1 + round % 3;
            let size = 1 + round % 25;
            let t = gen::mat_term(&mut r, k, size, &TwistDomain::Constant);
            same(&unfold_constant_twist(k, &t).unwrap(), &unfold_general(k, &t).unwrap());
            let mono = Twist::all_monotone(k);
            let a = mono[round % mono.len()].clone();
            let t = gen::mat_term(&mut r, k, size, &TwistDomain::Equal(a.clone()));
            same(&unfold_alpha_homogeneous(k, &t, &a).unwrap(), &unfold_general(k, &t).unwrap());
            let t = gen::mat_term(&mut r, k, size, &TwistDomain::Homogeneous);
            same(&unfold_homogeneous(k, &t).unwrap(), &unfold_general(k, &t).unwrap());
            let t = gen::mat_term(&mut r, k, size, &TwistDomain::Monotone);
            let (m, tr) = unfold_monotone_decomposed_traced(k, &t).unwrap();
            same(&m, &unfold_general(k, &t).unwrap());
            assert!(tr.consistent);
        }
    }

    #[test]
    fn non_monotone_is_undefined() {
        let mut r = gen::rng(4);
        let swap = Twist(vec![Some(2), Some(1)]);
        let t = Term::node(gen::mat_with_twists(&mut r, 2, &[swap]), vec![Term::port()]);
        let e = unfold_monotone_decomposed(2, &t).unwrap_err();
        assert!(e.is_undefined());
        assert!(e.to_string().contains("node 0"));
    }

    #[test]
    fn bare_port_is_fan() {
        let t: Term<Mat<Sym>> = Term::port();
        assert_eq!(unfold_monotone_decomposed(3, &t).unwrap(), Mat::fan(3));
    }
}
