//! Matrix powers, twists and unfolding.
//!
//! An element of the k-th matrix power is a k-tuple of elements whose
//! ports, read left to right across the tuple, are grouped into
//! `(outer port, slot)` pairs. A term over such elements unfolds into a
//! k-tuple of terms: slot `q` of outer port `i` of a node is replaced by
//! coordinate `q` of whatever hangs below port `i`.

use std::fmt;

use crate::error::{bail, Error, Result};
use crate::sexp::{Sexp, ToSexp};
use crate::term::{Ranked, Slot, Term};
use crate::value::{Fold, Grouping};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat<L> {
    pub k: usize,
    pub tuple: Vec<L>,
    pub grouping: Grouping,
    pub outer: usize,
}

impl<L> Ranked for Mat<L> {
    fn arity(&self) -> usize {
        self.outer
    }
}

/// A partial map on `{1..k}`; `Twist(v)` sends `q` to `v[q - 1]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Twist(pub Vec<Option<usize>>);

impl Twist {
    pub fn identity(k: usize) -> Twist {
        Twist((1..=k).map(Some).collect())
    }

    pub fn constant(k: usize, c: usize) -> Twist {
        Twist(vec![Some(c); k])
    }

    pub fn empty(k: usize) -> Twist {
        Twist(vec![None; k])
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    pub fn apply(&self, q: usize) -> Option<usize> {
        self.0[q - 1]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Twist) -> Twist {
        Twist(other.0.iter().map(|x| x.and_then(|y| self.apply(y))).collect())
    }

    pub fn is_monotone(&self) -> bool {
        let defined: Vec<usize> = self.0.iter().flatten().copied().collect();
        defined.windows(2).all(|w| w[0] <= w[1])
    }

    /// All defined values coincide (the nowhere-defined map included).
    pub fn is_constant(&self) -> bool {
        let mut vals = self.0.iter().flatten();
        match vals.next() {
            None => true,
            Some(first) => vals.all(|v| v == first),
        }
    }

    /// The graph `q -> self(q)` on `{1..k}`, orientation ignored, is
    /// connected.
    pub fn is_weakly_connected(&self) -> bool {
        let k = self.k();
        let mut uf = UnionFind::new(k);
        for (q, v) in self.0.iter().enumerate() {
            if let Some(v) = v {
                uf.union(q, v - 1);
            }
        }
        (1..k).all(|q| uf.find(q) == uf.find(0))
    }

    /// Every monotone partial map on `{1..k}`.
    pub fn all_monotone(k: usize) -> Vec<Twist> {
        let mut out = vec![Vec::new()];
        for _ in 0..k {
            let mut next = Vec::new();
            for prefix in &out {
                let floor = prefix.iter().flatten().copied().max().unwrap_or(1);
                let mut with_none = prefix.clone();
                with_none.push(None);
                next.push(with_none);
                for v in floor..=k {
                    let mut p = prefix.clone();
                    p.push(Some(v));
                    next.push(p);
                }
            }
            out = next;
        }
        out.into_iter().map(Twist).collect()
    }
}

impl fmt::Display for Twist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            match v {
                Some(v) => write!(f, "{v}")?,
                None => f.write_str("-")?,
            }
        }
        f.write_str("]")
    }
}

pub(crate) struct UnionFind(Vec<usize>);

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

impl<L> Mat<L> {
    pub fn map<M>(self, f: impl FnMut(L) -> M) -> Mat<M> {
        Mat { k: self.k, tuple: self.tuple.into_iter().map(f).collect(), grouping: self.grouping, outer: self.outer }
    }
}

impl<L: Ranked> Mat<L> {
    pub fn new(tuple: Vec<L>, grouping: Grouping, outer: usize) -> Result<Self> {
        let m = Mat { k: tuple.len(), tuple, grouping, outer };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 || self.tuple.len() != self.k {
            bail!(Structural, "matrix element with k = {} holds {} coordinates", self.k, self.tuple.len());
        }
        let ports: usize = self.tuple.iter().map(Ranked::arity).sum();
        if ports != self.grouping.len() {
            bail!(Structural, "grouping has {} entries for {} tuple ports", self.grouping.len(), ports);
        }
        self.grouping.check(self.k, self.outer)
    }

    /// Start of each coordinate's ports in the concatenation, plus the total.
    pub fn offsets(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.k + 1);
        let mut acc = 0;
        out.push(0);
        for a in &self.tuple {
            acc += a.arity();
            out.push(acc);
        }
        out
    }

    /// Coordinate (1-based) owning each concatenated port.
    pub fn owners(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (j, a) in self.tuple.iter().enumerate() {
            out.extend(std::iter::repeat_n(j + 1, a.arity()));
        }
        out
    }

    /// Twist of outer port `i` (1-based).
    pub fn twist(&self, i: usize) -> Twist {
        let owners = self.owners();
        let mut tw = vec![None; self.k];
        for (p, &(o, s)) in self.grouping.as_slice().iter().enumerate() {
            if o == i {
                tw[s - 1] = Some(owners[p]);
            }
        }
        Twist(tw)
    }

    pub fn twists(&self) -> Vec<Twist> {
        (1..=self.outer).map(|i| self.twist(i)).collect()
    }

    pub fn is_monotone(&self) -> bool {
        self.twists().iter().all(Twist::is_monotone)
    }
}

impl<L: Ranked> Mat<Term<L>> {
    /// The unfolding of a bare port: k ports, port `j` grouped to `(1, j)`.
    pub fn fan(k: usize) -> Self {
        Mat {
            k,
            tuple: (0..k).map(|_| Term::port()).collect(),
            grouping: Grouping::from_vec_unchecked((1..=k).map(|j| (1, j)).collect()),
            outer: 1,
        }
    }
}

impl<L: Ranked + Clone> Mat<L> {
    /// Wraps every coordinate as a one-node term.
    pub fn lift_unit(&self) -> Mat<Term<L>> {
        self.clone().map(Term::unit)
    }
}

impl<L: Ranked + ToSexp> ToSexp for Mat<L> {
    fn to_sexp(&self) -> Sexp {
        let mut tuple = vec![Sexp::atom("tuple")];
        tuple.extend(self.tuple.iter().map(ToSexp::to_sexp));
        Sexp::list(vec![
            Sexp::atom("mat"),
            Sexp::atom(self.k.to_string()),
            Sexp::atom(self.outer.to_string()),
            Sexp::list(tuple),
            self.grouping.to_sexp(),
        ])
    }
}

impl<L: Ranked + ToSexp> fmt::Display for Mat<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sexp())
    }
}

impl<L: Ranked> Mat<L> {
    /// Reads `(mat k outer (tuple v ...) ((p g s) ...))`.
    pub fn from_sexp(s: &Sexp, mut member: impl FnMut(&Sexp) -> Result<L>) -> Result<Self> {
        let [k, outer, tuple, g] = s.expect_tagged("mat")? else {
            return Err(s.error("expected (mat k outer (tuple ...) grouping)"));
        };
        let k = k.expect_usize("k")?;
        let outer = outer.expect_usize("an outer arity")?;
        let members = tuple.expect_tagged("tuple")?;
        if members.len() != k || k == 0 {
            return Err(tuple.error(format!("expected {k} coordinates, found {}", members.len())));
        }
        let tuple: Vec<L> = members.iter().map(&mut member).collect::<Result<_>>()?;
        let ports = tuple.iter().map(Ranked::arity).sum();
        let grouping = Grouping::from_sexp(g, ports, k, outer)?;
        Ok(Mat { k, tuple, grouping, outer })
    }
}

fn check_k<L: Ranked>(k: usize, t: &Term<Mat<L>>) -> Result<()> {
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

/// Unfolds a term over the k-th matrix power of terms, flattening the
/// result. Pieces are expanded top-down, so the work is linear in the
/// output and nothing recurses on depth. Coordinates that no slot of the
/// root interface reaches are never visited and so disappear.
pub fn unfold_terms<L: Ranked + Clone>(k: usize, t: &Term<Mat<Term<L>>>) -> Result<Mat<Term<L>>> {
    check_k(k, t)?;
    if t.is_port() {
        return Ok(Mat::fan(k));
    }
    let n = t.len();
    let parents = t.parents();
    let mut kids: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (pos, p) in parents.iter().enumerate() {
        if let Some((p, _)) = p {
            kids[*p].push(pos);
        }
    }
    let ports_before = t.ports_before();
    let offsets: Vec<Vec<usize>> = t
        .slots()
        .iter()
        .map(|s| match s {
            Slot::Node(m) => m.offsets(),
            Slot::Port => Vec::new(),
        })
        .collect();

    let mut tuple = Vec::with_capacity(k);
    let mut grouping = Vec::new();
    for j in 1..=k {
        let mut out: Vec<Slot<L>> = Vec::new();
        // (node position, coordinate, cursor in that coordinate, ports seen)
        let mut frames: Vec<(usize, usize, usize, usize)> = vec![(0, j, 0, 0)];
        while let Some(top) = frames.last_mut() {
            let (pos, c, cur, seen) = *top;
            let Some(Slot::Node(m)) = t.slots().get(pos) else { unreachable!() };
            let member = &m.tuple[c - 1];
            if cur == member.len() {
                frames.pop();
                continue;
            }
            top.2 += 1;
            match &member.slots()[cur] {
                Slot::Node(l) => out.push(Slot::Node(l.clone())),
                Slot::Port => {
                    top.3 += 1;
                    let (i, q) = m.grouping.get(offsets[pos][c - 1] + seen);
                    let child = kids[pos][i - 1];
                    match &t.slots()[child] {
                        Slot::Port => {
                            out.push(Slot::Port);
                            grouping.push((ports_before[child] + 1, q));
                        }
                        Slot::Node(_) => frames.push((child, q, 0, 0)),
                    }
                }
            }
        }
        tuple.push(Term::from_slots(out)?);
    }
    let result = Mat { k, tuple, grouping: Grouping::from_vec_unchecked(grouping), outer: t.arity() };
    debug_assert!(result.validate().is_ok());
    Ok(result)
}

/// Term unfolding `T M_k(S) -> M_k(T S)`.
pub fn unfold_general<L: Ranked + Clone>(k: usize, t: &Term<Mat<L>>) -> Result<Mat<Term<L>>> {
    unfold_terms(k, &t.map(Mat::lift_unit))
}

/// Undefined as soon as one label has a non-monotone twist.
pub fn unfold_monotone<L: Ranked + Clone>(k: usize, t: &Term<Mat<L>>) -> Result<Mat<Term<L>>> {
    if let Some(n) = first_non_monotone(t) {
        bail!(Undefined, "non-monotone label at node {n}");
    }
    unfold_general(k, t)
}

/// Pre-order index (among nodes) of the first label with a non-monotone twist.
pub fn first_non_monotone<L: Ranked>(t: &Term<Mat<L>>) -> Option<usize> {
    t.labels().position(|m| !m.is_monotone())
}

/// A shallow term: a root with one child per root port.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Shallow<A, B> {
    pub root: A,
    pub children: Vec<B>,
}

impl<A, B: Ranked> Ranked for Shallow<A, B> {
    fn arity(&self) -> usize {
        self.children.iter().map(Ranked::arity).sum()
    }
}

impl<L: Ranked + Clone> Shallow<Term<L>, Term<L>> {
    pub fn flatten(&self) -> Result<Term<L>> {
        self.root.substitute(&self.children)
    }
}

/// A tuple read as one element whose ports are the concatenated ports.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tuple<A>(pub Vec<A>);

impl<A: Ranked> Ranked for Tuple<A> {
    fn arity(&self) -> usize {
        self.0.iter().map(Ranked::arity).sum()
    }
}

/// The root fold pushed outside the shallow term: the root becomes the bare
/// tuple, and each tuple port records which child and which slot feed it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distributed<A, B> {
    pub k: usize,
    pub root: Tuple<A>,
    pub picks: Vec<(usize, usize)>,
    pub children: Vec<Mat<B>>,
}

/// First step of shallow unfolding: distribute over the root fold.
pub fn f1<A: Ranked + Clone, B: Ranked + Clone>(s: &Shallow<Mat<A>, Mat<B>>) -> Result<Distributed<A, B>> {
    let e = &s.root;
    if s.children.len() != e.outer {
        bail!(Arity, "root has {} ports but {} children", e.outer, s.children.len());
    }
    if let Some(m) = s.children.iter().find(|m| m.k != e.k) {
        bail!(Type, "{}-element below a {}-element", m.k, e.k);
    }
    Ok(Distributed {
        k: e.k,
        root: Tuple(e.tuple.clone()),
        picks: e.grouping.as_slice().to_vec(),
        children: s.children.clone(),
    })
}

/// Second step: match slot `q` of child `i` with coordinate `q` of that
/// child, then flatten the two folds into one over the children's ports.
pub fn f2<A: Ranked + Clone, B: Ranked + Clone>(d: Distributed<A, B>) -> Fold<Shallow<Tuple<A>, B>> {
    let mut child_outer_offset = Vec::with_capacity(d.children.len());
    let mut acc = 0;
    for m in &d.children {
        child_outer_offset.push(acc);
        acc += m.outer;
    }
    let child_offsets: Vec<Vec<usize>> = d.children.iter().map(Mat::offsets).collect();
    let mut picked = Vec::with_capacity(d.picks.len());
    let mut grouping = Vec::new();
    for &(i, q) in &d.picks {
        let m = &d.children[i - 1];
        picked.push(m.tuple[q - 1].clone());
        for p in child_offsets[i - 1][q - 1]..child_offsets[i - 1][q] {
            let (o, s) = m.grouping.get(p);
            grouping.push((child_outer_offset[i - 1] + o, s));
        }
    }
    Fold {
        payload: Shallow { root: d.root, children: picked },
        grouping: Grouping::from_vec_unchecked(grouping),
        k: d.k,
        outer: acc,
    }
}

/// Third step: split the tuple root into k shallow terms. Ports keep their
/// order because tuple ports are listed coordinate by coordinate.
pub fn f3<A: Ranked, B: Ranked>(f: Fold<Shallow<Tuple<A>, B>>) -> Mat<Shallow<A, B>> {
    let Shallow { root: Tuple(members), children } = f.payload;
    let mut children = children.into_iter();
    let tuple = members
        .into_iter()
        .map(|a| {
            let n = a.arity();
            Shallow { root: a, children: children.by_ref().take(n).collect() }
        })
        .collect();
    Mat { k: f.k, tuple, grouping: f.grouping, outer: f.outer }
}

/// `M_k(S) ⊙ M_k(G) -> M_k(S ⊙ G)`.
pub fn shallow_unfold<A: Ranked + Clone, B: Ranked + Clone>(
    s: &Shallow<Mat<A>, Mat<B>>,
) -> Result<Mat<Shallow<A, B>>> {
    Ok(f3(f2(f1(s)?)))
}

/// Unfolding by its inductive definition: shallow unfolding of the root
/// over the unfolded children. Quadratic on deep terms; meant as an oracle.
pub fn unfold_inductive<L: Ranked + Clone>(k: usize, t: &Term<Mat<Term<L>>>) -> Result<Mat<Term<L>>> {
    check_k(k, t)?;
    let ends = t.ends();
    let mut done: Vec<Option<Mat<Term<L>>>> = vec![None; t.len()];
    for pos in (0..t.len()).rev() {
        let r = match &t.slots()[pos] {
            Slot::Port => Mat::fan(k),
            Slot::Node(e) => {
                let children = t.children_of(pos, &ends).into_iter().map(|c| done[c].take().unwrap()).collect();
                let m = shallow_unfold(&Shallow { root: e.clone(), children })?;
                let tuple = m.tuple.iter().map(Shallow::flatten).collect::<Result<_>>()?;
                Mat { k, tuple, grouping: m.grouping, outer: m.outer }
            }
        };
        done[pos] = Some(r);
    }
    Ok(done[0].take().unwrap())
}

/// Composition of twists from the root down to each port of `t`, in port
/// order. `None` when some node on the way has no child there at all.
pub fn path_twists<L: Ranked>(k: usize, t: &Term<Mat<L>>) -> Vec<Twist> {
    let parents = t.parents();
    let mut acc: Vec<Option<Twist>> = vec![None; t.len()];
    let mut out = Vec::new();
    for pos in 0..t.len() {
        let here = match parents[pos] {
            None => Twist::identity(k),
            Some((p, i)) => {
                let Some(Slot::Node(m)) = t.slots().get(p) else { unreachable!() };
                acc[p].as_ref().unwrap().compose(&m.twist(i + 1))
            }
        };
        if matches!(t.slots()[pos], Slot::Port) {
            out.push(here.clone());
        }
        acc[pos] = Some(here);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::Sym;

    fn sym(n: &str, a: usize) -> Term<Sym> {
        Term::unit(Sym::new(n, a))
    }

    /// `[a(_), a(_)]` with the two ports crossing.
    fn swap() -> Mat<Term<Sym>> {
        Mat::new(vec![sym("a", 1), sym("a", 1)], Grouping::new(vec![(1, 2), (1, 1)], 2, 1).unwrap(), 1).unwrap()
    }

    fn leaf() -> Mat<Term<Sym>> {
        Mat::new(vec![sym("black", 0), sym("white", 0)], Grouping::default(), 0).unwrap()
    }

    #[test]
    fn twists() {
        let id = Mat::new(vec![sym("a", 1)], Grouping::identity(1), 1).unwrap();
        assert_eq!(id.twist(1), Twist::identity(1));
        assert_eq!(swap().twist(1), Twist(vec![Some(2), Some(1)]));
        assert!(!swap().is_monotone());
        let partial = Mat::new(vec![sym("a", 1), sym("c", 0)], Grouping::new(vec![(1, 1)], 2, 1).unwrap(), 1).unwrap();
        assert_eq!(partial.twist(1), Twist(vec![Some(1), None]));
        let constant =
            Mat::new(vec![sym("a", 2), sym("c", 0)], Grouping::new(vec![(1, 1), (1, 2)], 2, 1).unwrap(), 1).unwrap();
        assert!(constant.twist(1).is_constant() && constant.is_monotone());
    }

    #[test]
    fn parity_of_swap_chains() {
        for n in 0..=8 {
            let mut t = Term::unit(leaf());
            for _ in 0..n {
                t = Term::node(swap(), vec![t]);
            }
            let u = unfold_terms(2, &t).unwrap();
            let first_leaf = u.tuple[0].labels().last().unwrap().name.clone();
            assert_eq!(first_leaf == "white", n % 2 == 1, "n = {n}");
            assert_eq!(unfold_inductive(2, &t).unwrap(), u);
            let m = unfold_monotone(2, &t.map(|m| m.clone()));
            assert_eq!(m.is_err(), n > 0);
        }
        // with the colours the other way round, white comes first on even chains
        let flipped = Mat::new(vec![sym("white", 0), sym("black", 0)], Grouping::default(), 0).unwrap();
        for n in 0..=8 {
            let mut t = Term::unit(flipped.clone());
            for _ in 0..n {
                t = Term::node(swap(), vec![t]);
            }
            let u = unfold_terms(2, &t).unwrap();
            assert_eq!(u.tuple[0].labels().last().unwrap().name == "white", n % 2 == 0, "n = {n}");
        }
    }

    #[test]
    fn port_and_unit_cases() {
        let p: Term<Mat<Term<Sym>>> = Term::port();
        assert_eq!(unfold_terms(2, &p).unwrap(), Mat::fan(2));
        let u = unfold_terms(2, &Term::unit(swap())).unwrap();
        assert_eq!(u, swap());
    }

    #[test]
    fn shallow_swap_exchanges_child_coordinates() {
        let child = Mat::new(vec![sym("b", 0), sym("c", 0)], Grouping::default(), 0).unwrap();
        let s = Shallow { root: swap(), children: vec![child] };
        let m = shallow_unfold(&s).unwrap();
        assert_eq!(m.tuple[0].children, vec![sym("c", 0)]);
        assert_eq!(m.tuple[1].children, vec![sym("b", 0)]);
    }

    #[test]
    fn monotone_maps_enumerated() {
        // monotone partial maps on {1..k}: sum over domain sizes d of C(k,d) * C(k+d-1,d)
        assert_eq!(Twist::all_monotone(1).len(), 2);
        assert_eq!(Twist::all_monotone(2).len(), 1 + 2 * 2 + 3);
        assert!(Twist::all_monotone(3).iter().all(Twist::is_monotone));
    }
}
