//! Terms over ranked labels: trees with dangling edges called ports.
//!
//! A term is stored as its pre-order list of slots. A slot is either a port
//! or a node carrying a label whose arity says how many of the following
//! subtrees are its children. Ports are numbered by position, left to right,
//! so they need no index field. All traversals here are loops over that
//! list; nothing recurses on the depth of the tree.

use std::fmt;

use crate::error::{bail, Result};
use crate::sexp::{Node, Sexp, ToSexp};

/// Anything with an arity: alphabet symbols, terms, matrix elements, ...
pub trait Ranked {
    fn arity(&self) -> usize;
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot<L> {
    Port,
    Node(L),
}

impl<L: Ranked> Slot<L> {
    fn arity(&self) -> usize {
        match self {
            Slot::Port => 0,
            Slot::Node(l) => l.arity(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term<L> {
    slots: Vec<Slot<L>>,
}

impl<L> Ranked for Term<L> {
    fn arity(&self) -> usize {
        self.slots.iter().filter(|s| matches!(s, Slot::Port)).count()
    }
}

impl<L> Term<L> {
    /// The term consisting of a single port.
    pub fn port() -> Self {
        Term { slots: vec![Slot::Port] }
    }

    pub fn slots(&self) -> &[Slot<L>] {
        &self.slots
    }

    pub fn into_slots(self) -> Vec<Slot<L>> {
        self.slots
    }

    /// Number of slots (nodes plus ports).
    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of non-port nodes.
    pub fn size(&self) -> usize {
        self.slots.iter().filter(|s| matches!(s, Slot::Node(_))).count()
    }

    pub fn is_port(&self) -> bool {
        matches!(self.slots[0], Slot::Port)
    }

    pub fn root(&self) -> Option<&L> {
        match &self.slots[0] {
            Slot::Node(l) => Some(l),
            Slot::Port => None,
        }
    }

    pub fn label(&self, pos: usize) -> Option<&L> {
        match &self.slots[pos] {
            Slot::Node(l) => Some(l),
            Slot::Port => None,
        }
    }

    /// Labels in pre-order.
    pub fn labels(&self) -> impl Iterator<Item = &L> + '_ {
        self.slots.iter().filter_map(|s| match s {
            Slot::Node(l) => Some(l),
            Slot::Port => None,
        })
    }

    /// Slot positions of the ports, in port order.
    pub fn port_positions(&self) -> Vec<usize> {
        (0..self.slots.len()).filter(|&i| matches!(self.slots[i], Slot::Port)).collect()
    }

    /// Positions of the non-port nodes, in pre-order.
    pub fn node_positions(&self) -> Vec<usize> {
        (0..self.slots.len()).filter(|&i| matches!(self.slots[i], Slot::Node(_))).collect()
    }

    /// Applies `f` to every label. The caller promises that `f` preserves
    /// arity; use [`Term::try_map`] when that is not known statically.
    pub fn map<M>(&self, mut f: impl FnMut(&L) -> M) -> Term<M> {
        Term {
            slots: self
                .slots
                .iter()
                .map(|s| match s {
                    Slot::Port => Slot::Port,
                    Slot::Node(l) => Slot::Node(f(l)),
                })
                .collect(),
        }
    }

    pub fn into_map<M>(self, mut f: impl FnMut(L) -> M) -> Term<M> {
        Term {
            slots: self
                .slots
                .into_iter()
                .map(|s| match s {
                    Slot::Port => Slot::Port,
                    Slot::Node(l) => Slot::Node(f(l)),
                })
                .collect(),
        }
    }
}

impl<L: Ranked> Term<L> {
    /// The unit of the term monad: one node with all its children ports.
    pub fn unit(l: L) -> Self {
        let n = l.arity();
        let mut slots = Vec::with_capacity(n + 1);
        slots.push(Slot::Node(l));
        slots.extend((0..n).map(|_| Slot::Port));
        Term { slots }
    }

    /// Builds `l(children...)`.
    ///
    /// # Panics
    ///
    /// Panics if the number of children differs from the arity of `l`.
    pub fn node(l: L, children: Vec<Term<L>>) -> Self {
        match Self::try_node(l, children) {
            Ok(t) => t,
            Err(e) => panic!("{e}"),
        }
    }

    pub fn try_node(l: L, children: Vec<Term<L>>) -> Result<Self> {
        if l.arity() != children.len() {
            bail!(Arity, "label of arity {} given {} children", l.arity(), children.len());
        }
        let mut slots = Vec::with_capacity(1 + children.iter().map(Term::len).sum::<usize>());
        slots.push(Slot::Node(l));
        for c in children {
            slots.extend(c.slots);
        }
        Ok(Term { slots })
    }

    /// Checks that `slots` is the pre-order encoding of exactly one tree.
    pub fn from_slots(slots: Vec<Slot<L>>) -> Result<Self> {
        let mut need = 1usize;
        for (i, s) in slots.iter().enumerate() {
            if need == 0 {
                bail!(Structural, "extra slots after position {i}");
            }
            need = need - 1 + s.arity();
        }
        if need != 0 {
            bail!(Structural, "term ends with {need} missing subtrees");
        }
        Ok(Term { slots })
    }

    /// For each position, one past the last slot of the subtree rooted there.
    pub fn ends(&self) -> Vec<usize> {
        let n = self.slots.len();
        let mut ends = vec![0; n];
        let mut stack: Vec<(usize, usize)> = Vec::new();
        for i in 0..n {
            let a = self.slots[i].arity();
            if a > 0 {
                stack.push((i, a));
                continue;
            }
            ends[i] = i + 1;
            while let Some((p, rem)) = stack.last_mut() {
                *rem -= 1;
                if *rem > 0 {
                    break;
                }
                ends[*p] = i + 1;
                stack.pop();
            }
        }
        ends
    }

    /// Child positions of the node at `pos`.
    pub fn children_of(&self, pos: usize, ends: &[usize]) -> Vec<usize> {
        let a = self.slots[pos].arity();
        let mut out = Vec::with_capacity(a);
        let mut c = pos + 1;
        for _ in 0..a {
            out.push(c);
            c = ends[c];
        }
        out
    }

    /// For each position, its parent position and its index (0-based) among
    /// the parent's children.
    pub fn parents(&self) -> Vec<Option<(usize, usize)>> {
        let n = self.slots.len();
        let mut out = vec![None; n];
        // (position, arity, next child index)
        let mut stack: Vec<(usize, usize, usize)> = Vec::new();
        for i in 0..n {
            if let Some((p, _, next)) = stack.last_mut() {
                out[i] = Some((*p, *next));
                *next += 1;
            }
            let a = self.slots[i].arity();
            if a > 0 {
                stack.push((i, a, 0));
            } else {
                while let Some(&(_, a, next)) = stack.last() {
                    if next < a {
                        break;
                    }
                    stack.pop();
                }
            }
        }
        out
    }

    /// Port count strictly before each position.
    pub fn ports_before(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.slots.len());
        let mut c = 0;
        for s in &self.slots {
            out.push(c);
            if matches!(s, Slot::Port) {
                c += 1;
            }
        }
        out
    }

    /// Number of nodes on the longest root-to-leaf path.
    pub fn height(&self) -> usize {
        let parents = self.parents();
        let mut depth = vec![0usize; self.slots.len()];
        let mut best = 0;
        for i in 0..self.slots.len() {
            let d = parents[i].map_or(0, |(p, _)| depth[p]) + usize::from(matches!(self.slots[i], Slot::Node(_)));
            depth[i] = d;
            best = best.max(d);
        }
        best
    }

    /// Bottom-up evaluation. `f` sees the slot position, the slot and the
    /// results for its children in order.
    pub fn fold_up<T>(&self, mut f: impl FnMut(usize, &Slot<L>, Vec<T>) -> Result<T>) -> Result<T> {
        let mut stack: Vec<T> = Vec::new();
        for pos in (0..self.slots.len()).rev() {
            let s = &self.slots[pos];
            let kids: Vec<T> = (0..s.arity()).map(|_| stack.pop().expect("well-formed term")).collect();
            stack.push(f(pos, s, kids)?);
        }
        Ok(stack.pop().expect("nonempty term"))
    }

    pub fn try_map<M: Ranked>(&self, mut f: impl FnMut(&L) -> Result<M>) -> Result<Term<M>> {
        let mut slots = Vec::with_capacity(self.slots.len());
        for s in &self.slots {
            slots.push(match s {
                Slot::Port => Slot::Port,
                Slot::Node(l) => {
                    let m = f(l)?;
                    if m.arity() != l.arity() {
                        bail!(Arity, "relabelling changed arity {} to {}", l.arity(), m.arity());
                    }
                    Slot::Node(m)
                }
            });
        }
        Ok(Term { slots })
    }
}

impl<L: Ranked + Clone> Term<L> {
    /// The subterm rooted at `pos`.
    pub fn subterm(&self, pos: usize, ends: &[usize]) -> Term<L> {
        Term { slots: self.slots[pos..ends[pos]].to_vec() }
    }

    /// Replaces port `i` by `args[i]`.
    pub fn substitute(&self, args: &[Term<L>]) -> Result<Term<L>> {
        if args.len() != self.arity() {
            bail!(Arity, "term with {} ports given {} arguments", self.arity(), args.len());
        }
        let mut slots = Vec::with_capacity(self.slots.len() + args.iter().map(Term::len).sum::<usize>());
        let mut next = args.iter();
        for s in &self.slots {
            match s {
                Slot::Port => slots.extend(next.next().unwrap().slots.iter().cloned()),
                Slot::Node(l) => slots.push(Slot::Node(l.clone())),
            }
        }
        Ok(Term { slots })
    }

    /// Monad product: plug every node's children into the ports of its
    /// label. Ports of the result are the outer ports in document order.
    pub fn flatten(tt: &Term<Term<L>>) -> Term<L> {
        let mut out = Vec::with_capacity(tt.slots.iter().map(|s| match s {
            Slot::Port => 1,
            Slot::Node(t) => t.len(),
        }).sum());
        let mut frames: Vec<(&Term<L>, usize)> = Vec::new();
        let outer = tt.slots.iter();
        for s in outer {
            match s {
                Slot::Port => out.push(Slot::Port),
                Slot::Node(t) => frames.push((t, 0)),
            }
            // emit label slots until the next label port asks for a child
            while let Some((t, cur)) = frames.last_mut() {
                if *cur == t.slots.len() {
                    frames.pop();
                    continue;
                }
                let slot = &t.slots[*cur];
                *cur += 1;
                match slot {
                    Slot::Node(l) => out.push(Slot::Node(l.clone())),
                    Slot::Port => break,
                }
            }
        }
        debug_assert!(frames.is_empty());
        Term { slots: out }
    }

    /// Every label wrapped as its own unit term.
    pub fn lift_unit(&self) -> Term<Term<L>> {
        self.map(|l| Term::unit(l.clone()))
    }
}

impl<L: Ranked> Term<L> {
    /// Converts to an s-expression: ports are `_`, leaves print as their
    /// label, other nodes as `(label child ...)`.
    pub fn to_sexp_with(&self, mut label: impl FnMut(&L) -> Sexp) -> Sexp {
        let mut stack: Vec<Sexp> = Vec::new();
        for s in self.slots.iter().rev() {
            match s {
                Slot::Port => stack.push(Sexp::atom("_")),
                Slot::Node(l) => {
                    let a = l.arity();
                    let head = label(l);
                    if a == 0 && head.as_atom().is_some() {
                        stack.push(head);
                    } else {
                        let mut items = Vec::with_capacity(a + 1);
                        items.push(head);
                        for _ in 0..a {
                            items.push(stack.pop().expect("well-formed term"));
                        }
                        stack.push(Sexp::list(items));
                    }
                }
            }
        }
        stack.pop().expect("nonempty term")
    }

    /// Reads the syntax produced by [`Term::to_sexp_with`]. `label` decodes a
    /// node label and is told how many children the node has.
    pub fn from_sexp(s: &Sexp, mut label: impl FnMut(&Sexp, usize) -> Result<L>) -> Result<Self> {
        let mut slots = Vec::new();
        let mut todo: Vec<&Sexp> = vec![s];
        while let Some(s) = todo.pop() {
            match &s.node {
                Node::Atom(a) if a == "_" => slots.push(Slot::Port),
                Node::Atom(_) => {
                    let l = label(s, 0)?;
                    if l.arity() != 0 {
                        return Err(s.error(format!("label of arity {} used as a leaf", l.arity())));
                    }
                    slots.push(Slot::Node(l));
                }
                Node::List(items) => {
                    let Some((head, kids)) = items.split_first() else {
                        return Err(s.error("empty list is not a term"));
                    };
                    let l = label(head, kids.len())?;
                    if l.arity() != kids.len() {
                        return Err(s.error(format!(
                            "label of arity {} given {} children",
                            l.arity(),
                            kids.len()
                        )));
                    }
                    slots.push(Slot::Node(l));
                    todo.extend(kids.iter().rev());
                }
            }
        }
        Ok(Term { slots })
    }
}

impl<L: Ranked + ToSexp> ToSexp for Term<L> {
    fn to_sexp(&self) -> Sexp {
        self.to_sexp_with(L::to_sexp)
    }
}

impl<L: Ranked + ToSexp> fmt::Display for Term<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sexp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::Sym;

    fn t(s: &str) -> Term<Sym> {
        Sym::parse_term(s, &[("a", 2), ("b", 1), ("c", 0)]).unwrap()
    }

    #[test]
    fn arity_counts_ports() {
        assert_eq!(t("(a _ (b _))").arity(), 2);
        assert_eq!(t("c").arity(), 0);
    }

    #[test]
    fn flatten_substitutes_children() {
        let b = t("(b _)");
        let c = t("c");
        let tt = Term::node(b, vec![Term::unit(c)]);
        assert_eq!(Term::flatten(&tt), t("(b c)"));

        let tt = Term::node(t("(a _ _)"), vec![Term::unit(t("c")), Term::unit(t("(b _)"))]);
        assert_eq!(Term::flatten(&tt), t("(a c (b _))"));
    }

    #[test]
    fn flatten_with_outer_ports_and_permuting_labels() {
        // label (a _ (b _)) gets children [port, c]
        let tt = Term::node(t("(a _ (b _))"), vec![Term::port(), Term::unit(t("c"))]);
        assert_eq!(Term::flatten(&tt), t("(a _ (b c))"));
    }

    #[test]
    fn ends_and_parents() {
        let x = t("(a (b c) _)");
        assert_eq!(x.ends(), vec![4, 3, 3, 4]);
        assert_eq!(x.parents(), vec![None, Some((0, 0)), Some((1, 0)), Some((0, 1))]);
        assert_eq!(x.height(), 3);
    }

    #[test]
    fn from_slots_rejects_garbage() {
        assert!(Term::<Sym>::from_slots(vec![Slot::Port, Slot::Port]).is_err());
        assert!(Term::from_slots(vec![Slot::Node(Sym::new("a", 2)), Slot::Port]).is_err());
    }

    #[test]
    fn deep_chain_is_fine() {
        let n = 10_000;
        let text = format!("{}c{}", "(b ".repeat(n), ")".repeat(n));
        let x = t(&text);
        let tt = x.lift_unit();
        assert_eq!(Term::flatten(&tt), x);
        assert_eq!(x.height(), n + 1);
        assert_eq!(x.to_string(), text);
    }
}
