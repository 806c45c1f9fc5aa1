//! The datatype grammar and its values.
//!
//! Datatypes are built from finite ranked alphabets and the terminal set
//! `top` (one element of every arity) by terms, tensor, coproduct and
//! folding. [`Value`] is the untyped carrier; [`typecheck`] relates it to a
//! [`TypeExpr`].

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use crate::error::{bail, Error, Result};
use crate::sexp::{self, Sexp, ToSexp};
use crate::term::{Ranked, Slot, Term};

/// A symbol of a finite ranked alphabet.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sym {
    pub name: String,
    pub arity: usize,
}

impl Sym {
    pub fn new(name: impl Into<String>, arity: usize) -> Sym {
        Sym { name: name.into(), arity }
    }

    /// Parses a term over the given `(name, arity)` symbols.
    pub fn parse_term(text: &str, symbols: &[(&str, usize)]) -> Result<Term<Sym>> {
        let alpha = RankedAlphabet::new(symbols.iter().map(|&(n, a)| (n.to_string(), a)))?;
        alpha.parse_term(text)
    }
}

impl Ranked for Sym {
    fn arity(&self) -> usize {
        self.arity
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl ToSexp for Sym {
    fn to_sexp(&self) -> Sexp {
        Sexp::atom(self.name.clone())
    }
}

/// A finite ranked alphabet, kept sorted by name.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RankedAlphabet {
    symbols: Vec<(String, usize)>,
}

impl RankedAlphabet {
    pub fn new(symbols: impl IntoIterator<Item = (String, usize)>) -> Result<Self> {
        let mut symbols: Vec<_> = symbols.into_iter().collect();
        symbols.sort();
        for w in symbols.windows(2) {
            if w[0].0 == w[1].0 {
                bail!(Validation, "duplicate symbol `{}`", w[0].0);
            }
        }
        for (name, _) in &symbols {
            if name == "_" || name.is_empty() || name.contains(['(', ')', ';']) || name.contains(char::is_whitespace) {
                bail!(Validation, "`{name}` cannot be a symbol name");
            }
        }
        Ok(RankedAlphabet { symbols })
    }

    pub fn from_syms<'a>(syms: impl IntoIterator<Item = &'a Sym>) -> Result<Self> {
        Self::new(syms.into_iter().map(|s| (s.name.clone(), s.arity)))
    }

    pub fn symbols(&self) -> impl Iterator<Item = Sym> + '_ {
        self.symbols.iter().map(|(n, a)| Sym::new(n.clone(), *a))
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn arity_of(&self, name: &str) -> Option<usize> {
        self.symbols
            .binary_search_by(|(n, _)| n.as_str().cmp(name))
            .ok()
            .map(|i| self.symbols[i].1)
    }

    pub fn contains(&self, s: &Sym) -> bool {
        self.arity_of(&s.name) == Some(s.arity)
    }

    pub fn sym(&self, name: &str) -> Result<Sym> {
        match self.arity_of(name) {
            Some(a) => Ok(Sym::new(name, a)),
            None => bail!(Type, "unknown symbol `{name}`"),
        }
    }

    pub fn union(&self, other: &RankedAlphabet) -> Result<RankedAlphabet> {
        let mut all: BTreeMap<String, usize> = BTreeMap::new();
        for (n, a) in self.symbols.iter().chain(&other.symbols) {
            if let Some(b) = all.insert(n.clone(), *a) {
                if b != *a {
                    bail!(Validation, "symbol `{n}` declared with arities {a} and {b}");
                }
            }
        }
        Ok(RankedAlphabet { symbols: all.into_iter().collect() })
    }

    pub fn max_arity(&self) -> usize {
        self.symbols.iter().map(|s| s.1).max().unwrap_or(0)
    }

    pub fn parse_term(&self, text: &str) -> Result<Term<Sym>> {
        self.term_from_sexp(&sexp::parse(text)?)
    }

    pub fn term_from_sexp(&self, s: &Sexp) -> Result<Term<Sym>> {
        Term::from_sexp(s, |h, _| {
            let name = h.expect_atom("a symbol")?;
            self.sym(name).map_err(|e| h.error(e.to_string()))
        })
    }

    /// `((a 2) (b 1) ...)`
    pub fn from_sexp_items(items: &[Sexp]) -> Result<Self> {
        let mut out = Vec::new();
        for it in items {
            let pair = it.expect_list("(name arity)")?;
            if pair.len() != 2 {
                return Err(it.error("expected (name arity)"));
            }
            out.push((pair[0].expect_atom("a name")?.to_string(), pair[1].expect_usize("an arity")?));
        }
        Self::new(out).map_err(|e| items.first().map_or(e.clone(), |s| s.error(e.to_string())))
    }

    pub fn to_sexp_items(&self) -> Vec<Sexp> {
        self.symbols
            .iter()
            .map(|(n, a)| Sexp::list(vec![Sexp::atom(n.clone()), Sexp::atom(a.to_string())]))
            .collect()
    }
}

/// Where each port of a folded element goes: `(outer port, slot)`, both
/// 1-based. Index `i` of the map describes payload port `i` (0-based).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Grouping {
    map: Vec<(usize, usize)>,
}

impl Grouping {
    /// Validates injectivity and bounds.
    pub fn new(map: Vec<(usize, usize)>, k: usize, outer: usize) -> Result<Self> {
        let g = Grouping { map };
        g.check(k, outer)?;
        Ok(g)
    }

    /// No validation; callers must uphold the invariants.
    pub fn from_vec_unchecked(map: Vec<(usize, usize)>) -> Self {
        Grouping { map }
    }

    /// `i -> (i, 1)`.
    pub fn identity(n: usize) -> Self {
        Grouping { map: (1..=n).map(|i| (i, 1)).collect() }
    }

    pub fn check(&self, k: usize, outer: usize) -> Result<()> {
        let mut seen = HashSet::new();
        for (p, &(o, s)) in self.map.iter().enumerate() {
            if o == 0 || o > outer {
                bail!(Structural, "port {} grouped to outer port {o}, outer arity is {outer}", p + 1);
            }
            if s == 0 || s > k {
                bail!(Structural, "port {} grouped to slot {s}, fold is {k}", p + 1);
            }
            if !seen.insert((o, s)) {
                bail!(Structural, "grouping is not injective at ({o}, {s})");
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Target of payload port `p` (0-based).
    pub fn get(&self, p: usize) -> (usize, usize) {
        self.map[p]
    }

    pub fn as_slice(&self) -> &[(usize, usize)] {
        &self.map
    }

    /// Payload port (0-based) grouped to `(outer, slot)`.
    pub fn preimage(&self, outer: usize, slot: usize) -> Option<usize> {
        self.map.iter().position(|&x| x == (outer, slot))
    }

    pub fn to_sexp(&self) -> Sexp {
        Sexp::list(
            self.map
                .iter()
                .enumerate()
                .map(|(p, &(o, s))| {
                    Sexp::list(vec![
                        Sexp::atom((p + 1).to_string()),
                        Sexp::atom(o.to_string()),
                        Sexp::atom(s.to_string()),
                    ])
                })
                .collect(),
        )
    }

    /// Reads `((p g s) ...)`; triples may come in any order but must list
    /// every port exactly once.
    pub fn from_sexp(s: &Sexp, ports: usize, k: usize, outer: usize) -> Result<Self> {
        let items = s.expect_list("grouping triples")?;
        let mut map = vec![None; ports];
        for it in items {
            let tr = it.expect_list("(port group slot)")?;
            if tr.len() != 3 {
                return Err(it.error("expected (port group slot)"));
            }
            let p = tr[0].expect_usize("a port")?;
            if p == 0 || p > ports {
                return Err(it.error(format!("port {p} out of range 1..={ports}")));
            }
            if map[p - 1].is_some() {
                return Err(it.error(format!("port {p} grouped twice")));
            }
            map[p - 1] = Some((tr[1].expect_usize("a group")?, tr[2].expect_usize("a slot")?));
        }
        let map: Option<Vec<_>> = map.into_iter().collect();
        let map = map.ok_or_else(|| s.error("grouping must list every port"))?;
        Grouping::new(map, k, outer).map_err(|e| s.error(e.to_string()))
    }
}

/// Natural bijection `{1..k1} x {1..k2} -> {1..k1*k2}`, lexicographic.
pub fn pair_slot(p1: usize, p2: usize, k2: usize) -> usize {
    (p1 - 1) * k2 + p2
}

/// Groups the grouping of an inner fold through an outer one:
/// `i -> (i2, pi(p1, p2))` where `(i1, p1) = f1(i)` and `(i2, p2) = f2(i1)`.
pub fn compose_groupings(f1: &Grouping, f2: &Grouping, k2: usize) -> Grouping {
    Grouping {
        map: f1
            .map
            .iter()
            .map(|&(i1, p1)| {
                let (i2, p2) = f2.map[i1 - 1];
                (i2, pair_slot(p1, p2, k2))
            })
            .collect(),
    }
}

/// An element packaged with a grouping of its ports.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fold<T> {
    pub payload: T,
    pub grouping: Grouping,
    pub k: usize,
    pub outer: usize,
}

impl<T: Ranked> Fold<T> {
    pub fn new(payload: T, grouping: Grouping, k: usize, outer: usize) -> Result<Self> {
        let f = Fold { payload, grouping, k, outer };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            bail!(Structural, "fold with k = 0");
        }
        if self.grouping.len() != self.payload.arity() {
            bail!(
                Structural,
                "grouping has {} entries for a payload of arity {}",
                self.grouping.len(),
                self.payload.arity()
            );
        }
        self.grouping.check(self.k, self.outer)
    }

    /// The fold with `k = 1` and the identity grouping.
    pub fn trivial(payload: T) -> Self {
        let n = payload.arity();
        Fold { payload, grouping: Grouping::identity(n), k: 1, outer: n }
    }

    pub fn map<U: Ranked>(self, f: impl FnOnce(T) -> U) -> Fold<U> {
        let payload = f(self.payload);
        debug_assert_eq!(payload.arity(), self.grouping.len());
        Fold { payload, grouping: self.grouping, k: self.k, outer: self.outer }
    }
}

impl<T> Ranked for Fold<T> {
    fn arity(&self) -> usize {
        self.outer
    }
}

impl<T: Ranked> Fold<Fold<T>> {
    /// Graded monad product: a double fold becomes a single fold by
    /// `k1 * k2` where `k1` is the inner fold.
    pub fn flatten(self) -> Fold<T> {
        let inner = self.payload;
        let grouping = compose_groupings(&inner.grouping, &self.grouping, self.k);
        Fold { payload: inner.payload, grouping, k: inner.k * self.k, outer: self.outer }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    First,
    Second,
}

impl Side {
    pub fn tag(self) -> &'static str {
        match self {
            Side::First => "in1",
            Side::Second => "in2",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Sym(Sym),
    /// The element of the terminal set with the given arity.
    Top(usize),
    Term(Term<Value>),
    Pair(Box<Value>, Box<Value>),
    Inj(Side, Box<Value>),
    Folded(Box<Fold<Value>>),
}

impl Ranked for Value {
    fn arity(&self) -> usize {
        match self {
            Value::Sym(s) => s.arity,
            Value::Top(n) => *n,
            Value::Term(t) => t.arity(),
            Value::Pair(a, b) => a.arity() + b.arity(),
            Value::Inj(_, v) => v.arity(),
            Value::Folded(f) => f.outer,
        }
    }
}

impl Value {
    pub fn sym(name: impl Into<String>, arity: usize) -> Value {
        Value::Sym(Sym::new(name, arity))
    }

    pub fn pair(a: Value, b: Value) -> Value {
        Value::Pair(Box::new(a), Box::new(b))
    }

    pub fn inj(side: Side, v: Value) -> Value {
        Value::Inj(side, Box::new(v))
    }

    pub fn folded(payload: Value, grouping: Grouping, k: usize, outer: usize) -> Result<Value> {
        Ok(Value::Folded(Box::new(Fold::new(payload, grouping, k, outer)?)))
    }

    /// Arity after validating any folds inside.
    pub fn checked_arity(&self) -> Result<usize> {
        self.validate()?;
        Ok(self.arity())
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Value::Sym(_) | Value::Top(_) => Ok(()),
            Value::Term(t) => t.labels().try_for_each(Value::validate),
            Value::Pair(a, b) => {
                a.validate()?;
                b.validate()
            }
            Value::Inj(_, v) => v.validate(),
            Value::Folded(f) => {
                f.validate()?;
                f.payload.validate()
            }
        }
    }

    pub fn as_term(&self) -> Result<&Term<Value>> {
        match self {
            Value::Term(t) => Ok(t),
            _ => bail!(Type, "expected a term, found {}", self.kind()),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Value::Sym(_) => "a symbol",
            Value::Top(_) => "a terminal element",
            Value::Term(_) => "a term",
            Value::Pair(..) => "a pair",
            Value::Inj(..) => "an injection",
            Value::Folded(_) => "a fold",
        }
    }

    /// Converts a term over symbols into a term value.
    pub fn from_sym_term(t: &Term<Sym>) -> Value {
        Value::Term(t.map(|s| Value::Sym(s.clone())))
    }

    /// The inverse of [`Value::from_sym_term`].
    pub fn to_sym_term(&self) -> Result<Term<Sym>> {
        let t = self.as_term()?;
        let mut slots = Vec::with_capacity(t.len());
        for s in t.slots() {
            slots.push(match s {
                Slot::Port => Slot::Port,
                Slot::Node(Value::Sym(x)) => Slot::Node(x.clone()),
                Slot::Node(v) => bail!(Type, "expected a symbol label, found {}", v.kind()),
            });
        }
        Term::from_slots(slots)
    }
}

/// Single-node term.
pub fn unit(v: Value) -> Value {
    Value::Term(Term::unit(v))
}

/// Flattens a term whose labels are all terms.
pub fn flatten(v: &Value) -> Result<Value> {
    let t = v.as_term()?;
    let mut slots = Vec::with_capacity(t.len());
    for s in t.slots() {
        slots.push(match s {
            Slot::Port => Slot::Port,
            Slot::Node(Value::Term(x)) => Slot::Node(x.clone()),
            Slot::Node(other) => bail!(Type, "flatten needs term labels, found {}", other.kind()),
        });
    }
    Ok(Value::Term(Term::flatten(&Term::from_slots(slots)?)))
}

/// Graded product on a value of the shape `(v / f1) / f2`.
pub fn fold_flatten(v: &Value) -> Result<Value> {
    match v {
        Value::Folded(outer) => match &outer.payload {
            Value::Folded(inner) => {
                let f = Fold {
                    payload: Fold {
                        payload: inner.payload.clone(),
                        grouping: inner.grouping.clone(),
                        k: inner.k,
                        outer: inner.outer,
                    },
                    grouping: outer.grouping.clone(),
                    k: outer.k,
                    outer: outer.outer,
                };
                Ok(Value::Folded(Box::new(f.flatten())))
            }
            other => bail!(Type, "fold-flatten needs a double fold, found a fold of {}", other.kind()),
        },
        other => bail!(Type, "fold-flatten needs a double fold, found {}", other.kind()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TypeExpr {
    Finite(RankedAlphabet),
    Terminal,
    TermOf(Box<TypeExpr>),
    Tensor(Box<TypeExpr>, Box<TypeExpr>),
    Coproduct(Box<TypeExpr>, Box<TypeExpr>),
    FoldOf(usize, Box<TypeExpr>),
}

impl TypeExpr {
    pub fn term(t: TypeExpr) -> TypeExpr {
        TypeExpr::TermOf(Box::new(t))
    }

    pub fn tensor(a: TypeExpr, b: TypeExpr) -> TypeExpr {
        TypeExpr::Tensor(Box::new(a), Box::new(b))
    }

    pub fn coproduct(a: TypeExpr, b: TypeExpr) -> TypeExpr {
        TypeExpr::Coproduct(Box::new(a), Box::new(b))
    }

    pub fn fold(k: usize, t: TypeExpr) -> TypeExpr {
        TypeExpr::FoldOf(k, Box::new(t))
    }

    pub fn finite(symbols: &[(&str, usize)]) -> TypeExpr {
        TypeExpr::Finite(
            RankedAlphabet::new(symbols.iter().map(|&(n, a)| (n.to_string(), a)))
                .expect("valid alphabet literal"),
        )
    }

    pub fn parse(text: &str) -> Result<TypeExpr> {
        Self::from_sexp(&sexp::parse(text)?)
    }

    pub fn from_sexp(s: &Sexp) -> Result<TypeExpr> {
        if s.as_atom() == Some("top") {
            return Ok(TypeExpr::Terminal);
        }
        let items = s.expect_list("a type")?;
        let arg = |i: usize| -> Result<&Sexp> {
            items.get(i).ok_or_else(|| s.error("missing type argument"))
        };
        let exact = |n: usize| -> Result<()> {
            if items.len() == n {
                Ok(())
            } else {
                Err(s.error(format!("expected {} arguments", n - 1)))
            }
        };
        match s.head() {
            Some("finite") => Ok(TypeExpr::Finite(RankedAlphabet::from_sexp_items(&items[1..])?)),
            Some("term") => {
                exact(2)?;
                Ok(TypeExpr::term(Self::from_sexp(arg(1)?)?))
            }
            Some("tensor") => {
                exact(3)?;
                Ok(TypeExpr::tensor(Self::from_sexp(arg(1)?)?, Self::from_sexp(arg(2)?)?))
            }
            Some("coprod") => {
                exact(3)?;
                Ok(TypeExpr::coproduct(Self::from_sexp(arg(1)?)?, Self::from_sexp(arg(2)?)?))
            }
            Some("fold") => {
                exact(3)?;
                let k = arg(1)?.expect_usize("a fold index")?;
                if k == 0 {
                    return Err(arg(1)?.error("fold index must be positive"));
                }
                Ok(TypeExpr::fold(k, Self::from_sexp(arg(2)?)?))
            }
            _ => Err(s.error("unknown type constructor")),
        }
    }
}

impl ToSexp for TypeExpr {
    fn to_sexp(&self) -> Sexp {
        let l = |tag: &str, rest: Vec<Sexp>| {
            let mut v = vec![Sexp::atom(tag)];
            v.extend(rest);
            Sexp::list(v)
        };
        match self {
            TypeExpr::Finite(a) => l("finite", a.to_sexp_items()),
            TypeExpr::Terminal => Sexp::atom("top"),
            TypeExpr::TermOf(t) => l("term", vec![t.to_sexp()]),
            TypeExpr::Tensor(a, b) => l("tensor", vec![a.to_sexp(), b.to_sexp()]),
            TypeExpr::Coproduct(a, b) => l("coprod", vec![a.to_sexp(), b.to_sexp()]),
            TypeExpr::FoldOf(k, t) => l("fold", vec![Sexp::atom(k.to_string()), t.to_sexp()]),
        }
    }
}

impl fmt::Display for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sexp())
    }
}

/// Does `v` inhabit `ty`?
pub fn typecheck(v: &Value, ty: &TypeExpr) -> bool {
    match (v, ty) {
        (Value::Sym(s), TypeExpr::Finite(a)) => a.contains(s),
        (Value::Top(_), TypeExpr::Terminal) => true,
        (Value::Term(t), TypeExpr::TermOf(inner)) => t.labels().all(|l| typecheck(l, inner)),
        (Value::Pair(a, b), TypeExpr::Tensor(ta, tb)) => typecheck(a, ta) && typecheck(b, tb),
        (Value::Inj(Side::First, x), TypeExpr::Coproduct(ta, _)) => typecheck(x, ta),
        (Value::Inj(Side::Second, x), TypeExpr::Coproduct(_, tb)) => typecheck(x, tb),
        (Value::Folded(f), TypeExpr::FoldOf(k, inner)) => {
            f.k == *k && f.validate().is_ok() && typecheck(&f.payload, inner)
        }
        _ => false,
    }
}

impl ToSexp for Value {
    fn to_sexp(&self) -> Sexp {
        match self {
            Value::Sym(s) => Sexp::atom(s.name.clone()),
            Value::Top(n) => Sexp::list(vec![Sexp::atom("top"), Sexp::atom(n.to_string())]),
            Value::Term(t) => t.to_sexp_with(Value::to_sexp),
            Value::Pair(a, b) => Sexp::list(vec![Sexp::atom("pair"), a.to_sexp(), b.to_sexp()]),
            Value::Inj(side, v) => Sexp::list(vec![Sexp::atom(side.tag()), v.to_sexp()]),
            Value::Folded(f) => Sexp::list(vec![
                Sexp::atom("fold"),
                Sexp::atom(f.k.to_string()),
                Sexp::atom(f.outer.to_string()),
                f.grouping.to_sexp(),
                f.payload.to_sexp(),
            ]),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sexp())
    }
}

pub fn serialize(v: &Value) -> String {
    v.to_sexp().to_string()
}

pub fn deserialize(text: &str, ty: &TypeExpr) -> Result<Value> {
    value_from_sexp(&sexp::parse(text)?, ty)
}

/// Type-directed reader for the syntax of [`serialize`].
pub fn value_from_sexp(s: &Sexp, ty: &TypeExpr) -> Result<Value> {
    match ty {
        TypeExpr::Finite(a) => {
            let name = s.expect_atom("a symbol")?;
            a.sym(name).map(Value::Sym).map_err(|e| s.error(e.to_string()))
        }
        TypeExpr::Terminal => {
            let rest = s.expect_tagged("top")?;
            match rest {
                [n] => Ok(Value::Top(n.expect_usize("an arity")?)),
                _ => Err(s.error("expected (top n)")),
            }
        }
        TypeExpr::TermOf(inner) => {
            Term::from_sexp(s, |h, _| value_from_sexp(h, inner)).map(Value::Term)
        }
        TypeExpr::Tensor(ta, tb) => match s.expect_tagged("pair")? {
            [a, b] => Ok(Value::pair(value_from_sexp(a, ta)?, value_from_sexp(b, tb)?)),
            _ => Err(s.error("expected (pair a b)")),
        },
        TypeExpr::Coproduct(ta, tb) => {
            let items = s.expect_list("an injection")?;
            match (s.head(), items.len()) {
                (Some("in1"), 2) => Ok(Value::inj(Side::First, value_from_sexp(&items[1], ta)?)),
                (Some("in2"), 2) => Ok(Value::inj(Side::Second, value_from_sexp(&items[1], tb)?)),
                _ => Err(s.error("expected (in1 v) or (in2 v)")),
            }
        }
        TypeExpr::FoldOf(k, inner) => match s.expect_tagged("fold")? {
            [ks, outer, g, payload] => {
                let kk = ks.expect_usize("a fold index")?;
                if kk != *k {
                    return Err(ks.error(format!("fold index {kk}, type says {k}")));
                }
                let outer = outer.expect_usize("an outer arity")?;
                let payload = value_from_sexp(payload, inner)?;
                let grouping = Grouping::from_sexp(g, payload.arity(), kk, outer)?;
                Ok(Value::Folded(Box::new(Fold { payload, grouping, k: kk, outer })))
            }
            _ => Err(s.error("expected (fold k outer ((p g s) ...) v)")),
        },
    }
}

impl From<Sym> for Value {
    fn from(s: Sym) -> Value {
        Value::Sym(s)
    }
}

impl From<Term<Sym>> for Value {
    fn from(t: Term<Sym>) -> Value {
        Value::from_sym_term(&t)
    }
}

impl TryFrom<&Value> for Term<Sym> {
    type Error = Error;

    fn try_from(v: &Value) -> Result<Term<Sym>> {
        v.to_sym_term()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma() -> TypeExpr {
        TypeExpr::finite(&[("a", 2), ("b", 1), ("c", 0)])
    }

    #[test]
    fn arities() {
        assert_eq!(Value::sym("c", 0).arity(), 0);
        let t = deserialize("(a _ (b _))", &TypeExpr::term(sigma())).unwrap();
        assert_eq!(t.arity(), 2);
        let f = Value::folded(Value::sym("a", 2), Grouping::new(vec![(1, 1), (1, 2)], 2, 1).unwrap(), 2, 1)
            .unwrap();
        assert_eq!(f.checked_arity().unwrap(), 1);
        assert_eq!(Value::pair(Value::sym("a", 2), Value::Top(3)).arity(), 5);
    }

    #[test]
    fn typecheck_examples() {
        assert!(typecheck(&Value::sym("a", 2), &sigma()));
        assert!(!typecheck(&Value::sym("a", 1), &sigma()));
        let co = TypeExpr::coproduct(sigma(), TypeExpr::Terminal);
        assert!(typecheck(&Value::inj(Side::First, Value::sym("a", 2)), &co));
        assert!(!typecheck(&Value::inj(Side::Second, Value::sym("a", 2)), &co));
        let bad = Value::Folded(Box::new(Fold {
            payload: Value::sym("a", 2),
            grouping: Grouping::from_vec_unchecked(vec![(1, 1), (1, 1)]),
            k: 2,
            outer: 1,
        }));
        assert!(!typecheck(&bad, &TypeExpr::fold(2, sigma())));
    }

    #[test]
    fn unit_examples() {
        let ty = TypeExpr::term(sigma());
        assert_eq!(serialize(&unit(Value::sym("a", 2))), "(a _ _)");
        assert_eq!(serialize(&unit(Value::sym("c", 0))), "c");
        assert_eq!(unit(Value::sym("b", 1)), deserialize("(b _)", &ty).unwrap());
    }

    #[test]
    fn fold_flatten_example() {
        let inner = Value::folded(Value::sym("a", 2), Grouping::new(vec![(1, 1), (1, 2)], 2, 1).unwrap(), 2, 1)
            .unwrap();
        let outer = Value::folded(inner, Grouping::identity(1), 1, 1).unwrap();
        let flat = fold_flatten(&outer).unwrap();
        let want = Value::folded(Value::sym("a", 2), Grouping::new(vec![(1, 1), (1, 2)], 2, 1).unwrap(), 2, 1)
            .unwrap();
        assert_eq!(flat, want);
    }

    #[test]
    fn value_round_trips() {
        let ty = TypeExpr::fold(
            2,
            TypeExpr::coproduct(TypeExpr::tensor(TypeExpr::term(sigma()), TypeExpr::Terminal), sigma()),
        );
        let text = "(fold 2 3 ((1 1 2) (2 3 1) (3 1 1) (4 2 2)) (in1 (pair (a _ (b _)) (top 2))))";
        let v = deserialize(text, &ty).unwrap();
        assert!(typecheck(&v, &ty));
        assert_eq!(serialize(&v), text);
        assert_eq!(TypeExpr::parse(&ty.to_string()).unwrap(), ty);
    }

    #[test]
    fn terms_of_terms_round_trip() {
        let ty = TypeExpr::term(TypeExpr::term(sigma()));
        for text in ["((a _ _) c (_ c))", "((b _) ((a _ _) c c))", "c", "_"] {
            let v = deserialize(text, &ty).unwrap();
            assert_eq!(serialize(&v), text);
        }
        let v = deserialize("((a _ (b _)) c c)", &ty).unwrap();
        assert_eq!(serialize(&flatten(&v).unwrap()), "(a c (b c))");
    }

    #[test]
    fn parse_errors_have_positions() {
        let err = deserialize("(a c\n  (b d))", &TypeExpr::term(sigma())).unwrap_err();
        assert_eq!(err, Error::Parse { line: 2, col: 6, msg: "type error: unknown symbol `d`".into() });
    }
}
