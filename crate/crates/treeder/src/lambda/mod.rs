//! Simply typed λ-terms stored as trees over variables, abstractions,
//! applications and output letters.
//!
//! Binding is by name: a variable refers to the nearest enclosing
//! abstraction with the same name. Typing is by name as well, every variable
//! name carries one type in the declared variable set, bound or free.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::error::{bail, Error, Result};
use crate::sexp::{self, Node, Sexp, ToSexp};
use crate::term::{Ranked, Slot, Term};

mod dfa;
mod reduce;

pub use dfa::{
    build_type_dfa, check_counter_free, dfa_accepts, pda_run, pda_run_from, stack_effect, TypeDfa, DEAD, INIT,
};
pub use reduce::{
    alpha_eq, develop, eval_redexes, factorize_thin, find_redexes, full_redex_span, is_normal, is_thin,
    is_word_shaped, normalize_linear, normalize_linear_traced, normalize_thin, normalize_thin_traced,
    reference_normalize, reference_normalize_ports, redexes, survivors, Development, LinearTrace,
};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SimpleType {
    O,
    Arrow(Box<SimpleType>, Box<SimpleType>),
}

impl SimpleType {
    pub fn arrow(a: SimpleType, b: SimpleType) -> SimpleType {
        SimpleType::Arrow(Box::new(a), Box::new(b))
    }

    /// `o -> ... -> o` with `n` arguments.
    pub fn order(n: usize) -> SimpleType {
        (0..n).fold(SimpleType::O, |t, _| SimpleType::arrow(SimpleType::O, t))
    }

    /// Node count.
    pub fn size(&self) -> usize {
        match self {
            SimpleType::O => 1,
            SimpleType::Arrow(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// `s1 -> ... -> sn -> o` as `[s1, ..., sn, o]`.
    pub fn spine(&self) -> Vec<SimpleType> {
        let mut out = Vec::new();
        let mut cur = self;
        while let SimpleType::Arrow(a, b) = cur {
            out.push((**a).clone());
            cur = b;
        }
        out.push(cur.clone());
        out
    }

    /// Inverse of [`SimpleType::spine`]; `None` on an empty list.
    pub fn from_spine(spine: &[SimpleType]) -> Option<SimpleType> {
        let (last, init) = spine.split_last()?;
        Some(init.iter().rev().fold(last.clone(), |t, a| SimpleType::arrow(a.clone(), t)))
    }

    pub fn subtypes(&self) -> Vec<SimpleType> {
        let mut out = Vec::new();
        let mut todo = vec![self];
        while let Some(t) = todo.pop() {
            out.push(t.clone());
            if let SimpleType::Arrow(a, b) = t {
                todo.push(a);
                todo.push(b);
            }
        }
        out
    }

    /// Every type with at most `n` nodes.
    pub fn all_up_to(n: usize) -> Vec<SimpleType> {
        // by_size[s] holds the types of size exactly s
        let mut by_size: Vec<Vec<SimpleType>> = vec![Vec::new(); n + 1];
        if n >= 1 {
            by_size[1].push(SimpleType::O);
        }
        for s in 3..=n {
            let mut here = Vec::new();
            for l in 1..s - 1 {
                let r = s - 1 - l;
                for a in &by_size[l] {
                    for b in &by_size[r] {
                        here.push(SimpleType::arrow(a.clone(), b.clone()));
                    }
                }
            }
            by_size[s] = here;
        }
        by_size.into_iter().flatten().collect()
    }

    pub fn from_sexp(s: &Sexp) -> Result<SimpleType> {
        match &s.node {
            Node::Atom(a) if a == "o" => Ok(SimpleType::O),
            Node::Atom(a) => Err(s.error(format!("unknown type `{a}`"))),
            Node::List(_) => {
                let items = s.expect_tagged("->")?;
                if items.len() < 2 {
                    return Err(s.error("an arrow type needs at least two components"));
                }
                let parts = items.iter().map(SimpleType::from_sexp).collect::<Result<Vec<_>>>()?;
                Ok(SimpleType::from_spine(&parts).expect("nonempty"))
            }
        }
    }
}

impl ToSexp for SimpleType {
    fn to_sexp(&self) -> Sexp {
        match self {
            SimpleType::O => Sexp::atom("o"),
            SimpleType::Arrow(a, b) => Sexp::list(vec![Sexp::atom("->"), a.to_sexp(), b.to_sexp()]),
        }
    }
}

impl fmt::Display for SimpleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sexp())
    }
}

/// A finite set of types closed under taking components.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypeSet(BTreeSet<SimpleType>);

impl TypeSet {
    pub fn new(types: impl IntoIterator<Item = SimpleType>) -> TypeSet {
        TypeSet(types.into_iter().flat_map(|t| t.subtypes()).collect())
    }

    pub fn contains(&self, t: &SimpleType) -> bool {
        self.0.contains(t)
    }

    pub fn iter(&self) -> impl Iterator<Item = &SimpleType> + '_ {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Size of the largest member.
    pub fn max_size(&self) -> usize {
        self.0.iter().map(SimpleType::size).max().unwrap_or(0)
    }

    /// Arrow members, largest first.
    pub fn arrows_by_size(&self) -> Vec<SimpleType> {
        let mut v: Vec<SimpleType> = self.0.iter().filter(|t| matches!(t, SimpleType::Arrow(..))).cloned().collect();
        v.sort_by(|a, b| b.size().cmp(&a.size()).then(a.cmp(b)));
        v
    }

    /// `(types t ...)`.
    pub fn from_sexp(s: &Sexp) -> Result<TypeSet> {
        let items = s.expect_tagged("types")?;
        Ok(TypeSet::new(items.iter().map(SimpleType::from_sexp).collect::<Result<Vec<_>>>()?))
    }
}

impl ToSexp for TypeSet {
    fn to_sexp(&self) -> Sexp {
        let mut items = vec![Sexp::atom("types")];
        items.extend(self.0.iter().map(ToSexp::to_sexp));
        Sexp::list(items)
    }
}

/// Variable names with their types.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Vars(BTreeMap<String, SimpleType>);

impl Vars {
    pub fn new<S: Into<String>>(vars: impl IntoIterator<Item = (S, SimpleType)>) -> Vars {
        Vars(vars.into_iter().map(|(n, t)| (n.into(), t)).collect())
    }

    pub fn get(&self, name: &str) -> Option<&SimpleType> {
        self.0.get(name)
    }

    pub fn insert(&mut self, name: impl Into<String>, t: SimpleType) {
        self.0.insert(name.into(), t);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &SimpleType)> + '_ {
        self.0.iter()
    }

    pub fn names(&self) -> impl Iterator<Item = &String> + '_ {
        self.0.keys()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `(vars (x o) (f (-> o o)) ...)`.
    pub fn from_sexp(s: &Sexp) -> Result<Vars> {
        let mut out = Vars::default();
        for item in s.expect_tagged("vars")? {
            let pair = item.expect_list("variable declaration")?;
            if pair.len() != 2 {
                return Err(item.error("expected (name type)"));
            }
            let name = pair[0].expect_atom("variable name")?;
            if name == "_" {
                return Err(pair[0].error("`_` is reserved for ports"));
            }
            if out.0.insert(name.to_string(), SimpleType::from_sexp(&pair[1])?).is_some() {
                return Err(item.error(format!("variable `{name}` declared twice")));
            }
        }
        Ok(out)
    }
}

impl ToSexp for Vars {
    fn to_sexp(&self) -> Sexp {
        let mut items = vec![Sexp::atom("vars")];
        items.extend(self.0.iter().map(|(n, t)| Sexp::list(vec![Sexp::atom(n.clone()), t.to_sexp()])));
        Sexp::list(items)
    }
}

/// Node labels. Output letters have no β-rule.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Lam {
    Var(String),
    Abs(String),
    App,
    Out(String, usize),
}

impl Ranked for Lam {
    fn arity(&self) -> usize {
        match self {
            Lam::Var(_) => 0,
            Lam::Abs(_) => 1,
            Lam::App => 2,
            Lam::Out(_, n) => *n,
        }
    }
}

impl fmt::Display for Lam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Lam::Var(x) => write!(f, "{x}"),
            Lam::Abs(x) => write!(f, "λ{x}"),
            Lam::App => write!(f, "@"),
            Lam::Out(a, _) => write!(f, "{a}"),
        }
    }
}

pub type LambdaTerm = Term<Lam>;

/// Reads `x`, `_`, `(lam x M)`, `(app M N ...)` (left-nested) and
/// `(out a M ...)`.
pub fn term_from_sexp(s: &Sexp) -> Result<LambdaTerm> {
    let mut slots = Vec::new();
    let mut todo: Vec<&Sexp> = vec![s];
    while let Some(s) = todo.pop() {
        match &s.node {
            Node::Atom(a) if a == "_" => slots.push(Slot::Port),
            Node::Atom(a) => slots.push(Slot::Node(Lam::Var(a.clone()))),
            Node::List(items) => {
                let head = items.first().ok_or_else(|| s.error("empty list is not a term"))?;
                match head.expect_atom("term head")? {
                    "lam" => {
                        if items.len() != 3 {
                            return Err(s.error("expected (lam x body)"));
                        }
                        let x = items[1].expect_atom("bound variable")?;
                        slots.push(Slot::Node(Lam::Abs(x.to_string())));
                        todo.push(&items[2]);
                    }
                    "app" => {
                        if items.len() < 3 {
                            return Err(s.error("expected (app f a ...)"));
                        }
                        for _ in 2..items.len() {
                            slots.push(Slot::Node(Lam::App));
                        }
                        todo.extend(items[1..].iter().rev());
                    }
                    "out" => {
                        if items.len() < 2 {
                            return Err(s.error("expected (out a M ...)"));
                        }
                        let a = items[1].expect_atom("output letter")?;
                        slots.push(Slot::Node(Lam::Out(a.to_string(), items.len() - 2)));
                        todo.extend(items[2..].iter().rev());
                    }
                    other => return Err(head.error(format!("unknown term form `{other}`"))),
                }
            }
        }
    }
    Term::from_slots(slots)
}

pub fn parse_term(text: &str) -> Result<LambdaTerm> {
    term_from_sexp(&sexp::parse(text)?)
}

pub fn term_to_sexp(t: &LambdaTerm) -> Sexp {
    t.fold_up::<Sexp>(|_, s, kids| {
        Ok(match s {
            Slot::Port => Sexp::atom("_"),
            Slot::Node(Lam::Var(x)) => Sexp::atom(x.clone()),
            Slot::Node(l) => {
                let mut items = match l {
                    Lam::Abs(x) => vec![Sexp::atom("lam"), Sexp::atom(x.clone())],
                    Lam::App => vec![Sexp::atom("app")],
                    Lam::Out(a, _) => vec![Sexp::atom("out"), Sexp::atom(a.clone())],
                    Lam::Var(_) => unreachable!(),
                };
                items.extend(kids);
                Sexp::list(items)
            }
        })
    })
    .expect("printing cannot fail")
}

pub fn show(t: &LambdaTerm) -> String {
    term_to_sexp(t).to_string()
}

/// A term file: optional `(types ...)` and `(vars ...)` headers, then
/// `(term M)`.
#[derive(Clone, Debug)]
pub struct LambdaFile {
    pub types: TypeSet,
    pub vars: Vars,
    pub term: LambdaTerm,
}

impl LambdaFile {
    pub fn parse(text: &str) -> Result<LambdaFile> {
        let mut types = None;
        let mut vars = None;
        let mut term = None;
        for item in sexp::parse_all(text)? {
            match item.head() {
                Some("types") => types = Some(TypeSet::from_sexp(&item)?),
                Some("vars") => vars = Some(Vars::from_sexp(&item)?),
                Some("term") => {
                    let body = item.expect_tagged("term")?;
                    if body.len() != 1 {
                        return Err(item.error("expected (term M)"));
                    }
                    term = Some(term_from_sexp(&body[0])?);
                }
                _ => return Err(item.error("expected (types ...), (vars ...) or (term ...)")),
            }
        }
        let term = term.ok_or_else(|| Error::Parse { line: 1, col: 1, msg: "missing (term ...)".into() })?;
        Ok(LambdaFile { types: types.unwrap_or_default(), vars: vars.unwrap_or_default(), term })
    }
}

/// The type of every slot, by the usual rules. Ports are rejected.
pub fn subterm_types(t: &LambdaTerm, vars: &Vars) -> Result<Vec<SimpleType>> {
    let mut out = vec![SimpleType::O; t.len()];
    t.fold_up::<SimpleType>(|pos, s, kids| {
        let ty = match s {
            Slot::Port => bail!(Type, "port at slot {pos} has no type"),
            Slot::Node(Lam::Var(x)) => match vars.get(x) {
                Some(t) => t.clone(),
                None => bail!(Type, "undeclared variable `{x}`"),
            },
            Slot::Node(Lam::Abs(x)) => match vars.get(x) {
                Some(t) => SimpleType::arrow(t.clone(), kids.into_iter().next().unwrap()),
                None => bail!(Type, "undeclared bound variable `{x}`"),
            },
            Slot::Node(Lam::App) => {
                let mut k = kids.into_iter();
                let (f, a) = (k.next().unwrap(), k.next().unwrap());
                match f {
                    SimpleType::Arrow(s, r) if *s == a => *r,
                    SimpleType::Arrow(s, _) => bail!(Type, "node {pos}: argument of type {a} given to a function expecting {s}"),
                    SimpleType::O => bail!(Type, "node {pos}: applying a term of type o"),
                }
            }
            Slot::Node(Lam::Out(a, _)) => {
                if let Some(k) = kids.iter().find(|k| **k != SimpleType::O) {
                    bail!(Type, "node {pos}: output letter `{a}` given an argument of type {k}");
                }
                SimpleType::O
            }
        };
        out[pos] = ty.clone();
        Ok(ty)
    })?;
    Ok(out)
}

pub fn infer_type(t: &LambdaTerm, vars: &Vars) -> Result<SimpleType> {
    Ok(subterm_types(t, vars)?.swap_remove(0))
}

/// For every slot holding a bound variable, the position of its binder.
pub fn binders(t: &LambdaTerm) -> Vec<Option<usize>> {
    binders_by(t.slots(), &t.ends(), |s| match s {
        Slot::Node(l) => Some(l),
        Slot::Port => None,
    })
}

pub(crate) fn binders_by<S>(slots: &[S], ends: &[usize], lam: impl Fn(&S) -> Option<&Lam>) -> Vec<Option<usize>> {
    let mut out = vec![None; slots.len()];
    let mut scope: Vec<(usize, &str)> = Vec::new();
    for (pos, s) in slots.iter().enumerate() {
        while scope.last().is_some_and(|&(b, _)| ends[b] <= pos) {
            scope.pop();
        }
        match lam(s) {
            Some(Lam::Abs(x)) => scope.push((pos, x)),
            Some(Lam::Var(x)) => out[pos] = scope.iter().rev().find(|(_, n)| n == x).map(|&(b, _)| b),
            _ => {}
        }
    }
    out
}

/// Every bound variable occurs exactly once in its scope.
pub fn is_linear(t: &LambdaTerm) -> bool {
    let mut uses: HashMap<usize, usize> = HashMap::new();
    for b in binders(t).into_iter().flatten() {
        *uses.entry(b).or_default() += 1;
    }
    t.slots()
        .iter()
        .enumerate()
        .all(|(p, s)| !matches!(s, Slot::Node(Lam::Abs(_))) || uses.get(&p) == Some(&1))
}

/// Names of free variable occurrences, sorted, with repetitions.
pub fn free_vars(t: &LambdaTerm) -> Vec<String> {
    let b = binders(t);
    let mut out: Vec<String> = t
        .slots()
        .iter()
        .enumerate()
        .filter_map(|(p, s)| match s {
            Slot::Node(Lam::Var(x)) if b[p].is_none() => Some(x.clone()),
            _ => None,
        })
        .collect();
    out.sort();
    out
}

/// The labels on the path from the root through first children, read
/// from the leaf up. `None` when that path ends in a port.
pub fn leftmost_word(t: &LambdaTerm) -> Option<Vec<Lam>> {
    let mut word = Vec::new();
    for s in t.slots() {
        match s {
            Slot::Port => return None,
            Slot::Node(l) => {
                word.push(l.clone());
                if l.arity() == 0 {
                    break;
                }
            }
        }
    }
    word.reverse();
    Some(word)
}

/// Types a word read bottom-up: `x : s`, `u λy : s -> t` when `u : t` and
/// `y : s`, `u @ : t` when `u : s -> t`. Output letters of arity `n > 0`
/// take and give `o`. With `within`, every prefix type must be a member.
pub fn word_type(w: &[Lam], vars: &Vars, within: Option<&TypeSet>) -> Option<SimpleType> {
    let ok = |t: &SimpleType| within.is_none_or(|ts| ts.contains(t));
    let (first, rest) = w.split_first()?;
    let mut cur = match first {
        Lam::Var(x) => vars.get(x)?.clone(),
        Lam::Out(_, 0) => SimpleType::O,
        _ => return None,
    };
    if !ok(&cur) {
        return None;
    }
    for l in rest {
        cur = match (l, cur) {
            (Lam::Abs(y), c) => SimpleType::arrow(vars.get(y)?.clone(), c),
            (Lam::App, SimpleType::Arrow(_, r)) => *r,
            (Lam::Out(_, n), SimpleType::O) if *n > 0 => SimpleType::O,
            _ => return None,
        };
        if !ok(&cur) {
            return None;
        }
    }
    Some(cur)
}

/// Typing via both routes: (direct, automaton). They always agree; the
/// pair is exposed so tests can watch them.
pub fn typable_within_both(t: &LambdaTerm, types: &TypeSet, vars: &Vars) -> (bool, bool) {
    let direct = match subterm_types(t, vars) {
        Ok(tys) => tys.iter().all(|ty| types.contains(ty)),
        Err(_) => false,
    };
    (direct, typable_by_automaton(t, types, vars))
}

/// Well-typed with every subterm type in `types`.
pub fn typable_within(t: &LambdaTerm, types: &TypeSet, vars: &Vars) -> bool {
    let (a, b) = typable_within_both(t, types, vars);
    assert_eq!(a, b, "typing routes disagree on {}", show(t));
    a
}

/// Node formulas over the automaton's classification of leftmost words.
fn typable_by_automaton(t: &LambdaTerm, types: &TypeSet, vars: &Vars) -> bool {
    if t.slots().iter().any(|s| matches!(s, Slot::Port)) || types.is_empty() {
        return false;
    }
    let outs: BTreeSet<(String, usize)> = t
        .labels()
        .filter_map(|l| match l {
            Lam::Out(a, n) => Some((a.clone(), *n)),
            _ => None,
        })
        .collect();
    let outs: Vec<(String, usize)> = outs.into_iter().collect();
    // variables in the term but not declared make the term untypable
    for l in t.labels() {
        if let Lam::Var(x) | Lam::Abs(x) = l {
            if vars.get(x).is_none() {
                return false;
            }
        }
    }
    let tau = types.iter().next().unwrap().clone();
    let dfa = TypeDfa::build(types, &tau, vars, &outs).expect("tau is a member");
    let ends = t.ends();
    // state after reading the leftmost word of each subterm
    let mut state = vec![DEAD; t.len()];
    for pos in (0..t.len()).rev() {
        let l = t.label(pos).unwrap();
        let from = if l.arity() == 0 { INIT } else { state[pos + 1] };
        state[pos] = dfa.step(from, l);
    }
    let class = |p: usize| dfa.state_type(state[p]);
    for pos in 0..t.len() {
        let l = t.label(pos).unwrap();
        let kids = t.children_of(pos, &ends);
        let ok = match l {
            Lam::Var(_) => class(pos).is_some(),
            Lam::Abs(x) => match (class(pos), class(pos + 1)) {
                (Some(SimpleType::Arrow(s, r)), Some(body)) => Some(&**s) == vars.get(x) && **r == *body,
                _ => false,
            },
            Lam::App => match (class(kids[0]), class(kids[1])) {
                (Some(SimpleType::Arrow(s, _)), Some(a)) => **s == *a && class(pos).is_some(),
                _ => false,
            },
            Lam::Out(..) => {
                class(pos) == Some(&SimpleType::O) && kids.iter().all(|&k| class(k) == Some(&SimpleType::O))
            }
        };
        if !ok {
            return false;
        }
    }
    true
}

/// `M_0 = x`, `M_(n+1) = (λx. y x x) M_n` with `x : o` and `y : o -> o -> o`.
pub fn exponential(n: usize) -> LambdaTerm {
    let x = || Term::unit(Lam::Var("x".into()));
    let mut t = x();
    for _ in 0..n {
        let body = Term::node(
            Lam::App,
            vec![Term::node(Lam::App, vec![Term::unit(Lam::Var("y".into())), x()]), x()],
        );
        t = Term::node(Lam::App, vec![Term::node(Lam::Abs("x".into()), vec![body]), t]);
    }
    t
}

pub fn exponential_vars() -> Vars {
    Vars::new([("x", SimpleType::O), ("y", SimpleType::order(2))])
}

/// `λx. ... λx. x` with `n` binders, of type `o^n -> o`; affine but not
/// linear for `n > 1`.
pub fn shadowing_chain(n: usize) -> LambdaTerm {
    let mut t = Term::unit(Lam::Var("x".into()));
    for _ in 0..n {
        t = Term::node(Lam::Abs("x".into()), vec![t]);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    fn o() -> SimpleType {
        SimpleType::O
    }

    #[test]
    fn type_syntax_and_sizes() {
        let t = SimpleType::from_sexp(&sexp::parse("(-> (-> o o) o o)").unwrap()).unwrap();
        assert_eq!(t.to_string(), "(-> (-> o o) (-> o o))");
        assert_eq!(t.size(), 7);
        assert_eq!(t.spine(), vec![SimpleType::order(1), o(), o()]);
        assert_eq!(SimpleType::all_up_to(4), vec![o(), SimpleType::order(1)]);
        assert_eq!(SimpleType::all_up_to(5).len(), 4);
    }

    #[test]
    fn closure_is_downward() {
        let ts = TypeSet::new([SimpleType::arrow(SimpleType::order(1), o())]);
        assert_eq!(ts.len(), 3);
        assert_eq!(ts.arrows_by_size()[0].size(), 5);
    }

    #[test]
    fn term_syntax_round_trip() {
        for src in ["x", "(lam x x)", "(app (lam x (out a x _)) (out c))", "(app f (app g x))"] {
            let t = parse_term(src).unwrap();
            assert_eq!(show(&t), src);
        }
        let t = parse_term("(app f a b)").unwrap();
        assert_eq!(show(&t), "(app (app f a) b)");
        assert!(parse_term("(lam x)").is_err());
    }

    #[test]
    fn blue_annotation() {
        let vars = Vars::new([("y", SimpleType::order(1)), ("x", o())]);
        let t = parse_term("(lam y (lam x (app y (app y x))))").unwrap();
        let want = SimpleType::arrow(SimpleType::order(1), SimpleType::order(1));
        assert_eq!(infer_type(&t, &vars).unwrap(), want);
        assert_eq!(word_type(&leftmost_word(&t).unwrap(), &vars, None), Some(want));
        assert!(!is_linear(&t));
    }

    #[test]
    fn typing_errors() {
        let vars = Vars::new([("x", o()), ("y", o())]);
        assert_eq!(infer_type(&parse_term("x").unwrap(), &vars).unwrap(), o());
        assert!(infer_type(&parse_term("(app x y)").unwrap(), &vars).is_err());
        assert!(infer_type(&parse_term("z").unwrap(), &vars).is_err());
        assert!(infer_type(&parse_term("(out a x _)").unwrap(), &vars).is_err());
    }

    #[test]
    fn linearity() {
        assert!(is_linear(&parse_term("(lam x x)").unwrap()));
        assert!(!is_linear(&parse_term("(lam x (app (app y x) x))").unwrap()));
        assert!(is_linear(&parse_term("(lam x (app (app y x) y))").unwrap()));
        assert!(!is_linear(&shadowing_chain(2)));
        assert!(is_linear(&shadowing_chain(1)));
        assert_eq!(free_vars(&parse_term("(app (app y (lam y y)) y)").unwrap()), vec!["y", "y"]);
    }

    #[test]
    fn words() {
        let vars = Vars::new([("x", o()), ("f", SimpleType::order(1)), ("y", o())]);
        let w = |s: &str| leftmost_word(&parse_term(s).unwrap()).unwrap();
        assert_eq!(word_type(&w("x"), &vars, None), Some(o()));
        assert_eq!(word_type(&w("(app f x)"), &vars, None), Some(o()));
        assert_eq!(word_type(&w("(lam y x)"), &vars, None), Some(SimpleType::order(1)));
        assert_eq!(word_type(&w("(app x x)"), &vars, None), None);
        let small = TypeSet::new([o()]);
        assert_eq!(word_type(&w("(lam y x)"), &vars, Some(&small)), None);
    }

    #[test]
    fn typable_within_examples() {
        let vars = Vars::new([("x", o()), ("y", o())]);
        let ts = TypeSet::new([SimpleType::order(1)]);
        assert!(typable_within(&parse_term("(lam x x)").unwrap(), &ts, &vars));
        assert!(!typable_within(&parse_term("(app x x)").unwrap(), &ts, &vars));
        let chain = shadowing_chain(3);
        assert!(!typable_within(&chain, &ts, &vars));
        assert!(typable_within(&chain, &TypeSet::new([SimpleType::order(3)]), &vars));
        let e = exponential(3);
        assert!(typable_within(&e, &TypeSet::new([SimpleType::order(2)]), &exponential_vars()));
    }
}
