//! Pipelines of prime functions glued by composition and by lifting along
//! the datatype constructors, with type inference and an evaluator.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use crate::error::{bail, Error, Result};
use crate::matrix::{self, Mat};
use crate::prime;
use crate::sexp::{Sexp, ToSexp};
use crate::term::{Ranked, Term};
use crate::value::{self, typecheck, Fold, RankedAlphabet, Side, Sym, TypeExpr, Value};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrimeRef {
    Identity,
    Unit,
    Flatten,
    FoldFlatten,
    FactUp,
    FactDown,
    Preorder,
    Untwist,
    IncreaseFold(usize),
    DecreaseFold(usize),
    Raise,
    Filter(Vec<Sym>),
    /// Symbol images; unlisted symbols map to themselves.
    Hom(Vec<(Sym, Term<Sym>)>),
    In1(TypeExpr),
    In2(TypeExpr),
    Distribute,
    FoldSwap,
    Unfold(usize),
    UnfoldMonotone(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pipeline {
    Prime(PrimeRef),
    /// `Compose(f, g)` runs `g` first.
    Compose(Box<Pipeline>, Box<Pipeline>),
    LiftTerm(Box<Pipeline>),
    LiftFold(usize, Box<Pipeline>),
    LiftTensor(Box<Pipeline>, Box<Pipeline>),
    /// `[f, g]`
    Case(Box<Pipeline>, Box<Pipeline>),
    /// `f + g`
    Plus(Box<Pipeline>, Box<Pipeline>),
    FiniteMap { entries: Vec<(Sym, Sym)>, default_identity: bool },
    ToTerminal,
}

impl Pipeline {
    pub fn prime(p: PrimeRef) -> Pipeline {
        Pipeline::Prime(p)
    }

    pub fn compose(f: Pipeline, g: Pipeline) -> Pipeline {
        Pipeline::Compose(Box::new(f), Box::new(g))
    }

    pub fn lift_term(f: Pipeline) -> Pipeline {
        Pipeline::LiftTerm(Box::new(f))
    }

    pub fn lift_fold(k: usize, f: Pipeline) -> Pipeline {
        Pipeline::LiftFold(k, Box::new(f))
    }

    pub fn lift_tensor(f: Pipeline, g: Pipeline) -> Pipeline {
        Pipeline::LiftTensor(Box::new(f), Box::new(g))
    }

    pub fn case(f: Pipeline, g: Pipeline) -> Pipeline {
        Pipeline::Case(Box::new(f), Box::new(g))
    }

    pub fn plus(f: Pipeline, g: Pipeline) -> Pipeline {
        Pipeline::Plus(Box::new(f), Box::new(g))
    }

    pub fn depth(&self) -> usize {
        match self {
            Pipeline::Prime(_) | Pipeline::FiniteMap { .. } | Pipeline::ToTerminal => 1,
            Pipeline::LiftTerm(f) | Pipeline::LiftFold(_, f) => 1 + f.depth(),
            Pipeline::Compose(f, g)
            | Pipeline::LiftTensor(f, g)
            | Pipeline::Case(f, g)
            | Pipeline::Plus(f, g) => 1 + f.depth().max(g.depth()),
        }
    }
}

/// `t ⊗ t ⊗ ... ⊗ t`, `k` factors, nested to the right.
pub fn tensor_power(t: &TypeExpr, k: usize) -> TypeExpr {
    let mut acc = t.clone();
    for _ in 1..k {
        acc = TypeExpr::tensor(t.clone(), acc);
    }
    acc
}

fn untensor(mut t: &TypeExpr, k: usize) -> Option<&TypeExpr> {
    let mut base = None;
    for i in 0..k {
        if i + 1 == k {
            return match base {
                None => Some(t),
                Some(b) if b == t => Some(b),
                Some(_) => None,
            };
        }
        let TypeExpr::Tensor(a, rest) = t else { return None };
        match base {
            None => base = Some(a.as_ref()),
            Some(b) if b == a.as_ref() => {}
            Some(_) => return None,
        }
        t = rest;
    }
    None
}

/// Reads a folded tensor power as a matrix element.
pub fn value_to_mat(v: &Value, k: usize) -> Result<Mat<Value>> {
    let Value::Folded(f) = v else { bail!(Type, "expected a matrix element, found {}", v.kind()) };
    if f.k != k {
        bail!(Type, "expected a {k}-fold, found a {}-fold", f.k);
    }
    let mut tuple = Vec::with_capacity(k);
    let mut cur = &f.payload;
    for _ in 1..k {
        let Value::Pair(a, rest) = cur else { bail!(Type, "matrix element payload is not a {k}-tuple") };
        tuple.push((**a).clone());
        cur = rest;
    }
    tuple.push(cur.clone());
    Mat::new(tuple, f.grouping.clone(), f.outer)
}

pub fn mat_to_value(m: Mat<Value>) -> Value {
    let mut it = m.tuple.into_iter().rev();
    let mut payload = it.next().expect("k >= 1");
    for a in it {
        payload = Value::pair(a, payload);
    }
    Value::Folded(Box::new(Fold { payload, grouping: m.grouping, k: m.k, outer: m.outer }))
}

fn alphabet_of(ty: &TypeExpr, what: &str) -> Result<RankedAlphabet> {
    match ty {
        TypeExpr::TermOf(inner) => match inner.as_ref() {
            TypeExpr::Finite(a) => Ok(a.clone()),
            _ => bail!(Type, "{what} needs terms over a finite alphabet, found {ty}"),
        },
        _ => bail!(Type, "{what} needs terms over a finite alphabet, found {ty}"),
    }
}

fn hom_target(sigma: &RankedAlphabet, map: &[(Sym, Term<Sym>)]) -> Result<RankedAlphabet> {
    let mut syms: Vec<Sym> = Vec::new();
    for s in sigma.symbols() {
        match map.iter().find(|(k, _)| *k == s) {
            Some((_, img)) => syms.extend(img.labels().cloned()),
            None => syms.push(s),
        }
    }
    syms.sort();
    syms.dedup();
    RankedAlphabet::from_syms(&syms)
}

fn infer_prime(p: &PrimeRef, ty: &TypeExpr) -> Result<TypeExpr> {
    use TypeExpr as T;
    let mismatch = |want: &str| Error::Type(format!("prime {} expects {want}, got {ty}", prime_name(p)));
    Ok(match p {
        PrimeRef::Identity => ty.clone(),
        PrimeRef::Unit => T::term(ty.clone()),
        PrimeRef::Flatten => match ty {
            T::TermOf(inner) if matches!(inner.as_ref(), T::TermOf(_)) => (**inner).clone(),
            _ => return Err(mismatch("terms of terms")),
        },
        PrimeRef::FoldFlatten => match ty {
            T::FoldOf(k2, inner) => match inner.as_ref() {
                T::FoldOf(k1, x) => T::fold(k1 * k2, (**x).clone()),
                _ => return Err(mismatch("a double fold")),
            },
            _ => return Err(mismatch("a double fold")),
        },
        PrimeRef::FactUp | PrimeRef::FactDown => match ty {
            T::TermOf(inner) => match inner.as_ref() {
                T::Coproduct(a, b) => T::term(T::coproduct(T::term((**a).clone()), T::term((**b).clone()))),
                _ => return Err(mismatch("terms over a coproduct")),
            },
            _ => return Err(mismatch("terms over a coproduct")),
        },
        PrimeRef::Preorder => {
            let a = alphabet_of(ty, "preorder")?;
            if a.arity_of(prime::PRE0).is_some() || a.arity_of(prime::PRE2).is_some() {
                bail!(Type, "preorder input uses the reserved symbols {} / {}", prime::PRE0, prime::PRE2);
            }
            let gray = RankedAlphabet::new([(prime::PRE0.to_string(), 0), (prime::PRE2.to_string(), 2)])?;
            T::fold(1, T::term(T::Finite(a.union(&gray)?)))
        }
        PrimeRef::Untwist => match ty {
            T::TermOf(inner) => match inner.as_ref() {
                T::FoldOf(1, x) => T::fold(1, T::term((**x).clone())),
                _ => return Err(mismatch("terms over a 1-fold")),
            },
            _ => return Err(mismatch("terms over a 1-fold")),
        },
        PrimeRef::IncreaseFold(k) => match ty {
            T::FoldOf(m, x) if m <= k => T::fold(*k, (**x).clone()),
            _ => return Err(mismatch(&format!("an m-fold with m <= {k}"))),
        },
        PrimeRef::DecreaseFold(m) => match ty {
            T::FoldOf(_, x) => T::fold(*m, (**x).clone()),
            _ => return Err(mismatch("a fold")),
        },
        PrimeRef::Raise => {
            let strip = |t: &T| -> Result<T> {
                match t {
                    T::Coproduct(a, b) if **b == T::Terminal => Ok((**a).clone()),
                    _ => Err(mismatch("components of the form S + top")),
                }
            };
            let inner = match ty {
                T::TermOf(x) => T::term(strip(x)?),
                T::Tensor(a, b) => T::tensor(strip(a)?, strip(b)?),
                T::FoldOf(k, x) => T::fold(*k, strip(x)?),
                _ => return Err(mismatch("a term, pair or fold")),
            };
            T::coproduct(inner, T::Terminal)
        }
        PrimeRef::Filter(erase) => {
            let a = alphabet_of(ty, "filter")?;
            let keep: Vec<Sym> = a.symbols().filter(|s| !erase.contains(s)).collect();
            T::term(T::Finite(RankedAlphabet::from_syms(&keep)?))
        }
        PrimeRef::Hom(map) => {
            let a = alphabet_of(ty, "hom")?;
            T::term(T::Finite(hom_target(&a, map)?))
        }
        PrimeRef::In1(other) => T::coproduct(ty.clone(), other.clone()),
        PrimeRef::In2(other) => T::coproduct(other.clone(), ty.clone()),
        PrimeRef::Distribute => match ty {
            T::Tensor(l, c) => match l.as_ref() {
                T::Coproduct(a, b) => T::coproduct(
                    T::tensor((**a).clone(), (**c).clone()),
                    T::tensor((**b).clone(), (**c).clone()),
                ),
                _ => return Err(mismatch("(A + B) ⊗ C")),
            },
            _ => return Err(mismatch("(A + B) ⊗ C")),
        },
        PrimeRef::FoldSwap => match ty {
            T::FoldOf(k, x) => match x.as_ref() {
                T::Tensor(a, b) => T::fold(*k, T::tensor((**b).clone(), (**a).clone())),
                _ => return Err(mismatch("a folded pair")),
            },
            _ => return Err(mismatch("a folded pair")),
        },
        PrimeRef::Unfold(k) | PrimeRef::UnfoldMonotone(k) => {
            let T::TermOf(inner) = ty else { return Err(mismatch("terms over a matrix power")) };
            let T::FoldOf(kk, pow) = inner.as_ref() else { return Err(mismatch("terms over a matrix power")) };
            let base = untensor(pow, *k).filter(|_| kk == k).ok_or_else(|| mismatch("terms over a matrix power"))?;
            T::fold(*k, tensor_power(&T::term(base.clone()), *k))
        }
    })
}

/// Output type of `p` on inputs of type `input`.
pub fn infer(p: &Pipeline, input: &TypeExpr) -> Result<TypeExpr> {
    use TypeExpr as T;
    let ctx = |e: Error| match e {
        Error::Type(m) => Error::Type(format!("{m}\n  in {}", short(p))),
        other => other,
    };
    match p {
        Pipeline::Prime(q) => infer_prime(q, input).map_err(ctx),
        Pipeline::Compose(f, g) => infer(f, &infer(g, input)?),
        Pipeline::LiftTerm(f) => match input {
            T::TermOf(x) => Ok(T::term(infer(f, x)?)),
            _ => Err(ctx(Error::Type(format!("lift-term expects terms, got {input}")))),
        },
        Pipeline::LiftFold(k, f) => match input {
            T::FoldOf(m, x) if m == k => Ok(T::fold(*k, infer(f, x)?)),
            _ => Err(ctx(Error::Type(format!("lift-fold {k} expects a {k}-fold, got {input}")))),
        },
        Pipeline::LiftTensor(f, g) => match input {
            T::Tensor(a, b) => Ok(T::tensor(infer(f, a)?, infer(g, b)?)),
            _ => Err(ctx(Error::Type(format!("lift-tensor expects a pair type, got {input}")))),
        },
        Pipeline::Case(f, g) => match input {
            T::Coproduct(a, b) => {
                let (x, y) = (infer(f, a)?, infer(g, b)?);
                if x != y {
                    return Err(ctx(Error::Type(format!("case branches disagree: {x} vs {y}"))));
                }
                Ok(x)
            }
            _ => Err(ctx(Error::Type(format!("case expects a coproduct, got {input}")))),
        },
        Pipeline::Plus(f, g) => match input {
            T::Coproduct(a, b) => Ok(T::coproduct(infer(f, a)?, infer(g, b)?)),
            _ => Err(ctx(Error::Type(format!("plus expects a coproduct, got {input}")))),
        },
        Pipeline::FiniteMap { entries, default_identity } => {
            let T::Finite(a) = input else {
                return Err(ctx(Error::Type(format!("finite-map expects a finite alphabet, got {input}"))));
            };
            let mut out: Vec<Sym> = Vec::new();
            for s in a.symbols() {
                match entries.iter().find(|(k, _)| *k == s) {
                    Some((_, v)) => out.push(v.clone()),
                    None if *default_identity => out.push(s),
                    None => return Err(ctx(Error::Type(format!("finite-map has no entry for `{s}`")))),
                }
            }
            out.sort();
            out.dedup();
            Ok(T::Finite(RankedAlphabet::from_syms(&out).map_err(ctx)?))
        }
        Pipeline::ToTerminal => Ok(T::Terminal),
    }
}

fn short(p: &Pipeline) -> String {
    let s = p.to_sexp().to_string();
    if s.len() > 60 {
        format!("{}...", &s[..s.char_indices().take_while(|(i, _)| *i < 57).last().map_or(0, |(i, c)| i + c.len_utf8())])
    } else {
        s
    }
}

fn eval_prime(p: &PrimeRef, v: &Value) -> Result<Value> {
    Ok(match p {
        PrimeRef::Identity => v.clone(),
        PrimeRef::Unit => value::unit(v.clone()),
        PrimeRef::Flatten => value::flatten(v)?,
        PrimeRef::FoldFlatten => value::fold_flatten(v)?,
        PrimeRef::FactUp => prime::fact_up_value(v)?,
        PrimeRef::FactDown => prime::fact_down_value(v)?,
        PrimeRef::Preorder => {
            let f = prime::preorder_sym(&v.to_sym_term()?);
            Value::Folded(Box::new(f.map(|t| Value::from_sym_term(&t))))
        }
        PrimeRef::Untwist => {
            let t = v.as_term()?.try_map(|l| match l {
                Value::Folded(f) => Ok((**f).clone()),
                other => bail!(Type, "untwist needs folded labels, found {}", other.kind()),
            })?;
            Value::Folded(Box::new(prime::untwist(&t)?.map(Value::Term)))
        }
        PrimeRef::IncreaseFold(k) => match v {
            Value::Folded(f) => Value::Folded(Box::new(prime::increase_fold((**f).clone(), *k)?)),
            _ => bail!(Type, "increase-fold needs a fold"),
        },
        PrimeRef::DecreaseFold(m) => match v {
            Value::Folded(f) => Value::Folded(Box::new(prime::decrease_fold((**f).clone(), *m)?)),
            _ => bail!(Type, "decrease-fold needs a fold"),
        },
        PrimeRef::Raise => prime::raise(v)?,
        PrimeRef::Filter(erase) => {
            let erase: HashSet<Sym> = erase.iter().cloned().collect();
            Value::from_sym_term(&prime::filter_unary(&v.to_sym_term()?, &erase)?)
        }
        PrimeRef::Hom(map) => {
            let table: BTreeMap<&Sym, &Term<Sym>> = map.iter().map(|(k, t)| (k, t)).collect();
            let t = prime::homomorphism(&v.to_sym_term()?, |s| {
                Ok(table.get(s).map_or_else(|| Term::unit(s.clone()), |t| (*t).clone()))
            })?;
            Value::from_sym_term(&t)
        }
        PrimeRef::In1(_) => prime::coproj(Side::First, v.clone()),
        PrimeRef::In2(_) => prime::coproj(Side::Second, v.clone()),
        PrimeRef::Distribute => prime::distribute(v)?,
        PrimeRef::FoldSwap => prime::fold_tensor_swap(v)?,
        PrimeRef::Unfold(k) | PrimeRef::UnfoldMonotone(k) => {
            let t = v.as_term()?.try_map(|l| value_to_mat(l, *k))?;
            let m = if matches!(p, PrimeRef::Unfold(_)) {
                matrix::unfold_general(*k, &t)?
            } else {
                matrix::unfold_monotone(*k, &t)?
            };
            mat_to_value(m.map(Value::Term))
        }
    })
}

/// Evaluates `p` on `v`. Type errors surface as [`Error::Type`].
pub fn eval(p: &Pipeline, v: &Value) -> Result<Value> {
    match p {
        Pipeline::Prime(q) => eval_prime(q, v),
        Pipeline::Compose(f, g) => eval(f, &eval(g, v)?),
        Pipeline::LiftTerm(f) => Ok(Value::Term(v.as_term()?.try_map(|l| eval(f, l))?)),
        Pipeline::LiftFold(k, f) => match v {
            Value::Folded(x) if x.k == *k => {
                let payload = eval(f, &x.payload)?;
                if payload.arity() != x.payload.arity() {
                    bail!(Arity, "lift-fold body changed arity");
                }
                Ok(Value::Folded(Box::new(Fold { payload, ..(**x).clone() })))
            }
            _ => bail!(Type, "lift-fold {k} needs a {k}-fold, found {}", v.kind()),
        },
        Pipeline::LiftTensor(f, g) => match v {
            Value::Pair(a, b) => {
                let (x, y) = (eval(f, a)?, eval(g, b)?);
                if x.arity() != a.arity() || y.arity() != b.arity() {
                    bail!(Arity, "lift-tensor component changed arity");
                }
                Ok(Value::pair(x, y))
            }
            _ => bail!(Type, "lift-tensor needs a pair, found {}", v.kind()),
        },
        Pipeline::Case(f, g) => prime::case_of(v, |x| eval(f, x), |x| eval(g, x)),
        Pipeline::Plus(f, g) => prime::plus_lift(v, |x| eval(f, x), |x| eval(g, x)),
        Pipeline::FiniteMap { entries, default_identity } => {
            let Value::Sym(s) = v else { bail!(Type, "finite-map needs a symbol, found {}", v.kind()) };
            match entries.iter().find(|(k, _)| k == s) {
                Some((_, out)) => Ok(Value::Sym(out.clone())),
                None if *default_identity => Ok(v.clone()),
                None => bail!(Type, "finite-map has no entry for `{s}`"),
            }
        }
        Pipeline::ToTerminal => Ok(Value::Top(v.arity())),
    }
}

/// Reads a result in `S + top` as a partial function: the second branch
/// becomes [`Error::Undefined`].
pub fn eval_partial(p: &Pipeline, v: &Value) -> Result<Value> {
    match eval(p, v)? {
        Value::Inj(Side::First, x) => Ok(*x),
        Value::Inj(Side::Second, _) => bail!(Undefined, "pipeline produced the error element"),
        other => bail!(Type, "partial evaluation needs a coproduct result, found {}", other.kind()),
    }
}

/// Static checks; an empty list means the pipeline is well-formed.
pub fn validate(p: &Pipeline) -> Vec<String> {
    let mut out = Vec::new();
    let mut stack = vec![p];
    while let Some(p) = stack.pop() {
        match p {
            Pipeline::Prime(q) => match q {
                PrimeRef::IncreaseFold(0) | PrimeRef::DecreaseFold(0) | PrimeRef::Unfold(0) | PrimeRef::UnfoldMonotone(0) => {
                    out.push(format!("{}: fold index must be positive", prime_name(q)))
                }
                PrimeRef::Filter(syms) => {
                    for s in syms.iter().filter(|s| s.arity != 1) {
                        out.push(format!("filter: `{s}` has arity {}, only unary symbols can be erased", s.arity));
                    }
                }
                PrimeRef::Hom(map) => {
                    for (s, img) in map {
                        if img.arity() != s.arity {
                            out.push(format!("hom: image of `{s}` has {} ports, expected {}", img.arity(), s.arity));
                        }
                    }
                }
                _ => {}
            },
            Pipeline::LiftFold(k, f) => {
                if *k == 0 {
                    out.push("lift-fold: fold index must be positive".into());
                }
                stack.push(f);
            }
            Pipeline::LiftTerm(f) => stack.push(f),
            Pipeline::Compose(f, g) | Pipeline::LiftTensor(f, g) | Pipeline::Case(f, g) | Pipeline::Plus(f, g) => {
                stack.push(g);
                stack.push(f);
            }
            Pipeline::FiniteMap { entries, .. } => {
                let mut seen = HashSet::new();
                for (a, b) in entries {
                    if a.arity != b.arity {
                        out.push(format!("finite-map: `{a}` has arity {} but `{b}` has arity {}", a.arity, b.arity));
                    }
                    if !seen.insert(a) {
                        out.push(format!("finite-map: `{a}` listed twice"));
                    }
                }
            }
            Pipeline::ToTerminal => {}
        }
    }
    out
}

pub fn prime_name(p: &PrimeRef) -> &'static str {
    match p {
        PrimeRef::Identity => "id",
        PrimeRef::Unit => "unit",
        PrimeRef::Flatten => "flatten",
        PrimeRef::FoldFlatten => "fold-flatten",
        PrimeRef::FactUp => "fact-up",
        PrimeRef::FactDown => "fact-down",
        PrimeRef::Preorder => "preorder",
        PrimeRef::Untwist => "untwist",
        PrimeRef::IncreaseFold(_) => "increase-fold",
        PrimeRef::DecreaseFold(_) => "decrease-fold",
        PrimeRef::Raise => "raise",
        PrimeRef::Filter(_) => "filter",
        PrimeRef::Hom(_) => "hom",
        PrimeRef::In1(_) => "in1",
        PrimeRef::In2(_) => "in2",
        PrimeRef::Distribute => "distribute",
        PrimeRef::FoldSwap => "fold-swap",
        PrimeRef::Unfold(_) => "unfold",
        PrimeRef::UnfoldMonotone(_) => "unfold-monotone",
    }
}

impl ToSexp for PrimeRef {
    fn to_sexp(&self) -> Sexp {
        let mut items = vec![Sexp::atom("prime"), Sexp::atom(prime_name(self))];
        match self {
            PrimeRef::IncreaseFold(k) | PrimeRef::DecreaseFold(k) | PrimeRef::Unfold(k) | PrimeRef::UnfoldMonotone(k) => {
                items.push(Sexp::atom(k.to_string()))
            }
            PrimeRef::Filter(syms) => items.extend(syms.iter().map(|s| Sexp::atom(s.name.clone()))),
            PrimeRef::Hom(map) => {
                items.extend(map.iter().map(|(s, t)| Sexp::list(vec![Sexp::atom(s.name.clone()), t.to_sexp()])))
            }
            PrimeRef::In1(t) | PrimeRef::In2(t) => items.push(t.to_sexp()),
            _ => {}
        }
        Sexp::list(items)
    }
}

impl ToSexp for Pipeline {
    fn to_sexp(&self) -> Sexp {
        let l = |tag: &str, rest: Vec<Sexp>| {
            let mut v = vec![Sexp::atom(tag)];
            v.extend(rest);
            Sexp::list(v)
        };
        match self {
            Pipeline::Prime(p) => p.to_sexp(),
            Pipeline::Compose(f, g) => l("compose", vec![f.to_sexp(), g.to_sexp()]),
            Pipeline::LiftTerm(f) => l("lift-term", vec![f.to_sexp()]),
            Pipeline::LiftFold(k, f) => l("lift-fold", vec![Sexp::atom(k.to_string()), f.to_sexp()]),
            Pipeline::LiftTensor(f, g) => l("lift-tensor", vec![f.to_sexp(), g.to_sexp()]),
            Pipeline::Case(f, g) => l("case", vec![f.to_sexp(), g.to_sexp()]),
            Pipeline::Plus(f, g) => l("plus", vec![f.to_sexp(), g.to_sexp()]),
            Pipeline::FiniteMap { entries, default_identity } => {
                let mut rest = vec![Sexp::list(
                    entries
                        .iter()
                        .map(|(a, b)| Sexp::list(vec![Sexp::atom(a.name.clone()), Sexp::atom(b.name.clone())]))
                        .collect(),
                )];
                if !default_identity {
                    rest.push(Sexp::atom("strict"));
                }
                l("finite-map", rest)
            }
            Pipeline::ToTerminal => l("to-terminal", vec![]),
        }
    }
}

impl fmt::Display for Pipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sexp())
    }
}

/// Reads the pipeline syntax. Symbol names are resolved in `symbols`.
pub fn parse_pipeline(s: &Sexp, symbols: &RankedAlphabet) -> Result<Pipeline> {
    let items = s.expect_list("a pipeline")?;
    let arg = |i: usize| items.get(i).ok_or_else(|| s.error("missing argument"));
    let sub = |i: usize| -> Result<Box<Pipeline>> { Ok(Box::new(parse_pipeline(arg(i)?, symbols)?)) };
    let sym = |x: &Sexp| -> Result<Sym> {
        symbols.sym(x.expect_atom("a symbol")?).map_err(|e| x.error(e.to_string()))
    };
    match s.head() {
        Some("compose") => {
            if items.len() < 2 {
                return Err(s.error("compose needs at least one stage"));
            }
            let mut stages = items[1..].iter().rev().map(|x| parse_pipeline(x, symbols));
            let mut acc = stages.next().unwrap()?;
            for f in stages {
                acc = Pipeline::compose(f?, acc);
            }
            Ok(acc)
        }
        Some("lift-term") => Ok(Pipeline::LiftTerm(sub(1)?)),
        Some("lift-fold") => Ok(Pipeline::LiftFold(arg(1)?.expect_usize("k")?, sub(2)?)),
        Some("lift-tensor") => Ok(Pipeline::LiftTensor(sub(1)?, sub(2)?)),
        Some("case") => Ok(Pipeline::Case(sub(1)?, sub(2)?)),
        Some("plus") => Ok(Pipeline::Plus(sub(1)?, sub(2)?)),
        Some("to-terminal") => Ok(Pipeline::ToTerminal),
        Some("finite-map") => {
            let mut entries = Vec::new();
            for e in arg(1)?.expect_list("finite-map entries")? {
                match e.expect_list("(in out)")? {
                    [a, b] => entries.push((sym(a)?, sym(b)?)),
                    _ => return Err(e.error("expected (in out)")),
                }
            }
            let default_identity = match items.get(2).map(|x| x.as_atom()) {
                None => true,
                Some(Some("strict")) => false,
                Some(_) => return Err(items[2].error("expected `strict`")),
            };
            Ok(Pipeline::FiniteMap { entries, default_identity })
        }
        Some("prime") => {
            let name = arg(1)?.expect_atom("a prime name")?;
            let num = |i: usize| arg(i).and_then(|x| x.expect_usize("a fold index"));
            let p = match name {
                "id" => PrimeRef::Identity,
                "unit" => PrimeRef::Unit,
                "flatten" => PrimeRef::Flatten,
                "fold-flatten" => PrimeRef::FoldFlatten,
                "fact-up" => PrimeRef::FactUp,
                "fact-down" => PrimeRef::FactDown,
                "preorder" => PrimeRef::Preorder,
                "untwist" => PrimeRef::Untwist,
                "increase-fold" => PrimeRef::IncreaseFold(num(2)?),
                "decrease-fold" => PrimeRef::DecreaseFold(num(2)?),
                "raise" => PrimeRef::Raise,
                "filter" => PrimeRef::Filter(items[2..].iter().map(sym).collect::<Result<_>>()?),
                "hom" => {
                    let mut map = Vec::new();
                    for e in &items[2..] {
                        match e.expect_list("(symbol image)")? {
                            [a, img] => map.push((sym(a)?, symbols.term_from_sexp(img)?)),
                            _ => return Err(e.error("expected (symbol image)")),
                        }
                    }
                    PrimeRef::Hom(map)
                }
                "in1" => PrimeRef::In1(TypeExpr::from_sexp(arg(2)?)?),
                "in2" => PrimeRef::In2(TypeExpr::from_sexp(arg(2)?)?),
                "distribute" => PrimeRef::Distribute,
                "fold-swap" => PrimeRef::FoldSwap,
                "unfold" => PrimeRef::Unfold(num(2)?),
                "unfold-monotone" => PrimeRef::UnfoldMonotone(num(2)?),
                other => return Err(arg(1)?.error(format!("unknown prime `{other}`"))),
            };
            Ok(Pipeline::Prime(p))
        }
        _ => Err(s.error("unknown pipeline form")),
    }
}

/// Every finite alphabet mentioned in `ty`, merged.
pub fn symbols_of(ty: &TypeExpr) -> Result<RankedAlphabet> {
    let mut acc = RankedAlphabet::default();
    let mut stack = vec![ty];
    while let Some(t) = stack.pop() {
        match t {
            TypeExpr::Finite(a) => acc = acc.union(a)?,
            TypeExpr::Terminal => {}
            TypeExpr::TermOf(x) | TypeExpr::FoldOf(_, x) => stack.push(x),
            TypeExpr::Tensor(a, b) | TypeExpr::Coproduct(a, b) => {
                stack.push(a);
                stack.push(b);
            }
        }
    }
    Ok(acc)
}

/// Infers, checks the input, evaluates and checks the output.
pub fn run_checked(p: &Pipeline, ty: &TypeExpr, v: &Value) -> Result<(Value, TypeExpr)> {
    let issues = validate(p);
    if !issues.is_empty() {
        bail!(Validation, "{}", issues.join("; "));
    }
    let out_ty = infer(p, ty)?;
    if !typecheck(v, ty) {
        bail!(Type, "input does not have type {ty}");
    }
    let out = eval(p, v)?;
    if !typecheck(&out, &out_ty) {
        bail!(Type, "internal: output does not have the inferred type {out_ty}");
    }
    Ok((out, out_ty))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma() -> TypeExpr {
        TypeExpr::finite(&[("a", 2), ("b", 1), ("c", 0)])
    }

    #[test]
    fn infer_examples() {
        let ts = TypeExpr::term(sigma());
        let lu = Pipeline::lift_term(Pipeline::prime(PrimeRef::Unit));
        assert_eq!(infer(&lu, &ts).unwrap(), TypeExpr::term(ts.clone()));
        let id = Pipeline::compose(Pipeline::prime(PrimeRef::Flatten), lu.clone());
        assert_eq!(infer(&id, &ts).unwrap(), ts);
        let lt = Pipeline::lift_tensor(Pipeline::ToTerminal, Pipeline::ToTerminal);
        assert!(infer(&lt, &ts).is_err());
    }

    #[test]
    fn eval_examples() {
        let ty = TypeExpr::term(sigma());
        let t = value::deserialize("(a (b c) _)", &ty).unwrap();
        assert_eq!(eval(&Pipeline::ToTerminal, &t).unwrap(), Value::Top(1));
        let id = Pipeline::compose(Pipeline::prime(PrimeRef::Flatten), Pipeline::lift_term(Pipeline::prime(PrimeRef::Unit)));
        assert_eq!(eval(&id, &t).unwrap(), t);
        let m = Pipeline::FiniteMap { entries: vec![(Sym::new("a", 2), Sym::new("b", 2))], default_identity: true };
        assert_eq!(eval(&m, &Value::sym("a", 2)).unwrap(), Value::sym("b", 2));
        assert_eq!(eval(&m, &Value::sym("c", 0)).unwrap(), Value::sym("c", 0));
    }

    #[test]
    fn validate_examples() {
        let bad = Pipeline::FiniteMap { entries: vec![(Sym::new("a", 2), Sym::new("b", 1))], default_identity: true };
        assert_eq!(validate(&bad).len(), 1);
        assert!(validate(&Pipeline::prime(PrimeRef::Unit)).is_empty());
        assert_eq!(validate(&Pipeline::lift_fold(0, Pipeline::ToTerminal)).len(), 1);
    }

    #[test]
    fn parse_and_print() {
        let symbols = symbols_of(&sigma()).unwrap();
        let text = "(compose (prime flatten) (lift-term (prime unit)) (finite-map ((a a) (b b)) strict))";
        let p = parse_pipeline(&crate::sexp::parse(text).unwrap(), &symbols).unwrap();
        assert_eq!(p.to_string(), "(compose (prime flatten) (compose (lift-term (prime unit)) (finite-map ((a a) (b b)) strict)))");
    }

    #[test]
    fn unfold_prime_matches_matrix() {
        let sym = TypeExpr::finite(&[("a", 1), ("black", 0), ("white", 0)]);
        let ty = TypeExpr::term(TypeExpr::fold(2, tensor_power(&sym, 2)));
        let v = value::deserialize(
            "((fold 2 1 ((1 1 2) (2 1 1)) (pair a a)) ((fold 2 0 () (pair black white))))",
            &ty,
        )
        .unwrap();
        let (out, _) = run_checked(&Pipeline::prime(PrimeRef::Unfold(2)), &ty, &v).unwrap();
        assert_eq!(out.to_string(), "(fold 2 0 () (pair (a white) (a black)))");
        assert!(eval(&Pipeline::prime(PrimeRef::UnfoldMonotone(2)), &v).unwrap_err().is_undefined());
    }
}
