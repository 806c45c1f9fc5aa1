//! Oracle suites: each property is checked against a brute-force or
//! independently written reference on seeded random inputs.
//!
//! The same suites back the `selftest` command (scaled down) and the
//! acceptance runner (full counts).

use std::collections::BTreeSet;

use rand::Rng;

use crate::factforest::{factorise, is_hereditarily_homogeneous, FiniteMonoid};
use crate::gen::{self, Rand, TwistDomain};
use crate::lambda::{self, Lam, LambdaTerm, SimpleType, TypeSet, Vars};
use crate::matrix::{unfold_general, unfold_monotone, Mat, Twist};
use crate::prime::{fact_down, fact_up, factorize_by, preorder_sym, spine_labels, PRE0, PRE2};
use crate::relabel::{char_child, char_since, char_until, names, untag, Names};
use crate::term::{Ranked, Slot, Term};
use crate::transducer;
use crate::unfold_decomp::{unfold_alpha_homogeneous, unfold_constant_twist, unfold_homogeneous, unfold_monotone_decomposed};
use crate::value::{self, Fold, Grouping, Side, Sym, Value};

/// How much work a suite does.
#[derive(Clone, Debug)]
pub struct Budget {
    pub seed: u64,
    /// Random case counts are divided by this.
    pub divisor: usize,
    /// Cap on random input sizes.
    pub max_size: usize,
    /// Longest word in the exhaustive automaton check.
    pub word_len: usize,
    /// Largest tree in the exhaustive relabelling check.
    pub tree_size: usize,
}

impl Budget {
    pub fn full(seed: u64) -> Budget {
        Budget { seed, divisor: 1, max_size: usize::MAX, word_len: 6, tree_size: 9 }
    }

    pub fn quick(seed: u64, max_size: usize) -> Budget {
        Budget { seed, divisor: 5, max_size, word_len: 5, tree_size: 7 }
    }

    fn cases(&self, n: usize) -> usize {
        (n / self.divisor).max(10)
    }

    fn size(&self, n: usize) -> usize {
        n.min(self.max_size).max(4)
    }

    fn rng(&self, salt: u64) -> Rand {
        gen::rng(self.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ salt)
    }
}

pub type Outcome = Result<String, String>;

pub struct Suite {
    pub name: &'static str,
    pub run: fn(&Budget) -> Outcome,
}

pub fn suites() -> Vec<Suite> {
    vec![
        Suite { name: "monad-laws", run: monad_laws },
        Suite { name: "factorisation-laws", run: factorisation_laws },
        Suite { name: "preorder", run: preorder_contract },
        Suite { name: "unfolding", run: unfolding_equivalence },
        Suite { name: "parity", run: parity_witness },
        Suite { name: "factorisation-forests", run: factorisation_forests },
        Suite { name: "type-automata", run: type_automata },
        Suite { name: "lambda-normalisation", run: lambda_normalisation },
        Suite { name: "thin-preorder", run: thin_preorder },
        Suite { name: "transducer-routes", run: transducer_routes },
        Suite { name: "relabel-oracles", run: relabel_oracles },
    ]
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)*) => {
        if !$cond {
            return Err(format!($($fmt)*));
        }
    };
}

fn syms() -> Vec<Sym> {
    vec![Sym::new("a", 2), Sym::new("b", 1), Sym::new("c", 0)]
}

fn random_term(rng: &mut Rand, max: usize, port_prob: f64) -> Term<Sym> {
    let n = rng.gen_range(1..=max);
    gen::term(rng, &syms(), n, port_prob)
}

/// Cuts each edge with probability one half.
fn random_factorisation<L: Ranked + Clone>(rng: &mut Rand, t: &Term<L>) -> Term<Term<L>> {
    factorize_by(t, |_, _| rng.gen_bool(0.5))
}

/// A random injective grouping of `n` ports.
fn random_fold<T: Ranked>(rng: &mut Rand, payload: T) -> Fold<T> {
    let n = payload.arity();
    let k = rng.gen_range(1..=3);
    let outer = rng.gen_range(n.div_ceil(k).max(1)..=n + 1);
    let mut cells: Vec<(usize, usize)> = (1..=outer).flat_map(|o| (1..=k).map(move |s| (o, s))).collect();
    let mut map = Vec::with_capacity(n);
    for _ in 0..n {
        let i = rng.gen_range(0..cells.len());
        map.push(cells.swap_remove(i));
    }
    Fold { payload, grouping: Grouping::from_vec_unchecked(map), k, outer }
}

pub fn monad_laws(b: &Budget) -> Outcome {
    let mut rng = b.rng(1);
    let n = b.cases(1000);
    let size = b.size(200);
    for case in 0..n {
        let t = random_term(&mut rng, size, 0.1);
        ensure!(Term::flatten(&Term::unit(t.clone())) == t, "case {case}: left unit on {t}");
        ensure!(Term::flatten(&t.lift_unit()) == t, "case {case}: right unit on {t}");
        let tt = random_factorisation(&mut rng, &t);
        let ttt = random_factorisation(&mut rng, &tt);
        let outer_first = Term::flatten(&Term::flatten(&ttt));
        let inner_first = Term::flatten(&ttt.map(Term::flatten));
        ensure!(outer_first == inner_first && inner_first == t, "case {case}: associativity on {t}");
        let v = Value::from_sym_term(&t);
        ensure!(value::flatten(&value::unit(v.clone())).ok() == Some(v), "case {case}: value unit");

        let f1 = random_fold(&mut rng, t.clone());
        ensure!(f1.validate().is_ok(), "case {case}: generated fold is invalid");
        let id_outer = Fold { payload: f1.clone(), grouping: Grouping::identity(f1.outer), k: 1, outer: f1.outer };
        ensure!(id_outer.flatten() == f1, "case {case}: fold left unit");
        let id_inner = Fold { payload: Fold::trivial(t.clone()), grouping: f1.grouping.clone(), k: f1.k, outer: f1.outer };
        ensure!(id_inner.flatten() == f1, "case {case}: fold right unit");
        let f2 = random_fold(&mut rng, f1.clone());
        let f3 = random_fold(&mut rng, f2.clone());
        let a = Fold { payload: f3.payload.clone().flatten(), grouping: f3.grouping.clone(), k: f3.k, outer: f3.outer }.flatten();
        let c = f3.clone().flatten().flatten();
        ensure!(a == c && a.validate().is_ok(), "case {case}: fold associativity");
        let fv = Value::folded(Value::folded(Value::Term(t.map(|s| Value::sym(s.name.clone(), s.arity))), f2.payload.grouping.clone(), f2.payload.k, f2.payload.outer).map_err(|e| e.to_string())?, f2.grouping.clone(), f2.k, f2.outer).map_err(|e| e.to_string())?;
        let flat = f2.clone().flatten();
        let want = Value::folded(Value::Term(t.map(|s| Value::sym(s.name.clone(), s.arity))), flat.grouping, flat.k, flat.outer).map_err(|e| e.to_string())?;
        ensure!(value::fold_flatten(&fv).ok() == Some(want), "case {case}: value fold-flatten");
    }
    Ok(format!("{n} terms"))
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Tagged {
    side: Side,
    pos: usize,
    arity: usize,
}

impl Ranked for Tagged {
    fn arity(&self) -> usize {
        self.arity
    }
}

fn factor_ids(tt: &Term<Term<Tagged>>, len: usize) -> Vec<Option<usize>> {
    let mut ids = vec![None; len];
    for (f, factor) in tt.labels().enumerate() {
        for l in factor.labels() {
            ids[l.pos] = Some(f);
        }
    }
    ids
}

pub fn factorisation_laws(b: &Budget) -> Outcome {
    let mut rng = b.rng(2);
    let n = b.cases(500);
    let size = b.size(120);
    for case in 0..n {
        let t = random_term(&mut rng, size, 0.1);
        let mut pos = t.node_positions().into_iter();
        let sides: Vec<Side> = (0..t.len()).map(|_| if rng.gen_bool(0.5) { Side::First } else { Side::Second }).collect();
        let tagged: Term<Tagged> = t.map(|s| {
            let p = pos.next().unwrap();
            Tagged { side: sides[p], pos: p, arity: s.arity }
        });
        let up = fact_up(&tagged, |l| l.side);
        let down = fact_down(&tagged, |l| l.side);
        ensure!(Term::flatten(&up) == tagged, "case {case}: flatten after fact_up");
        ensure!(Term::flatten(&down) == tagged, "case {case}: flatten after fact_down");
        for tt in [&up, &down] {
            ensure!(tt.labels().all(|f| f.labels().all(|l| l.side == f.root().unwrap().side)), "case {case}: mixed factor");
        }
        let (iu, id) = (factor_ids(&up, t.len()), factor_ids(&down, t.len()));
        for (c, p) in t.parents().iter().enumerate() {
            if let (Some((p, _)), Slot::Node(_)) = (p, &t.slots()[c]) {
                ensure!(id[*p] != id[c] || iu[*p] == iu[c], "case {case}: fact_down does not refine fact_up");
            }
        }
    }
    Ok(format!("{n} two-sided terms"))
}

/// Spine built by recursion on the input: one `pre2` per node in
/// pre-order, its left child the node's symbol over `pre0` or ports.
fn preorder_oracle(t: &Term<Sym>) -> (Term<Sym>, Vec<usize>, Vec<Sym>) {
    fn visit(t: &Term<Sym>, ends: &[usize], ports_before: &[usize], p: usize, units: &mut Vec<(Term<Sym>, Vec<usize>)>) {
        let Slot::Node(l) = &t.slots()[p] else { return };
        let kids = t.children_of(p, ends);
        let mut ports = Vec::new();
        let parts = kids
            .iter()
            .map(|&c| match t.slots()[c] {
                Slot::Port => {
                    ports.push(ports_before[c] + 1);
                    Term::port()
                }
                Slot::Node(_) => Term::unit(Sym::new(PRE0, 0)),
            })
            .collect();
        units.push((Term::node(l.clone(), parts), ports));
        for c in kids {
            visit(t, ends, ports_before, c, units);
        }
    }
    let mut units = Vec::new();
    visit(t, &t.ends(), &t.ports_before(), 0, &mut units);
    let labels = units.iter().map(|u| u.0.root().unwrap().clone()).collect();
    let ports = units.iter().flat_map(|u| u.1.clone()).collect();
    let mut spine = Term::unit(Sym::new(PRE0, 0));
    for (u, _) in units.into_iter().rev() {
        spine = Term::node(Sym::new(PRE2, 2), vec![u, spine]);
    }
    (spine, ports, labels)
}

pub fn preorder_contract(b: &Budget) -> Outcome {
    let mut rng = b.rng(3);
    let n = b.cases(500);
    let size = b.size(150);
    for case in 0..n {
        let t = random_term(&mut rng, size, 0.2);
        if t.is_port() {
            continue;
        }
        let f = preorder_sym(&t);
        let (spine, ports, labels) = preorder_oracle(&t);
        ensure!(f.payload == spine, "case {case}: spine differs on {t}");
        ensure!(f.k == 1 && f.outer == t.arity(), "case {case}: fold shape");
        let g: Vec<(usize, usize)> = ports.iter().map(|&p| (p, 1)).collect();
        ensure!(f.grouping.as_slice() == g.as_slice(), "case {case}: grouping");
        let mut sorted = ports.clone();
        sorted.sort_unstable();
        ensure!(sorted == (1..=t.arity()).collect::<Vec<_>>(), "case {case}: grouping is not a bijection");
        ensure!(spine_labels(&f.payload, &Sym::new(PRE0, 0), &Sym::new(PRE2, 2)) == labels, "case {case}: labels");
    }
    Ok(format!("{n} terms"))
}

pub fn unfolding_equivalence(b: &Budget) -> Outcome {
    let mut rng = b.rng(4);
    let n = b.cases(300);
    let size = b.size(80);
    for round in 0..n {
        let k = 1 + round % 3;
        let nodes = rng.gen_range(1..=size);
        let err = |e: crate::Error| format!("round {round}: {e}");
        let t = gen::mat_term(&mut rng, k, nodes, &TwistDomain::Constant);
        ensure!(unfold_constant_twist(k, &t).map_err(err)? == unfold_general(k, &t).map_err(err)?, "round {round}: constant twist");
        let mono = Twist::all_monotone(k);
        let a = mono[rng.gen_range(0..mono.len())].clone();
        let t = gen::mat_term(&mut rng, k, nodes, &TwistDomain::Equal(a.clone()));
        ensure!(unfold_alpha_homogeneous(k, &t, &a).map_err(err)? == unfold_general(k, &t).map_err(err)?, "round {round}: single twist");
        let t = gen::mat_term(&mut rng, k, nodes, &TwistDomain::Homogeneous);
        ensure!(unfold_homogeneous(k, &t).map_err(err)? == unfold_general(k, &t).map_err(err)?, "round {round}: homogeneous");
        let t = gen::mat_term(&mut rng, k, nodes, &TwistDomain::Monotone);
        ensure!(unfold_monotone_decomposed(k, &t).map_err(err)? == unfold_general(k, &t).map_err(err)?, "round {round}: decomposed");
    }
    Ok(format!("{n} inputs per case"))
}

pub fn parity_witness(_: &Budget) -> Outcome {
    let unit = |n: &str, a: usize| Term::unit(Sym::new(n, a));
    let swap = Mat::new(vec![unit("a", 1), unit("a", 1)], Grouping::new(vec![(1, 2), (1, 1)], 2, 1).unwrap(), 1).unwrap();
    let leaf = Mat::new(vec![unit("black", 0), unit("white", 0)], Grouping::default(), 0).unwrap();
    for n in 1..=8 {
        let mut t = Term::unit(leaf.clone());
        for _ in 0..n {
            t = Term::node(swap.clone(), vec![t]);
        }
        let u = unfold_general(2, &t).map_err(|e| e.to_string())?;
        let first = Term::flatten(&u.tuple[0]);
        let white = first.labels().any(|s| s.name == "white");
        ensure!(white == (n % 2 == 1), "n = {n}: first coordinate {first}");
        ensure!(unfold_monotone(2, &t).is_err_and(|e| e.is_undefined()), "n = {n}: monotone unfold defined");
        ensure!(unfold_monotone_decomposed(2, &t).is_err_and(|e| e.is_undefined()), "n = {n}: decomposed unfold defined");
    }
    Ok("n = 1..8".into())
}

/// A random aperiodic monoid with at most `max` elements: the closure of
/// a few monotone partial maps.
fn random_aperiodic(rng: &mut Rand, max: usize) -> FiniteMonoid {
    loop {
        let k = rng.gen_range(1..=3);
        let gens: Vec<Twist> = (0..rng.gen_range(1..=2)).map(|_| gen::twist(rng, k, true)).collect();
        let m = FiniteMonoid::from_maps(k, &gens);
        if m.size() <= max {
            return m;
        }
    }
}

pub fn factorisation_forests(b: &Budget) -> Outcome {
    let mut rng = b.rng(6);
    let n = b.cases(300);
    let size = b.size(80);
    let mut splits = 0;
    for case in 0..n {
        let m = random_aperiodic(&mut rng, 6);
        ensure!(m.check_aperiodic(), "case {case}: generated monoid is not aperiodic");
        let t = random_term(&mut rng, size, 0.1);
        let table: Vec<Vec<usize>> = syms().iter().map(|s| (0..s.arity).map(|_| rng.gen_range(0..m.size())).collect()).collect();
        let h = |s: &Sym, i: usize| table[syms().iter().position(|x| x == s).unwrap()][i];
        let f = factorise(&t, &m, h).map_err(|e| format!("case {case}: {e}"))?;
        ensure!(f.nest.flat() == t, "case {case}: flattening differs");
        ensure!(is_hereditarily_homogeneous(&m, &f.nest, &h), "case {case}: not hereditarily homogeneous");
        ensure!(f.stats.measure_decreased, "case {case}: measure did not decrease");
        splits += f.stats.splits;
    }
    let z2 = FiniteMonoid::cyclic(2);
    ensure!(!z2.check_aperiodic(), "Z/2 accepted as aperiodic");
    let t = Term::node(Sym::new("b", 1), vec![Term::unit(Sym::new("c", 0))]);
    ensure!(factorise(&t, &z2, |_, _| 1).is_err(), "factorise accepted Z/2");
    Ok(format!("{n} pairs, {splits} recursive splits"))
}

/// All downward-closed sets generated by types of size at most `n`.
pub fn closed_type_sets(n: usize) -> Vec<TypeSet> {
    let base = SimpleType::all_up_to(n);
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 1u32..(1 << base.len()) {
        let ts = TypeSet::new(base.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, t)| t.clone()));
        let key: Vec<SimpleType> = ts.iter().cloned().collect();
        if seen.insert(key) {
            out.push(ts);
        }
    }
    out
}

fn words(letters: &[Lam], n: usize) -> Vec<Vec<Lam>> {
    let mut out = vec![vec![]];
    let mut layer: Vec<Vec<Lam>> = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::with_capacity(layer.len() * letters.len());
        for w in &layer {
            for l in letters {
                let mut v = w.clone();
                v.push(l.clone());
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Every way to type up to three variables with types from `ts`, up to
/// renaming.
fn typings(ts: &TypeSet) -> Vec<Vars> {
    let tys: Vec<SimpleType> = ts.iter().cloned().collect();
    let mut out = Vec::new();
    let mut pick = |idx: &[usize]| out.push(Vars::new(idx.iter().enumerate().map(|(i, &j)| (format!("v{}", i + 1), tys[j].clone()))));
    for a in 0..tys.len() {
        pick(&[a]);
        for b in a..tys.len() {
            pick(&[a, b]);
            for c in b..tys.len() {
                pick(&[a, b, c]);
            }
        }
    }
    out
}

pub fn type_automata(b: &Budget) -> Outcome {
    let mut checked = 0usize;
    let sets = closed_type_sets(4);
    for ts in &sets {
        for vars in typings(ts) {
            let mut letters: Vec<Lam> = vars.names().map(|x| Lam::Var(x.clone())).collect();
            letters.extend(vars.names().map(|x| Lam::Abs(x.clone())));
            letters.push(Lam::App);
            let all = words(&letters, b.word_len);
            for tau in ts.iter() {
                let d = lambda::build_type_dfa(ts, tau, &vars).map_err(|e| e.to_string())?;
                ensure!(lambda::check_counter_free(&d).map_err(|e| e.to_string())?, "D_{tau} is not counter-free");
                for w in &all {
                    let direct = lambda::word_type(w, &vars, Some(ts)).as_ref() == Some(tau);
                    ensure!(d.accepts(w) == direct, "τ = {tau}: disagreement on {w:?}");
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{} type sets, {checked} word checks", sets.len()))
}

/// The type set used for random linear terms.
pub fn fixed_types() -> TypeSet {
    TypeSet::new([
        SimpleType::order(2),
        SimpleType::arrow(SimpleType::order(1), SimpleType::O),
        SimpleType::arrow(SimpleType::order(1), SimpleType::order(1)),
    ])
}

pub fn random_linear(rng: &mut Rand, types: &TypeSet, vars: &Vars, max: usize) -> LambdaTerm {
    let tys: Vec<SimpleType> = types.iter().cloned().collect();
    loop {
        let tau = tys[rng.gen_range(0..tys.len())].clone();
        let nodes = rng.gen_range(2..=(max / 2).max(3));
        let steps = rng.gen_range(0..=max / 8 + 1);
        if let Some(t) = gen::lambda::linear(rng, types, vars, &tau, nodes, steps) {
            if t.len() <= max {
                return t;
            }
        }
    }
}

pub fn lambda_normalisation(b: &Budget) -> Outcome {
    let mut rng = b.rng(8);
    let n = b.cases(500);
    let size = b.size(120);
    let types = fixed_types();
    let vars = gen::lambda::vars_for(&types);
    let mut contracted = 0;
    for case in 0..n {
        let t = random_linear(&mut rng, &types, &vars, size);
        let s = lambda::show(&t);
        ensure!(lambda::is_linear(&t) && lambda::typable_within(&t, &types, &vars), "case {case}: generator produced {s}");
        let got = lambda::normalize_linear(&t, &types, &vars).map_err(|e| format!("case {case}: {e} on {s}"))?;
        let want = lambda::reference_normalize(&t).map_err(|e| format!("case {case}: reference {e}"))?;
        ensure!(lambda::alpha_eq(&got, &want), "case {case}: {} vs {} from {s}", lambda::show(&got), lambda::show(&want));
        ensure!(got.len() <= t.len(), "case {case}: output grew");
        contracted += usize::from(got.len() < t.len());
    }
    let evars = lambda::exponential_vars();
    for m in 0..=10 {
        let t = lambda::exponential(m);
        let r = lambda::reference_normalize(&t).map_err(|e| e.to_string())?;
        ensure!(r.size() >= 1 << m, "M_{m} normal form has size {}", r.size());
        let lin = lambda::normalize_linear(&t, &types, &evars);
        if m == 0 {
            ensure!(lin.is_ok(), "M_0 should normalise");
        } else {
            ensure!(lin.is_err_and(|e| e.is_undefined()), "M_{m} was not rejected");
        }
    }
    Ok(format!("{n} terms ({contracted} with redexes), M_0..M_10"))
}

/// Renames every binder, variable occurrence and output letter after its
/// input position and closes ports as variables, so the reference normal
/// form shows where each of its nodes came from. Application nodes carry
/// no name and are left out.
fn reference_origins(t: &LambdaTerm) -> Result<Vec<usize>, String> {
    let bind = lambda::binders(t);
    let mut occurrence = vec![usize::MAX; t.len()];
    for (v, b) in bind.iter().enumerate() {
        if let Some(b) = b {
            occurrence[*b] = v;
        }
    }
    let slots = t
        .slots()
        .iter()
        .enumerate()
        .map(|(p, s)| {
            Slot::Node(match s {
                Slot::Port => Lam::Var(format!("p{p}")),
                Slot::Node(Lam::Abs(_)) => Lam::Abs(format!("b{p}")),
                Slot::Node(Lam::Var(_)) => match bind[p] {
                    Some(b) => Lam::Var(format!("b{b}")),
                    None => Lam::Var(format!("f{p}")),
                },
                Slot::Node(Lam::Out(_, a)) => Lam::Out(format!("o{p}"), *a),
                Slot::Node(Lam::App) => Lam::App,
            })
        })
        .collect();
    let closed = Term::from_slots(slots).map_err(|e| e.to_string())?;
    let nf = lambda::reference_normalize(&closed).map_err(|e| e.to_string())?;
    let pos = |x: &str| x[1..].split('_').next().and_then(|n| n.parse::<usize>().ok()).ok_or(format!("unexpected name {x}"));
    let mut out = Vec::new();
    for l in nf.labels() {
        match l {
            Lam::Abs(x) | Lam::Out(x, _) => out.push(pos(x)?),
            Lam::Var(x) if x.starts_with('b') => out.push(occurrence[pos(x)?]),
            Lam::Var(x) if x.starts_with('f') => out.push(pos(x)?),
            // ports may be permuted
            Lam::Var(_) | Lam::App => {}
        }
    }
    Ok(out)
}

pub fn thin_preorder(b: &Budget) -> Outcome {
    let mut rng = b.rng(9);
    let n = b.cases(300);
    let len = b.size(14);
    let mut survivors = 0;
    for case in 0..n {
        let l = rng.gen_range(2..=len);
        let t = gen::lambda::thin(&mut rng, l, 5);
        let s = lambda::show(&t);
        ensure!(lambda::is_thin(&t) && lambda::is_linear(&t), "case {case}: generator produced {s}");
        let kept = lambda::survivors(&t);
        let reference = reference_origins(&t).map_err(|e| format!("case {case}: {e} on {s}"))?;
        ensure!(reference.windows(2).all(|w| w[0] < w[1]), "case {case}: reference survivors {reference:?} out of order on {s}");
        ensure!(reference.iter().all(|p| kept.contains(p)), "case {case}: a contracted node survived in {s}");
        let (f, origin) = lambda::normalize_thin_traced(&t).map_err(|e| format!("case {case}: {e} on {s}"))?;
        ensure!(f == lambda::reference_normalize_ports(&t).map_err(|e| e.to_string())?, "case {case}: normal form differs on {s}");
        let nodes: Vec<usize> = origin.iter().copied().filter(|&p| !matches!(t.slots()[p], Slot::Port)).collect();
        ensure!(nodes.windows(2).all(|w| w[0] < w[1]), "case {case}: traced survivors out of order on {s}");
        ensure!(reference.iter().all(|p| nodes.contains(p)), "case {case}: trace disagrees with the reference on {s}");
        survivors += reference.len();
    }
    Ok(format!("{n} thin terms, {survivors} named survivors"))
}

pub fn transducer_routes(b: &Budget) -> Outcome {
    use crate::gen::transducer as tg;
    let mut rng = b.rng(10);
    let n = b.cases(200);
    let size = b.size(60);
    let mut nodes = 0;
    for case in 0..n {
        let tr = tg::random(&mut rng, 3, true);
        let d = transducer::validate(&tr);
        ensure!(!transducer::has_errors(&d), "case {case}: invalid transducer {d:?}");
        let nodes_in = rng.gen_range(1..=size);
        let t = tg::input_tree(&mut rng, nodes_in);
        nodes += t.size();
        let direct = transducer::run(&tr, &t).map_err(|e| format!("case {case}: {e}"))?;
        let via = transducer::run_via_lambda(&tr, &t).map_err(|e| format!("case {case}: lambda route {e}"))?;
        ensure!(direct == via, "case {case}: {direct} vs {via} on {t}");
    }
    let updates = b.cases(500);
    let mut violators = 0;
    for case in 0..updates {
        let regs = tg::registers(&mut rng, 3);
        let arity = rng.gen_range(0..=3);
        let u = tg::update(&mut rng, "u", arity, &regs, case % 2 == 0);
        let m = transducer::lambda_repr(&u, &regs).map_err(|e| e.to_string())?;
        let direct = transducer::is_monotone_update(&u);
        ensure!(direct == m.is_monotone(), "update {case}: monotone {direct} but representation says {}", m.is_monotone());
        violators += usize::from(!direct);
    }
    ensure!(violators > 0, "no violating updates were generated");
    Ok(format!("{n} transducers over {nodes} input nodes; {updates} updates, {violators} violators"))
}

pub fn selected(t: &Term<Sym>) -> Vec<bool> {
    t.slots()
        .iter()
        .map(|s| match s {
            Slot::Node(l) => untag(l).expect("tagged label").1,
            Slot::Port => false,
        })
        .collect()
}

/// For each node `x`, every strict descendant `y` with the set of label
/// names strictly between them.
pub fn node_pairs(t: &Term<Sym>) -> Vec<Vec<(usize, Names)>> {
    let parents = t.parents();
    let mut out = vec![Vec::new(); t.len()];
    for y in 0..t.len() {
        let mut between = Names::new();
        let mut cur = parents[y].map(|p| p.0);
        while let Some(x) = cur {
            out[x].push((y, between.clone()));
            between.insert(t.label(x).unwrap().name.clone());
            cur = parents[x].map(|p| p.0);
        }
    }
    out
}

fn name(t: &Term<Sym>, p: usize) -> &str {
    &t.label(p).unwrap().name
}

pub fn until_oracle(t: &Term<Sym>, pairs: &[Vec<(usize, Names)>], gamma: &Names, delta: &Names) -> Vec<bool> {
    (0..t.len())
        .map(|x| pairs[x].iter().any(|(y, between)| delta.contains(name(t, *y)) && between.is_subset(gamma)))
        .collect()
}

pub fn since_oracle(t: &Term<Sym>, pairs: &[Vec<(usize, Names)>], gamma: &Names, delta: &Names) -> Vec<bool> {
    let mut out = vec![false; t.len()];
    for (y, list) in pairs.iter().enumerate() {
        if t.label(y).is_some_and(|l| delta.contains(&l.name)) {
            for (x, between) in list {
                if between.is_subset(gamma) {
                    out[*x] = true;
                }
            }
        }
    }
    out
}

pub fn child_oracle(t: &Term<Sym>, i: usize) -> Vec<bool> {
    let ends = t.ends();
    let mut out = vec![false; t.len()];
    for p in 0..t.len() {
        if let Some(&c) = t.children_of(p, &ends).get(i - 1) {
            out[c] = true;
        }
    }
    out
}

/// until, since and child against the node-pair oracles on every tree of
/// at most `max_nodes` nodes labelled `a` or `b` with arities up to 2, for
/// all `Γ, Δ ⊆ {a, b}`. Returns the number of trees.
pub fn exhaustive_selections(max_nodes: usize) -> Result<usize, String> {
    let sets = [names([]), names(["a"]), names(["b"]), names(["a", "b"])];
    let trees = gen::all_trees(max_nodes, 2, &["a", "b"]);
    for t in &trees {
        let pairs = node_pairs(t);
        for i in 1..=2 {
            ensure!(selected(&char_child(t, i)) == child_oracle(t, i), "child {i} on {t}");
        }
        for g in &sets {
            for d in &sets {
                let until = until_oracle(t, &pairs, g, d);
                ensure!(selected(&char_until(t, g, d, false)) == until, "until {g:?} {d:?} on {t}");
                ensure!(selected(&char_since(t, g, d, false)) == since_oracle(t, &pairs, g, d), "since {g:?} {d:?} on {t}");
                let refl: Vec<bool> = until.iter().enumerate().map(|(p, &b)| b || d.contains(name(t, p))).collect();
                ensure!(selected(&char_until(t, g, d, true)) == refl, "reflexive until {g:?} {d:?} on {t}");
            }
        }
    }
    Ok(trees.len())
}

pub fn relabel_oracles(b: &Budget) -> Outcome {
    let trees = exhaustive_selections(b.tree_size)?;
    Ok(format!("{trees} trees of size <= {}", b.tree_size))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_four_type_sets() {
        // node count: o has size 1, o -> o size 3, nothing of size 2 or 4
        let sets = closed_type_sets(4);
        assert_eq!(sets.len(), 2);
        assert!(sets.iter().any(|s| s.len() == 1) && sets.iter().any(|s| s.len() == 2));
    }

    #[test]
    fn quick_suites_pass() {
        let b = Budget { seed: 1, divisor: 50, max_size: 20, word_len: 3, tree_size: 4 };
        for s in suites() {
            if let Err(e) = (s.run)(&b) {
                panic!("{}: {e}", s.name);
            }
        }
    }
}
