//! Seeded random generators for terms, matrix-power terms and friends.
//! Shared by the self-test, the acceptance suite and the examples.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matrix::{Mat, Twist};
use crate::term::{Slot, Term};
use crate::value::{Grouping, Sym};

pub type Rand = ChaCha8Rng;

pub fn rng(seed: u64) -> Rand {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Arities of a random tree with exactly `nodes` nodes, in pre-order;
/// `None` marks a port.
pub fn shape(rng: &mut Rand, nodes: usize, max_arity: usize, port_prob: f64) -> Vec<Option<usize>> {
    let max_arity = max_arity.max(1);
    let mut out = Vec::new();
    let mut open = 1usize;
    let mut left = nodes;
    while open > 0 {
        if left == 0 || (open > 1 && rng.gen_bool(port_prob)) {
            out.push(None);
            open -= 1;
            continue;
        }
        let min = usize::from(left > 1 && open == 1);
        let a = rng.gen_range(min..=max_arity);
        out.push(Some(a));
        open = open - 1 + a;
        left -= 1;
    }
    out
}

/// A random term over `symbols`, with about `nodes` nodes. Nullary
/// symbols are needed to close branches; ports appear with `port_prob`.
pub fn term(rng: &mut Rand, symbols: &[Sym], nodes: usize, port_prob: f64) -> Term<Sym> {
    let by_arity = |a: usize| symbols.iter().filter(move |s| s.arity == a).collect::<Vec<_>>();
    let arities: Vec<usize> = {
        let mut v: Vec<usize> = symbols.iter().map(|s| s.arity).collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    let max = *arities.last().unwrap_or(&0);
    let has_leaf = arities.first() == Some(&0);
    let mut slots = Vec::new();
    let mut open = 1usize;
    let mut left = nodes;
    while open > 0 {
        let port = rng.gen_bool(port_prob) || (left == 0 && !has_leaf);
        if port {
            slots.push(Slot::Port);
            open -= 1;
            continue;
        }
        let choices: Vec<usize> = if left == 0 {
            vec![0]
        } else if open == 1 && left > 1 && max > 0 {
            arities.iter().copied().filter(|&a| a > 0).collect()
        } else {
            arities.clone()
        };
        let a = *choices.choose(rng).unwrap();
        let s = (*by_arity(a).choose(rng).unwrap()).clone();
        slots.push(Slot::Node(s));
        open = open - 1 + a;
        left = left.saturating_sub(1);
    }
    Term::from_slots(slots).expect("generated slots are well formed")
}

/// A random partial map on `{1..k}`.
pub fn twist(rng: &mut Rand, k: usize, monotone: bool) -> Twist {
    if monotone {
        let all = Twist::all_monotone(k);
        return all.choose(rng).unwrap().clone();
    }
    Twist((0..k).map(|_| if rng.gen_bool(0.2) { None } else { Some(rng.gen_range(1..=k)) }).collect())
}

/// A matrix element with the given twist at each outer port. Coordinate
/// `j` is one symbol whose ports are the slots sent to `j`, shuffled.
pub fn mat_with_twists(rng: &mut Rand, k: usize, twists: &[Twist]) -> Mat<Sym> {
    let mut tuple = Vec::with_capacity(k);
    let mut grouping = Vec::new();
    for j in 1..=k {
        let mut ports: Vec<(usize, usize)> = Vec::new();
        for (i, tw) in twists.iter().enumerate() {
            for q in 1..=k {
                if tw.apply(q) == Some(j) {
                    ports.push((i + 1, q));
                }
            }
        }
        ports.shuffle(rng);
        let name = ["f", "g", "h"][rng.gen_range(0..3)];
        tuple.push(Sym::new(name, ports.len()));
        grouping.extend(ports);
    }
    Mat { k, tuple, grouping: Grouping::from_vec_unchecked(grouping), outer: twists.len() }
}

/// Which twists a generated matrix-power term may use.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TwistDomain {
    Any,
    Monotone,
    /// Internal edges constant (possibly nowhere defined).
    Constant,
    /// Internal edges all equal to the given map; ports monotone.
    Equal(Twist),
    /// Monotone, and `parent ∘ child = parent` along internal edges.
    Homogeneous,
}

/// A random term over the k-th matrix power with `nodes` nodes.
pub fn mat_term(rng: &mut Rand, k: usize, nodes: usize, domain: &TwistDomain) -> Term<Mat<Sym>> {
    let arities = shape(rng, nodes, 3, 0.3);
    let n = arities.len();
    // children of each position, and the twist on the edge into it
    let mut kids: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for (pos, a) in arities.iter().enumerate() {
        if let Some(top) = stack.last_mut() {
            kids[top.0].push(pos);
            top.1 -= 1;
            let done = top.1 == 0;
            if done {
                stack.pop();
            }
        }
        if let Some(a) = a {
            if *a > 0 {
                stack.push((pos, *a));
            }
        }
    }
    let monotone = Twist::all_monotone(k);
    let mut into: Vec<Option<Twist>> = vec![None; n];
    let mut slots = Vec::with_capacity(n);
    for pos in 0..n {
        let Some(_) = arities[pos] else {
            slots.push(Slot::Port);
            continue;
        };
        let mut tws = Vec::new();
        for &c in &kids[pos] {
            let internal = arities[c].is_some();
            let tw = match (domain, internal) {
                (TwistDomain::Any, _) | (TwistDomain::Constant, false) => twist(rng, k, false),
                (TwistDomain::Constant, true) => {
                    if rng.gen_bool(0.15) {
                        Twist::empty(k)
                    } else {
                        Twist::constant(k, rng.gen_range(1..=k))
                    }
                }
                (TwistDomain::Equal(a), true) => a.clone(),
                (TwistDomain::Monotone | TwistDomain::Equal(_), _) | (TwistDomain::Homogeneous, false) => {
                    monotone.choose(rng).unwrap().clone()
                }
                (TwistDomain::Homogeneous, true) => match &into[pos] {
                    None => monotone.choose(rng).unwrap().clone(),
                    Some(up) => {
                        let ok: Vec<&Twist> = monotone.iter().filter(|b| up.compose(b) == *up).collect();
                        (*ok.choose(rng).unwrap()).clone()
                    }
                },
            };
            into[c] = Some(tw.clone());
            tws.push(tw);
        }
        slots.push(Slot::Node(mat_with_twists(rng, k, &tws)));
    }
    Term::from_slots(slots).expect("generated slots are well formed")
}

/// Every closed tree with at most `max_nodes` nodes and arities at most
/// `max_arity`, each node labelled by one of `names` (the arity is the
/// node's). Ordered by size, then lexicographically on pre-order.
pub fn all_trees(max_nodes: usize, max_arity: usize, names: &[&str]) -> Vec<Term<Sym>> {
    // shapes[n]: pre-order arity lists of trees with n nodes
    let mut shapes: Vec<Vec<Vec<usize>>> = vec![Vec::new(); max_nodes + 1];
    // forests[m][n]: sequences of m trees with n nodes in total
    let mut forests: Vec<Vec<Vec<Vec<usize>>>> = vec![vec![Vec::new(); max_nodes + 1]; max_arity + 1];
    forests[0][0].push(Vec::new());
    for n in 1..=max_nodes {
        // complete the forests of total size n - 1 from smaller trees
        let t = n - 1;
        for m in 1..=max_arity {
            let mut add = Vec::new();
            for last in 1..=t {
                for f in &forests[m - 1][t - last] {
                    for s in &shapes[last] {
                        let mut v = f.clone();
                        v.extend(s);
                        add.push(v);
                    }
                }
            }
            forests[m][t] = add;
        }
        for a in 0..=max_arity {
            for f in &forests[a][t] {
                let mut s = vec![a];
                s.extend(f);
                shapes[n].push(s);
            }
        }
    }
    let mut out = Vec::new();
    for shape in shapes.iter().flatten() {
        let n = shape.len();
        let mut idx = vec![0usize; n];
        loop {
            let slots = shape.iter().zip(&idx).map(|(&a, &i)| Slot::Node(Sym::new(names[i], a))).collect();
            out.push(Term::from_slots(slots).expect("shapes are trees"));
            let Some(j) = (0..n).rev().find(|&j| idx[j] + 1 < names.len()) else { break };
            idx[j] += 1;
            idx[j + 1..].iter_mut().for_each(|i| *i = 0);
        }
    }
    out
}

/// Random λ-terms.
pub mod lambda {
    use rand::seq::SliceRandom;
    use rand::Rng;

    use super::Rand;
    use crate::lambda::{binders, subterm_types, Lam, LambdaTerm, SimpleType, TypeSet, Vars};
    use crate::term::{Ranked, Slot, Term};

    /// Three names for every type in `types`: `x1..x3` for `o`, and
    /// `v<j>_1..v<j>_3` for the `j`-th other type.
    pub fn vars_for(types: &TypeSet) -> Vars {
        let mut out = Vars::default();
        let mut j = 0;
        for t in types.iter() {
            for k in 1..=3 {
                let name = if *t == SimpleType::O { format!("x{k}") } else { format!("v{j}_{k}") };
                out.insert(name, t.clone());
            }
            if *t != SimpleType::O {
                j += 1;
            }
        }
        out
    }

    /// Output letters used by the generators.
    pub const OUTS: [(&str, usize); 3] = [("a", 2), ("b", 1), ("c", 0)];

    struct NormalGen<'a> {
        rng: &'a mut Rand,
        types: &'a TypeSet,
        vars: &'a Vars,
        budget: usize,
    }

    impl NormalGen<'_> {
        fn names_of(&self, t: &SimpleType) -> Vec<String> {
            self.vars.iter().filter(|(_, s)| *s == t).map(|(n, _)| n.clone()).collect()
        }

        /// Splits `ctx` into `n` random parts.
        fn split(&mut self, ctx: Vec<String>, n: usize) -> Vec<Vec<String>> {
            let mut parts = vec![Vec::new(); n];
            for x in ctx {
                parts[self.rng.gen_range(0..n)].push(x);
            }
            parts
        }

        /// A normal term of type `tau` using every name in `ctx` exactly
        /// once, with no free occurrence of a name in `scope`.
        fn gen(&mut self, tau: &SimpleType, ctx: Vec<String>, scope: &mut Vec<String>) -> Option<LambdaTerm> {
            self.budget = self.budget.saturating_sub(1);
            if let SimpleType::Arrow(s, r) = tau {
                let choices: Vec<String> = self.names_of(s).into_iter().filter(|y| !ctx.contains(y)).collect();
                let y = choices.choose(self.rng)?.clone();
                let mut ctx = ctx;
                ctx.push(y.clone());
                scope.push(y.clone());
                let body = self.gen(r, ctx, scope);
                scope.pop();
                return Some(Term::node(Lam::Abs(y), vec![body?]));
            }
            let typ = |n: &String| self.vars.get(n).unwrap().clone();
            let free_heads: Vec<String> = self
                .vars
                .iter()
                .filter(|(n, t)| !scope.contains(n) && self.types.contains(t))
                .map(|(n, _)| n.clone())
                .collect();
            let spent = self.budget == 0;
            // close off when out of budget
            if ctx.is_empty() && (spent || self.rng.gen_bool(0.2)) {
                let leaves: Vec<&String> = free_heads.iter().filter(|n| typ(n) == SimpleType::O).collect();
                return Some(match leaves.choose(self.rng) {
                    Some(x) if self.rng.gen_bool(0.7) => Term::unit(Lam::Var((*x).clone())),
                    _ => Term::unit(Lam::Out("c".into(), 0)),
                });
            }
            if ctx.len() == 1 && typ(&ctx[0]) == SimpleType::O && (spent || self.rng.gen_bool(0.3)) {
                return Some(Term::unit(Lam::Var(ctx[0].clone())));
            }
            let arrow_ctx: Vec<String> = ctx.iter().filter(|n| typ(n) != SimpleType::O).cloned().collect();
            let use_head = !arrow_ctx.is_empty() && (spent || self.rng.gen_bool(0.5));
            let free_arrows: Vec<String> = free_heads.iter().filter(|n| typ(n) != SimpleType::O).cloned().collect();
            if use_head || (!spent && !free_arrows.is_empty() && self.rng.gen_bool(0.3)) {
                let (h, rest) = if use_head {
                    let h = arrow_ctx.choose(self.rng).unwrap().clone();
                    let rest: Vec<String> = ctx.into_iter().filter(|n| *n != h).collect();
                    (h, rest)
                } else {
                    (free_arrows.choose(self.rng).unwrap().clone(), ctx)
                };
                let spine = typ(&h).spine();
                let args = &spine[..spine.len() - 1];
                let parts = self.split(rest, args.len());
                let mut t = Term::unit(Lam::Var(h));
                for (s, part) in args.iter().zip(parts) {
                    let a = self.gen(s, part, scope)?;
                    t = Term::node(Lam::App, vec![t, a]);
                }
                return Some(t);
            }
            let n = if ctx.len() <= 1 && self.rng.gen_bool(0.4) { 1 } else { 2 };
            let parts = self.split(ctx, n);
            let kids = parts.into_iter().map(|p| self.gen(&SimpleType::O, p, scope)).collect::<Option<Vec<_>>>()?;
            Some(Term::node(Lam::Out(if n == 2 { "a" } else { "b" }.into(), n), kids))
        }
    }

    /// A random β-normal linear term of type `tau` with about `nodes`
    /// nodes, typable within `types`. `vars` needs names for the argument
    /// types that occur.
    pub fn normal(rng: &mut Rand, types: &TypeSet, vars: &Vars, tau: &SimpleType, nodes: usize) -> Option<LambdaTerm> {
        let mut g = NormalGen { rng, types, vars, budget: nodes };
        g.gen(tau, Vec::new(), &mut Vec::new())
    }

    /// Replaces some subterm `N` by a variable `y` inside an ancestor `M`
    /// and puts `(λy. M') N` in place of `M`. The result reduces back in one
    /// step. With `types`, only expansions whose new abstraction type is a
    /// member are tried and `vars` must type the term.
    pub fn expand(rng: &mut Rand, t: &LambdaTerm, vars: &Vars, types: Option<&TypeSet>) -> Option<LambdaTerm> {
        let ends = t.ends();
        let parents = t.parents();
        let bind = binders(t);
        let tys = match types {
            Some(_) => Some(subterm_types(t, vars).ok()?),
            None => None,
        };
        let nodes = t.node_positions();
        for _ in 0..20 {
            let p = *nodes.choose(rng)?;
            let mut anc = vec![p];
            while let Some((q, _)) = parents[*anc.last().unwrap()] {
                anc.push(q);
            }
            let m = anc[rng.gen_range(0..anc.len())];
            let names: Vec<(String, SimpleType)> = match (&tys, types) {
                (Some(tys), Some(ts)) => {
                    let s = SimpleType::arrow(tys[p].clone(), tys[m].clone());
                    if !ts.contains(&s) {
                        continue;
                    }
                    vars.iter().filter(|(_, t)| **t == tys[p]).map(|(n, t)| (n.clone(), t.clone())).collect()
                }
                _ => vars.iter().map(|(n, t)| (n.clone(), t.clone())).collect(),
            };
            let Some((y, _)) = names.choose(rng) else { continue };
            let inside_m = |b: usize| b >= m && b < ends[m];
            let inside_n = |q: usize| q >= p && q < ends[p];
            // N may not use binders between m and p
            if (p..ends[p]).any(|q| bind[q].is_some_and(|b| inside_m(b) && !inside_n(b))) {
                continue;
            }
            // y must not be captured, nor capture anything
            let path_binds_y =
                anc[1..].iter().take_while(|&&q| q >= m).any(|&q| matches!(t.label(q), Some(Lam::Abs(z)) if z == y));
            let captures = (m..ends[m]).any(|q| {
                !inside_n(q) && matches!(t.label(q), Some(Lam::Var(z)) if z == y) && !bind[q].is_some_and(inside_m)
            });
            if path_binds_y || captures {
                continue;
            }
            let mut slots: Vec<Slot<Lam>> = t.slots()[..m].to_vec();
            slots.push(Slot::Node(Lam::App));
            slots.push(Slot::Node(Lam::Abs(y.clone())));
            slots.extend(t.slots()[m..p].iter().cloned());
            slots.push(Slot::Node(Lam::Var(y.clone())));
            slots.extend(t.slots()[ends[p]..ends[m]].iter().cloned());
            slots.extend(t.slots()[p..ends[p]].iter().cloned());
            slots.extend(t.slots()[ends[m]..].iter().cloned());
            return Term::from_slots(slots).ok();
        }
        None
    }

    /// A normal term followed by `steps` expansions.
    pub fn linear(
        rng: &mut Rand,
        types: &TypeSet,
        vars: &Vars,
        tau: &SimpleType,
        nodes: usize,
        steps: usize,
    ) -> Option<LambdaTerm> {
        let mut t = normal(rng, types, vars, tau, nodes)?;
        for _ in 0..steps {
            if let Some(u) = expand(rng, &t, vars, Some(types)) {
                t = u;
            }
        }
        Some(t)
    }

    /// A word-shaped term with ports: a chain of `len` nodes, each keeping
    /// one non-port child, possibly ending in a binder's variable.
    pub fn thin_word(rng: &mut Rand, len: usize) -> LambdaTerm {
        let mut slots = Vec::new();
        let mut binder: Option<String> = None;
        for i in 0..len {
            let last = i + 1 == len;
            if last {
                let end = match &binder {
                    Some(x) => Slot::Node(Lam::Var(x.clone())),
                    None if rng.gen_bool(0.5) => Slot::Node(Lam::Var("z".into())),
                    None => Slot::Port,
                };
                slots.push(end);
                break;
            }
            match rng.gen_range(0..5) {
                0 if binder.is_none() => {
                    binder = Some("w".into());
                    slots.push(Slot::Node(Lam::Abs("w".into())));
                }
                0 | 1 => {
                    slots.push(Slot::Node(Lam::App));
                    slots.push(Slot::Port);
                }
                2 => {
                    slots.push(Slot::Node(Lam::Out("b".into(), 1)));
                }
                _ => {
                    slots.push(Slot::Node(Lam::Out("a".into(), 2)));
                    slots.push(Slot::Port);
                }
            }
        }
        // `App` and `a` nodes above put the port first; swap some sides
        let t = Term::from_slots(slots).expect("chain");
        flip_sides(rng, &t)
    }

    /// Randomly swaps the two children of binary nodes.
    fn flip_sides(rng: &mut Rand, t: &LambdaTerm) -> LambdaTerm {
        t.fold_up::<LambdaTerm>(|_, s, kids| {
            Ok(match s {
                Slot::Port => Term::port(),
                Slot::Node(l) if l.arity() == 2 && rng.gen_bool(0.5) => {
                    let mut k = kids;
                    k.swap(0, 1);
                    Term::node(l.clone(), k)
                }
                Slot::Node(l) => Term::node(l.clone(), kids),
            })
        })
        .expect("no failures")
    }

    /// A thin linear term: a word-shaped chain followed by expansions.
    pub fn thin(rng: &mut Rand, len: usize, steps: usize) -> LambdaTerm {
        let vars = Vars::new(["p", "q", "r"].map(|n| (n, SimpleType::O)));
        let mut t = thin_word(rng, len);
        for _ in 0..steps {
            // abstracting the λ of a redex would leave a plain branching @
            if let Some(u) = expand(rng, &t, &vars, None).filter(crate::lambda::is_thin) {
                t = u;
            }
        }
        t
    }
}

/// Random register transducers over input `a/2 b/1 c/0` and output
/// `f/2 g/1 e/0`.
pub mod transducer {
    use rand::seq::SliceRandom;
    use rand::Rng;

    use super::{twist, Rand};
    use crate::relabel::{names, Program, Step};
    use crate::term::Term;
    use crate::transducer::{RegisterSet, Transducer, UpdLabel, Update};
    use crate::value::{RankedAlphabet, Sym};

    pub fn input_alphabet() -> RankedAlphabet {
        RankedAlphabet::new([("a".into(), 2), ("b".into(), 1), ("c".into(), 0)]).unwrap()
    }

    pub fn output_alphabet() -> RankedAlphabet {
        RankedAlphabet::new([("f".into(), 2), ("g".into(), 1), ("e".into(), 0)]).unwrap()
    }

    pub fn registers(rng: &mut Rand, max: usize) -> RegisterSet {
        let k = rng.gen_range(1..=max);
        let out = rng.gen_range(0..k);
        let regs = (0..k)
            .map(|r| (format!("r{}", r + 1), if r == out { 0 } else { rng.gen_range(0..=2) }))
            .collect();
        RegisterSet::new(regs, &format!("r{}", out + 1)).unwrap()
    }

    fn leaf() -> Term<UpdLabel> {
        Term::unit(UpdLabel::Out(Sym::new("e", 0)))
    }

    fn take(rng: &mut Rand, pool: &mut Vec<Term<UpdLabel>>) -> Term<UpdLabel> {
        let i = rng.gen_range(0..pool.len());
        pool.swap_remove(i)
    }

    /// A body for a register of arity `a` using each listed placeholder
    /// `(register, copy)` exactly once.
    fn body(rng: &mut Rand, a: usize, holes: &mut [(usize, usize)], regs: &RegisterSet) -> Term<UpdLabel> {
        let mut pool: Vec<Term<UpdLabel>> = (0..a).map(|_| Term::port()).collect();
        holes.shuffle(rng);
        for &(r, copy) in holes.iter() {
            let m = regs.arity(r);
            let args = (0..m)
                .map(|_| if !pool.is_empty() && rng.gen_bool(0.6) { take(rng, &mut pool) } else { leaf() })
                .collect();
            pool.push(Term::node(UpdLabel::Reg { reg: r, copy, arity: m }, args));
        }
        if pool.is_empty() || rng.gen_bool(0.3) {
            pool.push(leaf());
        }
        while pool.len() > 1 {
            let x = take(rng, &mut pool);
            let y = take(rng, &mut pool);
            pool.push(Term::node(UpdLabel::Out(Sym::new("f", 2)), vec![x, y]));
        }
        let mut t = pool.pop().unwrap();
        if rng.gen_bool(0.3) {
            t = Term::node(UpdLabel::Out(Sym::new("g", 1)), vec![t]);
        }
        t
    }

    /// A single-use update of arity `n`. Copy `i` moves registers along a
    /// random partial map, monotone when asked.
    pub fn update(rng: &mut Rand, name: &str, n: usize, regs: &RegisterSet, monotone: bool) -> Update {
        let k = regs.len();
        let mut holes: Vec<Vec<(usize, usize)>> = vec![Vec::new(); k];
        for i in 1..=n {
            let tw = twist(rng, k, monotone);
            for r in 0..k {
                if let Some(s) = tw.apply(r + 1) {
                    holes[s - 1].push((r, i));
                }
            }
        }
        let bodies = (0..k).map(|s| body(rng, regs.arity(s), &mut holes[s], regs)).collect();
        Update { name: name.into(), arity: n, bodies }
    }

    /// A transducer with at most `max_regs` registers. Half of them relabel
    /// with an until step first, giving two updates per input letter.
    pub fn random(rng: &mut Rand, max_regs: usize, monotone: bool) -> Transducer {
        let registers = registers(rng, max_regs);
        let input = input_alphabet();
        let (relabel, labels): (Program, Vec<(String, usize)>) = if rng.gen_bool(0.5) {
            (Program::default(), input.symbols().map(|s| (s.name, s.arity)).collect())
        } else {
            let pick = |rng: &mut Rand| names(["a", "b", "c"].into_iter().filter(|_| rng.gen_bool(0.5)));
            let (gamma, delta) = (pick(rng), pick(rng));
            let mut hom = std::collections::BTreeMap::new();
            let mut labels = Vec::new();
            for s in input.symbols() {
                for tag in [1, 2] {
                    hom.insert(format!("{}/{tag}", s.name), format!("{}{tag}", s.name));
                    labels.push((format!("{}{tag}", s.name), s.arity));
                }
            }
            (Program::new(vec![Step::Until { gamma, delta, reflexive: false }, Step::Hom(hom)]), labels)
        };
        let updates = labels.iter().map(|(n, a)| update(rng, n, *a, &registers, monotone)).collect();
        Transducer { input, output: output_alphabet(), registers, updates, relabel }
    }

    pub fn input_tree(rng: &mut Rand, nodes: usize) -> Term<Sym> {
        let syms: Vec<Sym> = input_alphabet().symbols().collect();
        super::term(rng, &syms, nodes, 0.0)
    }
}

#[cfg(test)]
mod tests {
    #[test]
    fn tree_counts() {
        // Motzkin numbers count unlabelled trees of arity at most 2
        let counts: Vec<usize> = (1..=7).map(|n| super::all_trees(n, 2, &["a"]).iter().filter(|t| t.len() == n).count()).collect();
        assert_eq!(counts, [1, 1, 2, 4, 9, 21, 51]);
        assert_eq!(super::all_trees(3, 2, &["a", "b"]).len(), 2 + 4 + 16);
    }
}
