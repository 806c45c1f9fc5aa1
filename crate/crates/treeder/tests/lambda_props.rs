use std::collections::HashMap;

use proptest::prelude::*;
use rand::Rng;
use treeder::gen::{self, lambda as lg};
use treeder::lambda::*;
use treeder::{Slot, Term};

fn o() -> SimpleType {
    SimpleType::O
}

fn fixed_types() -> TypeSet {
    TypeSet::new([
        SimpleType::order(2),
        SimpleType::arrow(SimpleType::order(1), o()),
        SimpleType::arrow(SimpleType::order(1), SimpleType::order(1)),
    ])
}

fn random_linear(seed: u64, nodes: usize, steps: usize) -> (LambdaTerm, TypeSet, Vars) {
    let types = fixed_types();
    let vars = lg::vars_for(&types);
    let mut rng = gen::rng(seed);
    let tys: Vec<SimpleType> = types.iter().cloned().collect();
    loop {
        let tau = tys[rng.gen_range(0..tys.len())].clone();
        if let Some(t) = lg::linear(&mut rng, &types, &vars, &tau, nodes, steps) {
            return (t, types, vars);
        }
    }
}

/// Gives binders pairwise distinct names, also distinct from free names,
/// so that splicing a redex never captures.
fn separate_binders(t: &LambdaTerm, vars: &Vars) -> (LambdaTerm, Vars) {
    let bind = binders(t);
    let mut vars = vars.clone();
    let mut names: HashMap<usize, String> = HashMap::new();
    for (p, s) in t.slots().iter().enumerate() {
        if let Slot::Node(Lam::Abs(x)) = s {
            let z = format!("b{p}");
            vars.insert(z.clone(), vars.get(x).unwrap().clone());
            names.insert(p, z);
        }
    }
    let slots = t
        .slots()
        .iter()
        .enumerate()
        .map(|(p, s)| match s {
            Slot::Node(Lam::Abs(_)) => Slot::Node(Lam::Abs(names[&p].clone())),
            Slot::Node(Lam::Var(_)) if bind[p].is_some() => Slot::Node(Lam::Var(names[&bind[p].unwrap()].clone())),
            other => other.clone(),
        })
        .collect();
    (Term::from_slots(slots).unwrap(), vars)
}

/// One β-step on the redex at `a` by splicing slots.
fn splice(t: &LambdaTerm, a: usize) -> LambdaTerm {
    let ends = t.ends();
    let bind = binders(t);
    let abs = a + 1;
    let v = (0..t.len()).find(|&q| bind[q] == Some(abs)).unwrap();
    let arg = &t.slots()[ends[abs]..ends[a]];
    let mut slots = t.slots()[..a].to_vec();
    for q in abs + 1..ends[abs] {
        if q == v {
            slots.extend(arg.iter().cloned());
        } else {
            slots.push(t.slots()[q].clone());
        }
    }
    slots.extend(t.slots()[ends[a]..].iter().cloned());
    Term::from_slots(slots).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn type_is_leftmost_word_type(seed in any::<u64>()) {
        let (t, types, vars) = random_linear(seed, 30, 4);
        let ty = infer_type(&t, &vars).unwrap();
        prop_assert_eq!(word_type(&leftmost_word(&t).unwrap(), &vars, None), Some(ty));
        let (a, b) = typable_within_both(&t, &types, &vars);
        prop_assert!(a && b);
    }

    #[test]
    fn linear_normalisation_matches_reference(seed in any::<u64>()) {
        let (t, types, vars) = random_linear(seed, 40, 8);
        prop_assert!(is_linear(&t));
        let n = normalize_linear(&t, &types, &vars).unwrap();
        let r = reference_normalize(&t).unwrap();
        prop_assert!(alpha_eq(&n, &r), "{} vs {}", show(&n), show(&r));
        prop_assert!(is_normal(&n));
        prop_assert!(n.len() <= t.len());
        prop_assert_eq!(free_vars(&n), free_vars(&t));
    }

    #[test]
    fn eval_contracts_exactly_the_chosen_redexes(seed in any::<u64>()) {
        let (t, types, vars) = random_linear(seed, 30, 6);
        let (t, vars) = separate_binders(&t, &vars);
        for sigma in types.arrows_by_size() {
            for x in vars.names() {
                let found = find_redexes(&t, &vars, x, &sigma).unwrap();
                if found.is_empty() {
                    continue;
                }
                let got = eval_redexes(&t, &vars, x, &sigma).unwrap();
                // contract the chosen redexes one by one, innermost first,
                // so earlier positions stay valid
                let mut want = t.clone();
                for &a in found.iter().rev() {
                    want = splice(&want, a);
                }
                prop_assert!(alpha_eq(&got, &want), "{} vs {}", show(&got), show(&want));
                let f = factorize_thin(&t, &vars, x, &sigma).unwrap();
                prop_assert_eq!(Term::flatten(&f), t.clone());
                prop_assert!(f.labels().all(is_thin));
            }
        }
    }

    #[test]
    fn thin_normal_forms_follow_preorder(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let t = lg::thin(&mut rng, 12, 5);
        prop_assert!(is_thin(&t) && is_linear(&t));
        let (f, origin) = normalize_thin_traced(&t).unwrap();
        prop_assert_eq!(&f, &reference_normalize_ports(&t).unwrap());
        // ports may be reordered, nodes may not
        let nodes: Vec<usize> = origin.iter().copied().filter(|&p| !matches!(t.slots()[p], Slot::Port)).collect();
        prop_assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        let kept = survivors(&t);
        prop_assert!(nodes.iter().all(|p| kept.contains(p)));
    }

    #[test]
    fn stack_effect_is_stack_independent(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let types: Vec<SimpleType> = SimpleType::all_up_to(5);
        let vars = Vars::new([("y", o()), ("f", SimpleType::order(1)), ("g", SimpleType::arrow(SimpleType::order(1), o()))]);
        let names = ["y", "f", "g"];
        let w: Vec<Lam> = (0..rng.gen_range(0..8))
            .map(|_| if rng.gen_bool(0.5) { Lam::App } else { Lam::Abs(names[rng.gen_range(0..3)].into()) })
            .collect();
        let (erased, pushed) = stack_effect(&w, &vars).unwrap();
        for _ in 0..2 {
            let s: Vec<SimpleType> = (0..rng.gen_range(1..8)).map(|_| types[rng.gen_range(0..types.len())].clone()).collect();
            match pda_run_from(s.clone(), &w, &vars) {
                Some(r) => {
                    let mut want = s[..s.len() - erased].to_vec();
                    want.extend(pushed.iter().cloned());
                    prop_assert_eq!(r, want);
                }
                None => prop_assert!(s.len() < erased + 1),
            }
        }
    }
}

/// All words of length at most `n` over the letters of `vars`.
fn words(vars: &Vars, n: usize) -> Vec<Vec<Lam>> {
    let mut letters: Vec<Lam> = vars.names().map(|x| Lam::Var(x.clone())).collect();
    letters.extend(vars.names().map(|x| Lam::Abs(x.clone())));
    letters.push(Lam::App);
    let mut out = vec![vec![]];
    let mut layer = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for w in &layer {
            for l in &letters {
                let mut v: Vec<Lam> = w.clone();
                v.push(l.clone());
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

#[test]
fn pushdown_invariant_on_short_words() {
    let vars = Vars::new([("x", o()), ("f", SimpleType::order(1)), ("h", SimpleType::arrow(SimpleType::order(1), o()))]);
    for w in words(&vars, 6) {
        let by_rules = word_type(&w, &vars, None);
        let by_stack = pda_run(&w, &vars).map(|mut s| {
            s.reverse();
            SimpleType::from_spine(&s).unwrap()
        });
        assert_eq!(by_rules, by_stack, "{w:?}");
    }
}
