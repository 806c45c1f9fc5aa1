use proptest::prelude::*;
use treeder::gen::{self, transducer as tg};
use treeder::lambda::{is_linear, typable_within, Lam, SimpleType};
use treeder::prime::{preorder_sym, spine_labels, PRE0, PRE2};
use treeder::transducer::*;
use treeder::{Slot, Sym, Term};

fn load(name: &str) -> Transducer {
    let path = format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"));
    Transducer::parse(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn mirror_oracle(t: &Term<Sym>) -> Term<Sym> {
    let ends = t.ends();
    fn go(t: &Term<Sym>, ends: &[usize], p: usize) -> Term<Sym> {
        let mut kids: Vec<Term<Sym>> = t.children_of(p, ends).into_iter().map(|c| go(t, ends, c)).collect();
        kids.reverse();
        Term::node(t.label(p).unwrap().clone(), kids)
    }
    go(t, &ends, 0)
}

/// Output letters across all bodies of an update.
fn letters(u: &Update) -> usize {
    u.bodies.iter().map(|b| b.labels().filter(|l| matches!(l, UpdLabel::Out(_))).count()).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn routes_agree_on_random_transducers(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let tr = tg::random(&mut rng, 3, true);
        prop_assert!(!has_errors(&validate(&tr)), "{:?}", validate(&tr));
        let t = tg::input_tree(&mut rng, 40);
        let direct = run(&tr, &t).unwrap();
        prop_assert_eq!(run_via_lambda(&tr, &t).unwrap(), direct.clone());
        // single use: every output letter comes from one body node of one update
        let ut = tr.update_tree(&t).unwrap();
        let bound: usize = ut.labels().map(|s| letters(tr.update(&s.name).unwrap())).sum();
        prop_assert!(direct.size() <= bound);
    }

    #[test]
    fn monotone_clause_matches_representation(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let regs = tg::registers(&mut rng, 3);
        for n in 0..=3 {
            let u = tg::update(&mut rng, "u", n, &regs, seed % 2 == 0);
            let m = lambda_repr(&u, &regs).unwrap();
            prop_assert_eq!(is_monotone_update(&u), m.is_monotone());
        }
    }

    #[test]
    fn representations_are_linear_and_bounded(seed in any::<u64>()) {
        let mut rng = gen::rng(seed);
        let tr = tg::random(&mut rng, 3, rng_bool(seed));
        let (types, mut vars) = lambda_setting(&tr);
        for (r, a) in &tr.registers.regs {
            vars.insert(format!("h_{r}"), SimpleType::order(*a));
        }
        for u in &tr.updates {
            let m = lambda_repr(u, &tr.registers).unwrap();
            let mut it = m.grouping.as_slice().iter();
            for coord in &m.tuple {
                // each port stands for a register of the given arity
                let t = Term::from_slots(coord.slots().iter().map(|s| match s {
                    Slot::Port => {
                        let (_, r) = it.next().unwrap();
                        Slot::Node(Lam::Var(format!("h_{}", tr.registers.regs[r - 1].0)))
                    }
                    Slot::Node(l) => Slot::Node(l.clone()),
                }).collect()).unwrap();
                prop_assert!(is_linear(&t));
                prop_assert!(typable_within(&t, &types, &vars), "{}", treeder::lambda::show(&t));
            }
        }
    }

    #[test]
    fn mirror_matches_recursive_oracle(seed in any::<u64>()) {
        let tr = load("mirror.stt");
        let t = tg::input_tree(&mut gen::rng(seed), 50);
        let want = mirror_oracle(&t);
        prop_assert_eq!(&run(&tr, &t).unwrap(), &want);
        prop_assert_eq!(&run_via_lambda(&tr, &t).unwrap(), &want);
    }

    #[test]
    fn preorder_transducer_lists_labels(seed in any::<u64>()) {
        let tr = load("preorder.stt");
        let t = tg::input_tree(&mut gen::rng(seed), 50);
        let out = run_both(&tr, &t).unwrap();
        let chain: Vec<String> = out.labels().filter(|s| s.arity == 1).map(|s| s.name.to_lowercase()).collect();
        let spine = preorder_sym(&t).payload;
        let want: Vec<String> = spine_labels(&spine, &Sym::new(PRE0, 0), &Sym::new(PRE2, 2)).into_iter().map(|s| s.name).collect();
        prop_assert_eq!(chain, want);
    }
}

fn rng_bool(seed: u64) -> bool {
    !seed.is_multiple_of(3)
}

#[test]
fn identity_and_fixed_examples() {
    let id = load("identity.stt");
    let t = Sym::parse_term("(a (b c) c)", &[("a", 2), ("b", 1), ("c", 0)]).unwrap();
    assert_eq!(run(&id, &t).unwrap(), t);
    assert_eq!(run_via_lambda(&id, &t).unwrap(), t);
    let c = Sym::parse_term("c", &[("c", 0)]).unwrap();
    assert_eq!(evaluate_update_tree(&id, &c).unwrap(), vec![c]);
    for name in ["mirror.stt", "identity.stt", "preorder.stt"] {
        assert!(validate(&load(name)).is_empty(), "{name}");
    }
}

#[test]
fn order_crossing_update_is_undefined_on_the_lambda_route() {
    let src = "
        (input (a 1) (c 0))
        (output (f 2) (e 0))
        (registers (out 0) (p 0) (q 0))
        (output-register out)
        (update a 1 ((out (f (reg out 1) e)) (p (reg q 1)) (q (reg p 1))))
        (update c 0 ((out e) (p e) (q e)))";
    let tr = Transducer::parse(src).unwrap();
    let d = validate(&tr);
    assert!(d.iter().any(|d| d.msg.starts_with("monotone")), "{d:?}");
    assert!(!lambda_repr(&tr.updates[0], &tr.registers).unwrap().is_monotone());
    let t = Sym::parse_term("(a (a c))", &[("a", 1), ("c", 0)]).unwrap();
    assert_eq!(run(&tr, &t).unwrap().to_string(), "(f (f e e) e)");
    assert!(run_via_lambda(&tr, &t).unwrap_err().is_undefined());
    assert!(run_both(&tr, &t).is_err());
}

#[test]
fn relabelling_failure_is_undefined() {
    let src = "
        (input (a 2) (b 1) (c 0))
        (output (c 0))
        (registers (out 0))
        (output-register out)
        (update c 0 ((out c)))";
    let tr = Transducer::parse(src).unwrap();
    let t = Sym::parse_term("(b c)", &[("b", 1), ("c", 0)]).unwrap();
    assert!(run(&tr, &t).unwrap_err().is_undefined());
    assert!(run_via_lambda(&tr, &t).unwrap_err().is_undefined());
    assert!(validate(&tr).iter().any(|d| d.severity == Severity::Warning));
}
