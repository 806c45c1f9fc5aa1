use treeder::selftest::*;
use proptest::prelude::*;
use treeder::gen;
use treeder::relabel::*;
use treeder::{Sym, Term};

fn alphabet() -> Vec<Sym> {
    vec![Sym::new("a", 2), Sym::new("b", 1), Sym::new("c", 0), Sym::new("d", 2)]
}

fn random_tree(seed: u64, nodes: usize) -> Term<Sym> {
    gen::term(&mut gen::rng(seed), &alphabet(), nodes, 0.0)
}

fn random_names(seed: u64) -> Names {
    let all = ["a", "b", "c", "d"];
    all.iter().enumerate().filter(|(i, _)| seed >> i & 1 == 1).map(|(_, n)| n.to_string()).collect()
}

#[test]
fn selections_match_pair_oracle_exhaustively() {
    // shapes of size n are counted by Motzkin(n - 1), each node takes a or b
    let motzkin = [1, 1, 2, 4, 9, 21, 51];
    let want: usize = (1..=7).map(|n| motzkin[n - 1] << n).sum();
    assert_eq!(exhaustive_selections(7).unwrap(), want);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn selections_match_pair_oracle_on_larger_trees(seed in any::<u64>(), sets in 0u64..256) {
        let t = random_tree(seed, 40);
        let (g, d) = (random_names(sets), random_names(sets >> 4));
        let pairs = node_pairs(&t);
        prop_assert_eq!(selected(&char_until(&t, &g, &d, false)), until_oracle(&t, &pairs, &g, &d));
        prop_assert_eq!(selected(&char_since(&t, &g, &d, false)), since_oracle(&t, &pairs, &g, &d));
    }

    #[test]
    fn selections_keep_shape(seed in any::<u64>(), sets in 0u64..256, i in 1usize..3) {
        let t = random_tree(seed, 30);
        let (g, d) = (random_names(sets), random_names(sets >> 4));
        for s in [char_until(&t, &g, &d, false), char_since(&t, &g, &d, true), char_child(&t, i)] {
            let back = s.map(|l| untag(l).unwrap().0);
            prop_assert_eq!(&back, &t);
        }
    }

    #[test]
    fn descendant_by_factors_matches_direct(seed in any::<u64>(), sets in 0u64..16) {
        let t = random_tree(seed, 40);
        let g = random_names(sets);
        let direct = descendant_in(&t, &g);
        prop_assert_eq!(&descendant_in_by_factors(&t, &g), &direct);
        // brute force over strict descendants
        let pairs = node_pairs(&t);
        let want: Vec<bool> = (0..t.len()).map(|x| pairs[x].iter().any(|(y, _)| g.contains(&t.label(*y).unwrap().name))).collect();
        prop_assert_eq!(selected(&direct), want);
    }

    #[test]
    fn ancestor_matches_brute_force(seed in any::<u64>(), sets in 0u64..16) {
        let t = random_tree(seed, 40);
        let g = random_names(sets);
        let parents = t.parents();
        let want: Vec<bool> = (0..t.len())
            .map(|x| {
                let mut cur = parents[x].map(|p| p.0);
                while let Some(y) = cur {
                    if g.contains(&t.label(y).unwrap().name) {
                        return true;
                    }
                    cur = parents[y].map(|p| p.0);
                }
                false
            })
            .collect();
        prop_assert_eq!(selected(&ancestor_in(&t, &g)), want);
    }

    #[test]
    fn root_map_is_a_since_program(seed in any::<u64>()) {
        let t = random_tree(seed, 30);
        let up = |s: &Sym| Sym::new(s.name.to_uppercase(), s.arity);
        let direct = root_map(&t, up, |s| s.clone()).unwrap();
        // the root is the only node without an ancestor
        let all = names(["a", "b", "c", "d"]);
        let marked = char_since(&t, &all, &all, false);
        let via = marked.map(|l| {
            let (s, has_parent) = untag(l).unwrap();
            if has_parent { s } else { up(&s) }
        });
        prop_assert_eq!(direct, via);
    }
}

#[test]
fn until_then_hom_golden() {
    let t = Sym::parse_term("(a (b (a c c)) (d c (b c)))", &[("a", 2), ("b", 1), ("c", 0), ("d", 2)]).unwrap();
    let p = Program::parse("(relabel (until (G b) (D a)) (hom ((a/1 A) (b/1 B) (d/1 D))))").unwrap();
    let out = run_program(&t, &p).unwrap();
    // step by step: the root reaches `a` through `b`; the inner b has child a
    let step1 = char_until(&t, &names(["b"]), &names(["a"]), false);
    assert_eq!(step1.to_string(), "(a/1 (b/1 (a/2 c/2 c/2)) (d/2 c/2 (b/2 c/2)))");
    assert_eq!(out.to_string(), "(A (B (a/2 c/2 c/2)) (d/2 c/2 (b/2 c/2)))");
}

#[test]
fn parent_of_root_is_marked() {
    let t = random_tree(3, 20);
    let p = parent(&t);
    assert!(p.root().unwrap().name.ends_with("[-]"));
    assert_eq!(p.labels().filter(|l| l.name.ends_with("[-]")).count(), 1);
}
