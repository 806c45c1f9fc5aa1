//! Monotone unfolding through factorisation forests, checked against the
//! general unfolding on random inputs.

use treeder::gen::{self, TwistDomain};
use treeder::matrix::unfold_general;
use treeder::unfold_decomp::unfold_monotone_decomposed_traced;

fn main() {
    let mut rng = gen::rng(11);
    for k in 1..=3 {
        for nodes in [5, 20, 60] {
            let t = gen::mat_term(&mut rng, k, nodes, &TwistDomain::Monotone);
            let (m, trace) = unfold_monotone_decomposed_traced(k, &t).unwrap();
            assert_eq!(m, unfold_general(k, &t).unwrap());
            println!("k = {k}, {nodes:>2} nodes: depth {}, {} layers, consistent {}", trace.depth, trace.layers, trace.consistent);
        }
    }
}
