//! Chains of swaps over a two-coloured leaf. The general unfolding tracks
//! the parity of the chain; the monotone one refuses the swap.

use treeder::matrix::{unfold_general, unfold_monotone, Mat};
use treeder::{Grouping, Sym, Term};

fn main() {
    let unit = |n: &str, a: usize| Term::unit(Sym::new(n, a));
    let swap = Mat::new(vec![unit("a", 1), unit("a", 1)], Grouping::new(vec![(1, 2), (1, 1)], 2, 1).unwrap(), 1).unwrap();
    let leaf = Mat::new(vec![unit("black", 0), unit("white", 0)], Grouping::default(), 0).unwrap();
    let mut t = Term::unit(leaf);
    for n in 1..=6 {
        t = Term::node(swap.clone(), vec![t]);
        let u = unfold_general(2, &t).unwrap();
        let first = Term::flatten(&u.tuple[0]);
        let monotone = unfold_monotone(2, &t).map(|_| "defined".to_string()).unwrap_or_else(|e| e.to_string());
        println!("n = {n}: first = {first}  monotone: {monotone}");
    }
}
