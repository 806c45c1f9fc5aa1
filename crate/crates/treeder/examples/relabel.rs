//! Relabelling programs built from until, since and child selections.

use treeder::relabel::{descendant_in, names, run_program, Program};
use treeder::Sym;

fn main() {
    let t = Sym::parse_term("(a (b c) (a c (b c)))", &[("a", 2), ("b", 1), ("c", 0)]).unwrap();
    for text in [
        "(relabel (until (G a) (D c)))",
        "(relabel (until (G a) (D c) reflexive))",
        "(relabel (since (G a b) (D a)))",
        "(relabel (child 2))",
        "(relabel (child 1) (hom ((a/1 A) (b/1 B) (c/1 C) (a/2 a) (b/2 b) (c/2 c))))",
    ] {
        let p = Program::parse(text).unwrap();
        println!("{text}\n  {}", run_program(&t, &p).unwrap());
    }
    println!("strictly above a b: {}", descendant_in(&t, &names(["b"])));
}
