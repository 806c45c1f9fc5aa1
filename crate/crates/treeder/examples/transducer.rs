//! A register transducer run directly and through its lambda encoding.

use treeder::transducer::{lambda_repr, run, run_via_lambda, validate, Transducer};
use treeder::lambda::show;
use treeder::Sym;

fn main() {
    let tr = Transducer::parse(include_str!("../data/preorder.stt")).unwrap();
    assert!(validate(&tr).is_empty());
    for u in &tr.updates {
        let m = lambda_repr(u, &tr.registers).unwrap();
        let coords: Vec<String> = m.tuple.iter().map(show).collect();
        println!("{:<8} monotone {:<5} {}", u.name, m.is_monotone(), coords.join(" | "));
    }
    let t = Sym::parse_term("(a (b c) (a c (b c)))", &[("a", 2), ("b", 1), ("c", 0)]).unwrap();
    let direct = run(&tr, &t).unwrap();
    let via = run_via_lambda(&tr, &t).unwrap();
    println!("input  {t}\ndirect {direct}\nlambda {via}");
    assert_eq!(direct, via);
}
