//! The automaton recognising leftmost words of a given type, run on a few
//! words and checked for counter-freeness.

use treeder::lambda::{build_type_dfa, check_counter_free, word_type, Lam, SimpleType, TypeSet, Vars};

fn main() {
    let o = SimpleType::O;
    let types = TypeSet::new([SimpleType::order(1)]);
    let vars = Vars::new([("x", o.clone()), ("y", o.clone())]);
    let d = build_type_dfa(&types, &o, &vars).unwrap();
    println!("{}", treeder::sexp::ToSexp::to_sexp(&d));
    println!("counter-free: {}", check_counter_free(&d).unwrap());

    let v = |x: &str| Lam::Var(x.into());
    let l = |x: &str| Lam::Abs(x.into());
    for w in [vec![v("x")], vec![v("x"), l("y"), Lam::App], vec![v("x"), l("y")], vec![v("x"), l("y"), l("x"), Lam::App]] {
        let shown: Vec<String> = w.iter().map(ToString::to_string).collect();
        let ty = word_type(&w, &vars, Some(&types)).map_or("-".into(), |t| t.to_string());
        println!("{:<12} accepted {:<5} type {ty}", shown.join(" "), d.accepts(&w));
    }
}
