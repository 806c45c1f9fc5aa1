//! Terms with ports: substitution, flattening and the unit laws.

use treeder::prime::factorize_by;
use treeder::{Sym, Term};

fn main() {
    let sig = [("a", 2), ("b", 1), ("c", 0)];
    let t = Sym::parse_term("(a (b _) (a c _))", &sig).unwrap();
    println!("t            = {t}  (arity {}, {} nodes)", treeder::Ranked::arity(&t), t.size());

    // plug two terms into the ports
    let filled = t.substitute(&[Sym::parse_term("c", &sig).unwrap(), Sym::parse_term("(b c)", &sig).unwrap()]).unwrap();
    println!("t[c, (b c)]  = {filled}");

    // cut below every a: a term of terms whose flattening is t again
    let tt = factorize_by(&t, |parent, _| t.label(parent).unwrap().name != "a");
    println!("factors      = {}", tt.to_sexp_with(|f| treeder::sexp::Sexp::atom(format!("[{f}]"))));
    assert_eq!(Term::flatten(&tt), t);

    assert_eq!(Term::flatten(&Term::unit(t.clone())), t);
    assert_eq!(Term::flatten(&t.lift_unit()), t);
    println!("unit laws hold");
}
