//! A hereditarily homogeneous factorisation of a tree for a branch
//! homomorphism into a small aperiodic monoid.

use treeder::factforest::{factorise, is_hereditarily_homogeneous, FiniteMonoid};
use treeder::sexp;
use treeder::Sym;

fn main() {
    let m = FiniteMonoid::from_sexp(&sexp::parse("(monoid (elems 1 z) (unit 1) (mul ((z z z))))").unwrap()).unwrap();
    assert!(m.check_aperiodic());
    assert!(!FiniteMonoid::cyclic(2).check_aperiodic());

    let t = Sym::parse_term("(a (b (a c c)) (a (b c) c))", &[("a", 2), ("b", 1), ("c", 0)]).unwrap();
    let z = m.element("z").unwrap();
    // edges below `a` read z, all others read the unit
    let h = |s: &Sym, _: usize| if s.name == "a" { z } else { m.unit() };
    let f = factorise(&t, &m, h).unwrap();
    println!("{}", f.nest);
    println!("{:?}", f.stats);
    assert_eq!(f.nest.flat(), t);
    assert!(is_hereditarily_homogeneous(&m, &f.nest, &h));
}
