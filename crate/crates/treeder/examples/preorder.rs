//! The pre-order spine of a term and the grouping that keeps its ports.

use treeder::prime::{preorder_sym, spine_labels, PRE0, PRE2};
use treeder::Sym;

fn main() {
    let t = Sym::parse_term("(a (b _) (a c _))", &[("a", 2), ("b", 1), ("c", 0)]).unwrap();
    let f = preorder_sym(&t);
    println!("input     {t}");
    println!("spine     {}", f.payload);
    println!("grouping  {}", f.grouping.to_sexp());
    let labels: Vec<String> = spine_labels(&f.payload, &Sym::new(PRE0, 0), &Sym::new(PRE2, 2)).iter().map(|s| s.name.clone()).collect();
    println!("order     {}", labels.join(" "));
}
