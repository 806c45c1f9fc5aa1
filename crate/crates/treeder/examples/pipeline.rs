//! Combinator pipelines: parse, type and run one on a term value.

use treeder::combinator::{parse_pipeline, run_checked, symbols_of};
use treeder::sexp;
use treeder::value::{deserialize, TypeExpr};

fn main() {
    let ty = TypeExpr::parse("(term (finite (a 2) (b 1) (c 0)))").unwrap();
    let v = deserialize("(a (b c) (a c c))", &ty).unwrap();
    let symbols = symbols_of(&ty).unwrap();
    for text in [
        "(compose (prime flatten) (lift-term (prime unit)))",
        "(lift-term (finite-map ((a a) (b b) (c c))))",
        "(to-terminal)",
    ] {
        let p = parse_pipeline(&sexp::parse(text).unwrap(), &symbols).unwrap();
        let (out, out_ty) = run_checked(&p, &ty, &v).unwrap();
        println!("{p}\n  : {out_ty}\n  = {out}");
    }
}
