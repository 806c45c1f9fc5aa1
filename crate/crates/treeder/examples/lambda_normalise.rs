//! Linear normalisation within a type set, and the family whose normal
//! forms grow exponentially.

use treeder::lambda::{exponential, normalize_linear, reference_normalize, show, LambdaFile};

fn main() {
    let f = LambdaFile::parse(
        "(types (-> o o) (-> (-> o o) o))
         (vars (x o) (y o) (g (-> o o)))
         (term (app (lam g (app g y)) (lam x x)))",
    )
    .unwrap();
    let nf = normalize_linear(&f.term, &f.types, &f.vars).unwrap();
    println!("{}  ~>  {}", show(&f.term), show(&nf));

    for n in 0..=6 {
        let m = exponential(n);
        let r = reference_normalize(&m).unwrap();
        let linear = normalize_linear(&m, &f.types, &treeder::lambda::exponential_vars()).map(|_| "ok".to_string()).unwrap_or_else(|e| e.to_string());
        println!("M_{n}: {:>3} nodes, normal form {:>4} nodes, linear route: {linear}", m.size(), r.size());
    }
}
