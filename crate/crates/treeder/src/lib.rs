pub mod error;
pub mod sexp;
pub mod term;
pub mod value;

pub use error::{Error, Result};
pub use term::{Ranked, Slot, Term};
pub use value::{Fold, Grouping, RankedAlphabet, Side, Sym, TypeExpr, Value};
pub mod matrix;
pub mod prime;
pub mod cli;
pub mod combinator;
pub mod factforest;
pub mod gen;
pub mod unfold_decomp;
pub mod lambda;
pub mod relabel;
pub mod selftest;
pub mod transducer;
