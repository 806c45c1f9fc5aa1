//! The bounded-stack automaton that types leftmost words.
//!
//! The pushdown machine starts in `i` with an empty stack. Reading a
//! variable `x : s1 -> ... -> sn` it pushes `sn, ..., s1` (so `s1` is on
//! top) and moves to `p`. In `p`, `λy` pushes the type of `y` and `@` pops.
//! The stack read top-down is then the spine of the type of the word so far.
//! Keeping only stacks whose type lies in a downward-closed set bounds the
//! height, so the stack fits in the state.

use std::collections::{HashMap, VecDeque};

use super::{Lam, SimpleType, TypeSet, Vars};
use crate::error::{bail, Result};
use crate::sexp::{Sexp, ToSexp};

pub const INIT: usize = 0;
pub const DEAD: usize = 1;

/// Deterministic automaton over variables, abstractions, `@` and output
/// letters. State `INIT` is `i`, `DEAD` absorbs every failure, and state
/// `j + 2` is `p` with the stack spelling `types[j]`.
#[derive(Clone, Debug)]
pub struct TypeDfa {
    pub types: Vec<SimpleType>,
    pub letters: Vec<Lam>,
    delta: Vec<usize>,
    pub accept: usize,
    /// Stack height bound: the size of the largest type.
    pub bound: usize,
}

impl TypeDfa {
    /// Automaton accepting the words of type `tau` whose every prefix type
    /// lies in `types`. `outs` lists the output letters to include.
    pub fn build(types: &TypeSet, tau: &SimpleType, vars: &Vars, outs: &[(String, usize)]) -> Result<TypeDfa> {
        if !types.contains(tau) {
            bail!(Precondition, "target type {tau} is not in the type set");
        }
        let tys: Vec<SimpleType> = types.iter().cloned().collect();
        let index: HashMap<&SimpleType, usize> = tys.iter().enumerate().map(|(j, t)| (t, j + 2)).collect();
        let bound = types.max_size();
        let state_of = |t: &SimpleType| -> usize {
            if t.spine().len() > bound {
                return DEAD;
            }
            index.get(t).copied().unwrap_or(DEAD)
        };
        let mut letters: Vec<Lam> = Vec::new();
        for x in vars.names() {
            letters.push(Lam::Var(x.clone()));
        }
        for x in vars.names() {
            letters.push(Lam::Abs(x.clone()));
        }
        letters.push(Lam::App);
        for (a, n) in outs {
            letters.push(Lam::Out(a.clone(), *n));
        }
        let n_states = tys.len() + 2;
        let mut delta = vec![DEAD; n_states * letters.len()];
        for (li, l) in letters.iter().enumerate() {
            // from i
            delta[INIT * letters.len() + li] = match l {
                Lam::Var(x) => state_of(vars.get(x).unwrap()),
                Lam::Out(_, 0) => state_of(&SimpleType::O),
                _ => DEAD,
            };
            for (j, t) in tys.iter().enumerate() {
                let q = j + 2;
                delta[q * letters.len() + li] = match (l, t) {
                    (Lam::Abs(y), _) => state_of(&SimpleType::arrow(vars.get(y).unwrap().clone(), t.clone())),
                    (Lam::App, SimpleType::Arrow(_, r)) => state_of(r),
                    (Lam::Out(_, n), SimpleType::O) if *n > 0 => q,
                    // includes @ on o, which would empty the stack
                    _ => DEAD,
                };
            }
        }
        let accept = index[tau];
        Ok(TypeDfa { types: tys, letters, delta, accept, bound })
    }

    pub fn states(&self) -> usize {
        self.types.len() + 2
    }

    pub fn letter_index(&self, l: &Lam) -> Option<usize> {
        self.letters.iter().position(|m| m == l)
    }

    /// Letters outside the alphabet lead to `DEAD`.
    pub fn step(&self, q: usize, l: &Lam) -> usize {
        match self.letter_index(l) {
            Some(li) => self.delta[q * self.letters.len() + li],
            None => DEAD,
        }
    }

    pub fn run(&self, w: &[Lam]) -> usize {
        w.iter().fold(INIT, |q, l| self.step(q, l))
    }

    pub fn accepts(&self, w: &[Lam]) -> bool {
        self.run(w) == self.accept
    }

    /// The type spelled by the stack of a `p` state.
    pub fn state_type(&self, q: usize) -> Option<&SimpleType> {
        q.checked_sub(2).and_then(|j| self.types.get(j))
    }

    /// Stack contents of a `p` state, top first.
    pub fn stack(&self, q: usize) -> Option<Vec<SimpleType>> {
        self.state_type(q).map(SimpleType::spine)
    }

    /// The action of each letter as a map on states.
    pub fn letter_maps(&self) -> Vec<Vec<usize>> {
        (0..self.letters.len())
            .map(|li| (0..self.states()).map(|q| self.delta[q * self.letters.len() + li]).collect())
            .collect()
    }

    /// All maps induced by nonempty words, at most `cap` of them.
    pub fn transition_monoid(&self, cap: usize) -> Result<Vec<Vec<usize>>> {
        let gens = self.letter_maps();
        let mut seen: HashMap<Vec<usize>, ()> = HashMap::new();
        let mut out = Vec::new();
        let mut queue: VecDeque<Vec<usize>> = gens.iter().cloned().collect();
        while let Some(f) = queue.pop_front() {
            if seen.insert(f.clone(), ()).is_some() {
                continue;
            }
            if seen.len() > cap {
                bail!(Precondition, "transition monoid exceeds {cap} elements");
            }
            for g in &gens {
                let h: Vec<usize> = f.iter().map(|&q| g[q]).collect();
                if !seen.contains_key(&h) {
                    queue.push_back(h);
                }
            }
            out.push(f);
        }
        Ok(out)
    }

    /// Aperiodicity of the transition monoid: every element satisfies
    /// `f^n = f^(n+1)` for some `n`.
    pub fn is_counter_free(&self) -> Result<bool> {
        for f in self.transition_monoid(1 << 20)? {
            let mut powers: Vec<Vec<usize>> = vec![f.clone()];
            loop {
                let last = powers.last().unwrap();
                let next: Vec<usize> = last.iter().map(|&q| f[q]).collect();
                if let Some(i) = powers.iter().position(|p| *p == next) {
                    if powers.len() - i != 1 {
                        return Ok(false);
                    }
                    break;
                }
                powers.push(next);
            }
        }
        Ok(true)
    }
}

impl ToSexp for TypeDfa {
    fn to_sexp(&self) -> Sexp {
        let state = |q: usize| match q {
            INIT => Sexp::atom("i"),
            DEAD => Sexp::atom("dead"),
            _ => Sexp::list(vec![Sexp::atom("p"), self.types[q - 2].to_sexp()]),
        };
        let letter = |l: &Lam| match l {
            Lam::Abs(x) => Sexp::atom(format!("λ{x}")),
            other => Sexp::atom(other.to_string()),
        };
        let mut rows = vec![Sexp::atom("delta")];
        for q in 0..self.states() {
            if q == DEAD {
                continue;
            }
            for (li, l) in self.letters.iter().enumerate() {
                let r = self.delta[q * self.letters.len() + li];
                if r != DEAD {
                    rows.push(Sexp::list(vec![state(q), letter(l), state(r)]));
                }
            }
        }
        Sexp::list(vec![
            Sexp::atom("dfa"),
            Sexp::list(vec![Sexp::atom("bound"), Sexp::atom(self.bound.to_string())]),
            Sexp::list(vec![Sexp::atom("states"), Sexp::atom(self.states().to_string())]),
            Sexp::list(vec![Sexp::atom("accept"), state(self.accept)]),
            Sexp::list(rows),
        ])
    }
}

pub fn build_type_dfa(types: &TypeSet, tau: &SimpleType, vars: &Vars) -> Result<TypeDfa> {
    TypeDfa::build(types, tau, vars, &[])
}

pub fn dfa_accepts(d: &TypeDfa, w: &[Lam]) -> bool {
    d.accepts(w)
}

pub fn check_counter_free(d: &TypeDfa) -> Result<bool> {
    d.is_counter_free()
}

/// The unbounded pushdown run from `i`. The stack is returned bottom first.
/// `None` when the run blocks.
pub fn pda_run(w: &[Lam], vars: &Vars) -> Option<Vec<SimpleType>> {
    let (first, rest) = w.split_first()?;
    let mut stack: Vec<SimpleType> = match first {
        Lam::Var(x) => vars.get(x)?.spine().into_iter().rev().collect(),
        Lam::Out(_, 0) => vec![SimpleType::O],
        _ => return None,
    };
    stack = pda_run_from(stack, rest, vars)?;
    Some(stack)
}

/// The run from `p` with the given stack (bottom first).
pub fn pda_run_from(mut stack: Vec<SimpleType>, w: &[Lam], vars: &Vars) -> Option<Vec<SimpleType>> {
    for l in w {
        match l {
            Lam::Abs(y) => stack.push(vars.get(y)?.clone()),
            Lam::App if stack.len() >= 2 => {
                stack.pop();
            }
            Lam::Out(_, n) if *n > 0 && stack == [SimpleType::O] => {}
            _ => return None,
        }
    }
    Some(stack)
}

/// What a word over `λy` and `@` does to any stack it can run on: it
/// erases the returned count of top entries, then pushes the returned
/// word (bottom first).
pub fn stack_effect(w: &[Lam], vars: &Vars) -> Option<(usize, Vec<SimpleType>)> {
    let mut erased = 0;
    let mut pushed = Vec::new();
    for l in w {
        match l {
            Lam::Abs(y) => pushed.push(vars.get(y)?.clone()),
            Lam::App => {
                if pushed.pop().is_none() {
                    erased += 1;
                }
            }
            _ => return None,
        }
    }
    Some((erased, pushed))
}

#[cfg(test)]
mod tests {
    use super::super::{parse_term, leftmost_word};
    use super::*;

    fn o() -> SimpleType {
        SimpleType::O
    }

    fn word(src: &str) -> Vec<Lam> {
        leftmost_word(&parse_term(src).unwrap()).unwrap()
    }

    #[test]
    fn hand_runs() {
        let ts = TypeSet::new([SimpleType::order(1)]);
        let vars = Vars::new([("f", SimpleType::order(1)), ("x", o())]);
        let d = build_type_dfa(&ts, &o(), &vars).unwrap();
        assert!(d.accepts(&word("(app f x)")));
        assert!(!d.accepts(&word("f")));
        assert!(d.accepts(&word("x")));
        assert!(!d.accepts(&word("(app x x)")));
        let d1 = build_type_dfa(&ts, &SimpleType::order(1), &vars).unwrap();
        assert!(d1.accepts(&word("f")));
        assert!(d1.accepts(&word("(lam x x)")));
        // o -> o -> o is outside the set
        assert!(!d1.accepts(&word("(lam x (lam x x))")));
    }

    #[test]
    fn small_sets_are_counter_free() {
        let vars = Vars::new([("f", SimpleType::order(1)), ("x", o())]);
        for n in [3, 5, 7] {
            let ts = TypeSet::new(SimpleType::all_up_to(n));
            for tau in ts.iter() {
                assert!(build_type_dfa(&ts, tau, &vars).unwrap().is_counter_free().unwrap());
            }
        }
    }

    #[test]
    fn pda_pushes_spine() {
        let vars = Vars::new([("g", SimpleType::order(2)), ("y", o())]);
        let st = pda_run(&word("(lam y (app g y))"), &vars).unwrap();
        // λy @ over g : o -> o -> o leaves o -> o -> o
        assert_eq!(st, vec![o(), o(), o()]);
        assert_eq!(stack_effect(&[Lam::App, Lam::Abs("y".into()), Lam::App, Lam::App], &vars), Some((2, vec![])));
    }

    #[test]
    fn emitted_table_mentions_accept() {
        let ts = TypeSet::new([SimpleType::order(1)]);
        let vars = Vars::new([("x", o())]);
        let d = build_type_dfa(&ts, &o(), &vars).unwrap();
        let s = d.to_sexp().to_string();
        assert!(s.contains("(accept (p o))"), "{s}");
    }
}
