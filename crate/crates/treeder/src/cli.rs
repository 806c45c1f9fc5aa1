//! Command-line front end.
//!
//! Every result is printed as a canonical s-expression. Exit codes: 0 on
//! success, 1 for an undefined result, 2 for validation, type and I/O
//! failures (and route disagreements), 3 for parse errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::combinator;
use crate::error::{Error, Result};
use crate::factforest::{factorise, is_hereditarily_homogeneous, FiniteMonoid};
use crate::lambda::{self, Lam, LambdaFile, SimpleType, TypeSet, Vars};
use crate::matrix::{unfold_general, unfold_monotone, Mat};
use crate::relabel::{run_program, Program};
use crate::selftest::{self, Budget};
use crate::sexp::{self, Sexp, ToSexp};
use crate::term::Term;
use crate::transducer::{self, Severity, Transducer};
use crate::unfold_decomp::unfold_monotone_decomposed;
use crate::value::{self, Sym, TypeExpr};

pub const DEFAULT_SEED: u64 = 7;

#[derive(Parser, Debug)]
#[command(name = "treeder", version, about = "Ranked trees, unfolding, lambda normalisation and register tree transducers")]
pub struct Cli {
    /// Output format; s-expressions are the only one.
    #[arg(long, global = true, value_enum, default_value_t = Format::Sexp)]
    pub format: Format,
    #[command(subcommand)]
    pub verb: Verb,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Format {
    Sexp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Route {
    Direct,
    Lambda,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    General,
    Monotone,
    Decomposed,
}

#[derive(Subcommand, Debug)]
pub enum Verb {
    /// Normal form of a linear term typable in the declared type set.
    NormalizeLambda { file: PathBuf },
    /// Type of the term, its linearity and whether it stays in the type set.
    TypecheckLambda { file: PathBuf },
    /// Emits the automaton for type TAU, or runs it on a word.
    TypeDfa {
        file: PathBuf,
        #[arg(long)]
        tau: String,
        /// A word read from the leaf up, such as `(x λx @)`. Letters are `@`,
        /// `λx` (or `\x`) and variables.
        #[arg(long)]
        word: Option<String>,
        #[arg(long)]
        counter_free: bool,
    },
    /// Runs a register transducer on a tree.
    RunTransducer {
        stt: PathBuf,
        tree: PathBuf,
        #[arg(long, value_enum, default_value_t = Route::Direct)]
        route: Route,
    },
    /// Unfolds a term over a matrix power.
    Unfold {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::General)]
        mode: Mode,
    },
    /// Factorisation forest of a tree for a branch homomorphism.
    Factforest { file: PathBuf },
    /// Applies a relabelling program to a tree.
    Relabel { program: PathBuf, tree: PathBuf },
    /// Evaluates a combinator pipeline on a typed value.
    PipelineEval { pipeline: PathBuf, input: PathBuf },
    /// Checks a file, picking the format from its extension.
    Validate { file: PathBuf },
    /// Runs the oracle suites at reduced size.
    Selftest {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 40)]
        max_size: usize,
    },
}

/// What a verb produced: output lines and an exit code.
struct Done {
    out: Vec<String>,
    code: i32,
}

impl Done {
    fn ok(out: impl Into<String>) -> Done {
        Done { out: vec![out.into()], code: 0 }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Undefined(_) => 1,
        Error::Parse { .. } => 3,
        _ => 2,
    }
}

fn color() -> bool {
    std::env::var("TREEDER_COLOR").is_ok_and(|v| v == "1")
}

fn report(err: &mut dyn Write, kind: &str, msg: &str) {
    let tag = if color() {
        let c = if kind == "warning" { "33" } else { "31" };
        format!("\x1b[1;{c}m{kind}\x1b[0m")
    } else {
        kind.to_string()
    };
    let _ = writeln!(err, "{tag}: {msg}");
}

fn report_error(err: &mut dyn Write, e: &Error) {
    // the message already starts with its kind
    let text = e.to_string();
    if color() {
        let _ = writeln!(err, "\x1b[1;31m{text}\x1b[0m");
    } else {
        let _ = writeln!(err, "{text}");
    }
}

/// Parses `args` (program name first) and runs the verb.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = if color() { e.render().ansi().to_string() } else { e.render().to_string() };
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match dispatch(&cli.verb, err) {
        Ok(done) => {
            for line in &done.out {
                let _ = writeln!(out, "{line}");
            }
            done.code
        }
        Err(e) => {
            report_error(err, &e);
            exit_code(&e)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Validation(format!("{}: {e}", path.display())))
}

/// Reads a term whose symbols take their arity from the number of children.
pub fn tree_from_sexp(s: &Sexp) -> Result<Term<Sym>> {
    Term::from_sexp(s, |head, n| Ok(Sym::new(head.expect_atom("a symbol")?, n)))
}

fn read_tree(path: &Path) -> Result<Term<Sym>> {
    tree_from_sexp(&sexp::parse(&read(path)?)?)
}

fn dispatch(verb: &Verb, err: &mut dyn Write) -> Result<Done> {
    match verb {
        Verb::NormalizeLambda { file } => {
            let f = LambdaFile::parse(&read(file)?)?;
            let nf = lambda::normalize_linear(&f.term, &f.types, &f.vars)?;
            Ok(Done::ok(lambda::term_to_sexp(&nf).to_string()))
        }
        Verb::TypecheckLambda { file } => {
            let f = LambdaFile::parse(&read(file)?)?;
            let ty = lambda::infer_type(&f.term, &f.vars)?;
            let within = lambda::typable_within(&f.term, &f.types, &f.vars);
            let line = Sexp::list(vec![
                Sexp::atom("typing"),
                Sexp::list(vec![Sexp::atom("type"), ty.to_sexp()]),
                Sexp::list(vec![Sexp::atom("linear"), Sexp::atom(lambda::is_linear(&f.term).to_string())]),
                Sexp::list(vec![Sexp::atom("within-types"), Sexp::atom(within.to_string())]),
            ]);
            Ok(Done { out: vec![line.to_string()], code: if within { 0 } else { 2 } })
        }
        Verb::TypeDfa { file, tau, word, counter_free } => type_dfa(file, tau, word.as_deref(), *counter_free),
        Verb::RunTransducer { stt, tree, route } => {
            let tr = Transducer::parse(&read(stt)?)?;
            let diags = transducer::validate(&tr);
            for d in &diags {
                report(err, if d.severity == Severity::Error { "error" } else { "warning" }, &d.to_string());
            }
            if transducer::has_errors(&diags) {
                return Err(Error::Validation(format!("{} is not a valid transducer", stt.display())));
            }
            let t = read_tree(tree)?;
            let result = match route {
                Route::Direct => transducer::run(&tr, &t)?,
                Route::Lambda => transducer::run_via_lambda(&tr, &t)?,
                Route::Both => transducer::run_both(&tr, &t)?,
            };
            Ok(Done::ok(result.to_string()))
        }
        Verb::Unfold { file, mode } => {
            let (k, t) = read_unfold(&read(file)?)?;
            let m = match mode {
                Mode::General => unfold_general(k, &t)?,
                Mode::Monotone => unfold_monotone(k, &t)?,
                Mode::Decomposed => unfold_monotone_decomposed(k, &t)?,
            };
            Ok(Done::ok(m.map(|t| Term::flatten(&t)).to_string()))
        }
        Verb::Factforest { file } => factforest(&read(file)?),
        Verb::Relabel { program, tree } => {
            let p = Program::parse(&read(program)?)?;
            Ok(Done::ok(run_program(&read_tree(tree)?, &p)?.to_string()))
        }
        Verb::PipelineEval { pipeline, input } => {
            let (ty, v) = read_typed_value(&read(input)?)?;
            let p = read_pipeline(&read(pipeline)?, &combinator::symbols_of(&ty)?)?;
            let (out, out_ty) = combinator::run_checked(&p, &ty, &v)?;
            Ok(Done {
                out: vec![
                    Sexp::list(vec![Sexp::atom("type"), out_ty.to_sexp()]).to_string(),
                    Sexp::list(vec![Sexp::atom("value"), out.to_sexp()]).to_string(),
                ],
                code: 0,
            })
        }
        Verb::Validate { file } => validate(file),
        Verb::Selftest { seed, max_size } => Ok(selftest_report(&Budget::quick(*seed, *max_size))),
    }
}

fn words_of(text: &str) -> Result<Vec<Lam>> {
    let s = sexp::parse(text)?;
    s.expect_list("a word")?
        .iter()
        .map(|l| {
            let a = l.expect_atom("a letter")?;
            Ok(if a == "@" {
                Lam::App
            } else if let Some(x) = a.strip_prefix('λ').or_else(|| a.strip_prefix('\\')) {
                Lam::Abs(x.to_string())
            } else {
                Lam::Var(a.to_string())
            })
        })
        .collect()
}

fn type_dfa(file: &Path, tau: &str, word: Option<&str>, counter_free: bool) -> Result<Done> {
    let mut types = TypeSet::default();
    let mut vars = Vars::default();
    for item in sexp::parse_all(&read(file)?)? {
        match item.head() {
            Some("types") => types = TypeSet::from_sexp(&item)?,
            Some("vars") => vars = Vars::from_sexp(&item)?,
            _ => {}
        }
    }
    let tau = SimpleType::from_sexp(&sexp::parse(tau)?)?;
    let d = lambda::build_type_dfa(&types, &tau, &vars)?;
    let mut out = Vec::new();
    if let Some(w) = word {
        let accepted = d.accepts(&words_of(w)?);
        out.push(Sexp::list(vec![Sexp::atom("accepts"), Sexp::atom(accepted.to_string())]).to_string());
    }
    if counter_free {
        let cf = lambda::check_counter_free(&d)?;
        out.push(Sexp::list(vec![Sexp::atom("counter-free"), Sexp::atom(cf.to_string())]).to_string());
    }
    if out.is_empty() {
        out.push(d.to_sexp().to_string());
    }
    Ok(Done { out, code: 0 })
}

/// `(unfold k TERM)` where each node of TERM is `((mat ...) kids ...)`.
fn read_unfold(text: &str) -> Result<(usize, Term<Mat<Term<Sym>>>)> {
    let s = sexp::parse(text)?;
    let [k, t] = s.expect_tagged("unfold")? else { return Err(s.error("expected (unfold k term)")) };
    let k = k.expect_usize("k")?;
    let t = Term::from_sexp(t, |head, _| Mat::from_sexp(head, tree_from_sexp))?;
    Ok((k, t))
}

/// `(monoid ...) (hom (sym child elem) ...) (tree T)`. Unlisted branches
/// map to the unit.
fn factforest(text: &str) -> Result<Done> {
    let (mut m, mut hom, mut tree) = (None, None, None);
    for item in sexp::parse_all(text)? {
        match item.head() {
            Some("monoid") => m = Some(FiniteMonoid::from_sexp(&item)?),
            Some("hom") => hom = Some(item),
            Some("tree") => {
                let [t] = item.expect_tagged("tree")? else { return Err(item.error("expected (tree T)")) };
                tree = Some(tree_from_sexp(t)?);
            }
            _ => return Err(item.error("expected (monoid ...), (hom ...) or (tree ...)")),
        }
    }
    let missing = |what: &str| Error::Parse { line: 1, col: 1, msg: format!("missing ({what} ...)") };
    let m = m.ok_or_else(|| missing("monoid"))?;
    let t = tree.ok_or_else(|| missing("tree"))?;
    let mut table: BTreeMap<(String, usize), usize> = BTreeMap::new();
    if let Some(h) = &hom {
        for e in h.expect_tagged("hom")? {
            let [a, i, x] = e.expect_list("(sym child elem)")? else { return Err(e.error("expected (sym child elem)")) };
            let name = x.expect_atom("an element")?;
            let elem = m.element(name).ok_or_else(|| x.error(format!("unknown element `{name}`")))?;
            let i = i.expect_usize("a child index")?;
            if i == 0 {
                return Err(e.error("child indices start at 1"));
            }
            table.insert((a.expect_atom("a symbol")?.to_string(), i - 1), elem);
        }
    }
    let h = |s: &Sym, i: usize| table.get(&(s.name.clone(), i)).copied().unwrap_or(m.unit());
    let f = factorise(&t, &m, h)?;
    let hh = is_hereditarily_homogeneous(&m, &f.nest, &h);
    let flag = |name: &str, b: bool| Sexp::list(vec![Sexp::atom(name), Sexp::atom(b.to_string())]);
    let num = |name: &str, n: usize| Sexp::list(vec![Sexp::atom(name), Sexp::atom(n.to_string())]);
    let stats = Sexp::list(vec![
        Sexp::atom("stats"),
        num("calls", f.stats.calls),
        num("splits", f.stats.splits),
        num("depth", f.stats.depth),
        flag("measure-decreased", f.stats.measure_decreased),
        flag("hereditarily-homogeneous", hh),
    ]);
    Ok(Done { out: vec![f.nest.to_string(), stats.to_string()], code: 0 })
}

/// `(type T) (value V)`.
fn read_typed_value(text: &str) -> Result<(TypeExpr, value::Value)> {
    let items = sexp::parse_all(text)?;
    let [ty, v] = items.as_slice() else {
        return Err(Error::Parse { line: 1, col: 1, msg: "expected (type T) (value V)".into() });
    };
    let [ty_s] = ty.expect_tagged("type")? else { return Err(ty.error("expected (type T)")) };
    let [v_s] = v.expect_tagged("value")? else { return Err(v.error("expected (value V)")) };
    let ty = TypeExpr::from_sexp(ty_s)?;
    let v = value::deserialize(&v_s.to_string(), &ty)?;
    Ok((ty, v))
}

fn diagnostics(list: &[(Severity, String)]) -> Done {
    let items = list
        .iter()
        .map(|(s, m)| {
            let s = if *s == Severity::Error { "error" } else { "warning" };
            Sexp::list(vec![Sexp::atom(s), Sexp::atom(format!("{m:?}"))])
        })
        .collect::<Vec<_>>();
    let mut out = vec![Sexp::atom("diagnostics")];
    out.extend(items);
    let code = if list.iter().any(|(s, _)| *s == Severity::Error) { 2 } else { 0 };
    Done { out: vec![Sexp::list(out).to_string()], code }
}

fn validate(file: &Path) -> Result<Done> {
    let text = read(file)?;
    let ext = file.extension().and_then(|e| e.to_str()).unwrap_or("");
    let mut found: Vec<(Severity, String)> = Vec::new();
    match ext {
        "stt" => {
            let tr = Transducer::parse(&text)?;
            let d = transducer::validate(&tr);
            return Ok(Done {
                out: vec![Sexp::list(std::iter::once(Sexp::atom("diagnostics")).chain(d.iter().map(ToSexp::to_sexp)).collect()).to_string()],
                code: if transducer::has_errors(&d) { 2 } else { 0 },
            });
        }
        "lam" => {
            let f = LambdaFile::parse(&text)?;
            match lambda::infer_type(&f.term, &f.vars) {
                Err(e) => found.push((Severity::Error, e.to_string())),
                Ok(_) if !lambda::typable_within(&f.term, &f.types, &f.vars) => {
                    found.push((Severity::Error, "term leaves the declared type set".into()))
                }
                Ok(_) => {}
            }
            if !lambda::is_linear(&f.term) {
                found.push((Severity::Warning, "term is not linear".into()));
            }
        }
        "rel" => {
            Program::parse(&text)?;
        }
        "mat" => {
            let (k, t) = read_unfold(&text)?;
            if let Err(e) = unfold_general(k, &t) {
                found.push((Severity::Error, e.to_string()));
            }
        }
        "pipe" => {
            let p = read_pipeline(&text, &value::RankedAlphabet::default())?;
            found.extend(combinator::validate(&p).into_iter().map(|m| (Severity::Error, m)));
        }
        "val" => {
            read_typed_value(&text)?;
        }
        "sexp" | "tree" => {
            read_tree(file)?;
        }
        "monoid" => {
            let m = FiniteMonoid::from_sexp(&sexp::parse(&text)?)?;
            if !m.check_aperiodic() {
                found.push((Severity::Warning, "monoid is not aperiodic".into()));
            }
        }
        "ff" => {
            if let Err(e) = factforest(&text) {
                if matches!(e, Error::Parse { .. }) {
                    return Err(e);
                }
                found.push((Severity::Error, e.to_string()));
            }
        }
        other => return Err(Error::Validation(format!("unknown file kind `.{other}`"))),
    }
    Ok(diagnostics(&found))
}

/// A pipeline file: optional `(symbols (a 2) ...)` and then the pipeline.
fn read_pipeline(text: &str, known: &value::RankedAlphabet) -> Result<combinator::Pipeline> {
    let items = sexp::parse_all(text)?;
    let mut symbols = known.clone();
    let mut pipeline = None;
    for item in &items {
        if item.head() == Some("symbols") {
            symbols = symbols.union(&value::RankedAlphabet::from_sexp_items(item.expect_tagged("symbols")?)?)?;
        } else if pipeline.replace(item).is_some() {
            return Err(item.error("more than one pipeline"));
        }
    }
    let p = pipeline.ok_or_else(|| Error::Parse { line: 1, col: 1, msg: "missing pipeline".into() })?;
    combinator::parse_pipeline(p, &symbols)
}

/// Runs every suite and prints one line per suite plus a summary. Timings
/// are left out so that equal seeds give equal reports.
fn selftest_report(b: &Budget) -> Done {
    let mut out = vec![format!("(selftest (seed {}) (max-size {}))", b.seed, b.max_size)];
    let mut failed = 0;
    let suites = selftest::suites();
    for s in &suites {
        let line = match (s.run)(b) {
            Ok(detail) => format!("(suite {} pass {:?})", s.name, detail),
            Err(e) => {
                failed += 1;
                format!("(suite {} fail {:?})", s.name, e)
            }
        };
        out.push(line);
    }
    out.push(format!("(summary (passed {}) (failed {failed}))", suites.len() - failed));
    Done { out, code: if failed == 0 { 0 } else { 2 } }
}
