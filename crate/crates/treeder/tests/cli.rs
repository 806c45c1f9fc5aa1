use std::path::PathBuf;
use std::process::Command;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name).to_string_lossy().into_owned()
}

fn treeder(args: &[&str]) -> (String, String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_treeder")).args(args).env_remove("TREEDER_COLOR").output().unwrap();
    (String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap(), out.status.code().unwrap())
}

#[test]
fn normalize_identity_application() {
    assert_eq!(treeder(&["normalize-lambda", &data("id.lam")]), ("y\n".into(), String::new(), 0));
}

#[test]
fn typecheck_reports_type() {
    let (out, _, code) = treeder(&["typecheck-lambda", &data("id.lam")]);
    assert_eq!(out, "(typing (type o) (linear true) (within-types true))\n");
    assert_eq!(code, 0);
}

#[test]
fn mirror_both_routes_print_once() {
    let (out, _, code) = treeder(&["run-transducer", &data("mirror.stt"), &data("tree.sexp"), "--route", "both"]);
    // tree.sexp is (a (b c) (a c (b c)))
    assert_eq!(out, "(a (a (b c) c) (b c))\n");
    assert_eq!(code, 0);
}

#[test]
fn preorder_transducer_lists_labels() {
    for route in ["direct", "lambda", "both"] {
        let (out, _, code) = treeder(&["run-transducer", &data("preorder.stt"), &data("tree.sexp"), "--route", route]);
        assert_eq!(out, "(A (B (C (A (C (B (C end)))))))\n", "{route}");
        assert_eq!(code, 0);
    }
}

#[test]
fn decomposed_unfold_of_swap_is_undefined() {
    let (out, err, code) = treeder(&["unfold", "--mode", "decomposed", &data("nonmono.mat")]);
    assert_eq!(code, 1);
    assert!(out.is_empty());
    assert!(err.contains("non-monotone label at node 0"), "{err}");
}

#[test]
fn general_unfold_of_three_swaps() {
    let (out, _, code) = treeder(&["unfold", "--mode", "general", &data("nonmono.mat")]);
    assert_eq!(out, "(mat 2 0 (tuple (a (a (a white))) (a (a (a black)))) ())\n");
    assert_eq!(code, 0);
}

#[test]
fn unfold_modes_agree_on_monotone_input() {
    for mode in ["general", "monotone", "decomposed"] {
        let (out, _, code) = treeder(&["unfold", "--mode", mode, &data("mono.mat")]);
        assert_eq!(out, "(mat 2 0 (tuple (f x u) (g y v)) ())\n", "{mode}");
        assert_eq!(code, 0);
    }
}

#[test]
fn relabel_until() {
    let (out, _, code) = treeder(&["relabel", &data("until.rel"), &data("tree.sexp")]);
    assert_eq!(out, "(A (B c) (A c (B c)))\n");
    assert_eq!(code, 0);
}

#[test]
fn factforest_reports_stats() {
    let (out, _, code) = treeder(&["factforest", &data("reset.ff")]);
    assert_eq!(code, 0);
    let stats = out.lines().nth(1).unwrap();
    assert!(stats.contains("(measure-decreased true)") && stats.contains("(hereditarily-homogeneous true)"), "{stats}");
}

#[test]
fn pipeline_round_trip() {
    let (out, _, code) = treeder(&["pipeline-eval", &data("roundtrip.pipe"), &data("term.val")]);
    assert_eq!(out, "(type (term (finite (a 2) (b 1) (c 0))))\n(value (a (b c) _))\n");
    assert_eq!(code, 0);
}

#[test]
fn type_dfa_word_and_counter_freeness() {
    let (out, _, code) = treeder(&["type-dfa", &data("id.lam"), "--tau", "o", "--word", "(x λx @)", "--counter-free"]);
    assert_eq!(out, "(accepts true)\n(counter-free true)\n");
    assert_eq!(code, 0);
    let (out, _, _) = treeder(&["type-dfa", &data("id.lam"), "--tau", "o", "--word", "(λx)"]);
    assert_eq!(out, "(accepts false)\n");
}

#[test]
fn shipped_files_validate() {
    for f in ["mirror.stt", "identity.stt", "preorder.stt", "id.lam", "mono.mat", "nonmono.mat", "until.rel", "reset.ff", "roundtrip.pipe", "term.val", "tree.sexp"] {
        assert_eq!(treeder(&["validate", &data(f)]), ("(diagnostics)\n".into(), String::new(), 0), "{f}");
    }
}

#[test]
fn exit_codes() {
    let dir = std::env::temp_dir().join(format!("treeder-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.join(name);
        std::fs::write(&p, text).unwrap();
        p.to_string_lossy().into_owned()
    };
    let unclosed = write("bad.lam", "(term (app x");
    let (_, err, code) = treeder(&["normalize-lambda", &unclosed]);
    assert_eq!(code, 3);
    assert!(err.starts_with("parse error at 1:"), "{err}");
    let nonlinear = write("dup.lam", "(types (-> o o) (-> o (-> o o))) (vars (x o) (y o) (f (-> o (-> o o)))) (term (app (lam x (app f x x)) y))");
    assert_eq!(treeder(&["normalize-lambda", &nonlinear]).2, 1);
    let ill_typed = write("ill.lam", "(types (-> o o)) (vars (x o)) (term (app x x))");
    assert_eq!(treeder(&["typecheck-lambda", &ill_typed]).2, 2);
    let bad_stt = write("bad.stt", "(input (a 0)) (output (a 0)) (registers (out 0) (r 1)) (output-register out) (update a 0 ((out a) (r (reg r 1 a))))");
    let (out, _, code) = treeder(&["validate", &bad_stt]);
    assert_eq!(code, 2);
    assert!(out.contains("register arity is 1") && out.contains("copy 1 of `r`"), "{out}");
    assert_eq!(treeder(&["no-such-verb"]).2, 2);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn selftest_is_deterministic_and_seeded() {
    let a = treeder(&["selftest", "--seed", "3", "--max-size", "12"]);
    let b = treeder(&["selftest", "--seed", "3", "--max-size", "12"]);
    assert_eq!(a, b);
    assert_eq!(a.2, 0);
    assert!(a.0.ends_with("(summary (passed 11) (failed 0))\n"));
}

#[test]
fn color_only_when_asked() {
    let out = Command::new(env!("CARGO_BIN_EXE_treeder"))
        .args(["unfold", "--mode", "monotone", &data("nonmono.mat")])
        .env("TREEDER_COLOR", "1")
        .output()
        .unwrap();
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("\x1b["));
    let (_, err, _) = treeder(&["unfold", "--mode", "monotone", &data("nonmono.mat")]);
    assert!(!err.contains('\x1b'));
}
