//! Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any
//! fails.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use treeder::selftest::{self, Budget};

const SEED: u64 = 20_240_601;

fn treeder(args: &[&str]) -> Result<(Vec<u8>, i32), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_treeder"))
        .args(args)
        .env_remove("TREEDER_COLOR")
        .output()
        .map_err(|e| format!("could not start treeder: {e}"))?;
    Ok((out.stdout, out.status.code().unwrap_or(-1)))
}

fn cli_determinism() -> Result<String, String> {
    let (a, ca) = treeder(&["selftest", "--seed", "7"])?;
    let (b, cb) = treeder(&["selftest", "--seed", "7"])?;
    if a != b {
        return Err("two selftest reports differ".into());
    }
    if ca != 0 || cb != 0 {
        return Err(format!("selftest exited with {ca}: {}", String::from_utf8_lossy(&a)));
    }
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let tree = data.join("tree.sexp");
    let mut shipped: Vec<_> = std::fs::read_dir(&data)
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "stt"))
        .collect();
    shipped.sort();
    if shipped.is_empty() {
        return Err("no shipped transducers".into());
    }
    for stt in &shipped {
        let (out, code) = treeder(&["run-transducer", stt.to_str().unwrap(), tree.to_str().unwrap(), "--route", "both"])?;
        if code != 0 {
            return Err(format!("{} exited with {code}", stt.display()));
        }
        if String::from_utf8_lossy(&out).lines().count() != 1 {
            return Err(format!("{} should print its output once", stt.display()));
        }
    }
    Ok(format!("{} byte report, {} transducers", a.len(), shipped.len()))
}

type Check = Box<dyn Fn() -> Result<String, String>>;

fn main() -> ExitCode {
    let budget = Budget::full(SEED);
    let mut criteria: Vec<(String, Check)> = selftest::suites()
        .into_iter()
        .map(|s| {
            let b = budget.clone();
            (s.name.to_string(), Box::new(move || (s.run)(&b)) as Check)
        })
        .collect();
    criteria.push(("cli-determinism".into(), Box::new(cli_determinism)));

    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} ({secs:.1}s)", i + 1),
            Err(e) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {e} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
