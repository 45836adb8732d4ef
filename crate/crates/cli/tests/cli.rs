// SPDX-License-Identifier: MIT OR Apache-2.0

use std::io::Write;
use std::process::Command;

use rledtw_cli::{main_with, report_verify, verify_with, VerifyArgs, EXIT_FAIL, EXIT_OK, EXIT_USAGE};
use rledtw_core::engine::EngineStats;
use rledtw_core::{EngineError, LazyEngine, RangeEngine, Value};

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["rledtw"];
    full.extend_from_slice(args);
    let code = main_with(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn dist_examples() {
    assert_eq!(call(&["dist", "--algo", "naive", "--cost", "discrete", "a:1,b:1", "b:1"]), (0, "1\n".into(), String::new()));
    for algo in ["fast", "block", "naive"] {
        assert_eq!(call(&["dist", "--algo", algo, "a:1,b:1", "b:1"]).1, "1\n");
        assert_eq!(call(&["dist", "--algo", algo, "x:4,y:2,x:1", "x:4,y:2,x:1"]).1, "0\n");
    }
    assert_eq!(call(&["dist", "--raw", "aabbb", "ab"]).1, "0\n");
    assert_eq!(call(&["dist", "--raw", "abc", "abd"]).1, "1\n");
    assert_eq!(call(&["dist", "--cost", "abs", "1:2,5:1", "2:3"]).1, "5\n");
}

#[test]
fn dist_with_matrix_file() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "sym,a,b\na,0,7\nb,3,0").unwrap();
    let path = f.path().to_str().unwrap().to_string();
    for algo in ["fast", "block", "naive"] {
        let (code, out, _) = call(&["dist", "--algo", algo, "--cost", "matrix", "--cost-matrix", &path, "a:2", "b:1"]);
        assert_eq!((code, out.as_str()), (0, "14\n"));
    }
    let (code, _, err) = call(&["dist", "--cost", "matrix", "a:1", "b:1"]);
    assert_eq!(code, EXIT_USAGE, "{err}");
}

#[test]
fn dist_reads_files() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    write!(f, "a:3,b:2").unwrap();
    let arg = format!("@{}", f.path().display());
    assert_eq!(call(&["dist", &arg, "a:1,b:1"]).1, "0\n");
}

#[test]
fn dist_errors() {
    assert_eq!(call(&["dist", "a:0", "b:1"]).0, EXIT_USAGE);
    assert_eq!(call(&["dist", "a", "b:1"]).0, EXIT_USAGE);
    assert_eq!(call(&["dist", "--cost", "abs", "x:1", "1:1"]).0, EXIT_USAGE);
    // Lengths this large cannot be represented safely.
    let (code, _, err) = call(&["dist", "a:1000000000000", "b:1000000000000"]);
    assert_eq!(code, EXIT_FAIL, "{err}");
    let (code, _, err) = call(&["dist", "--algo", "naive", "a:100000", "b:100000"]);
    assert_eq!(code, EXIT_FAIL, "{err}");
}

#[test]
fn verify_passes() {
    assert_eq!(call(&["verify", "--seed", "1", "--cases", "100"]), (EXIT_OK, "OK 100\n".into(), String::new()));
    assert_eq!(call(&["verify", "--cases", "0"]).1, "OK 0\n");
    assert_eq!(call(&["verify", "--seed", "9", "--cases", "40", "--max-runs", "5", "--max-run-len", "40"]).1, "OK 40\n");
}

/// A lazy engine that skips every right wave.
struct Broken(LazyEngine);

impl RangeEngine for Broken {
    fn with_domain(lo: i64, hi: i64) -> Result<Self, EngineError> {
        Ok(Broken(LazyEngine::with_domain(lo, hi)?))
    }
    fn domain(&self) -> (i64, i64) {
        self.0.domain()
    }
    fn lookup(&mut self, k: i64) -> Result<Value, EngineError> {
        self.0.lookup(k)
    }
    fn add_const(&mut self, i: i64, j: i64, c: Value) -> Result<(), EngineError> {
        self.0.add_const(i, j, c)
    }
    fn add_gradient(&mut self, i: i64, j: i64, g: Value) -> Result<(), EngineError> {
        self.0.add_gradient(i, j, g)
    }
    fn left_linear_wave(&mut self, i: i64, j: i64, alpha: Value) -> Result<(), EngineError> {
        self.0.left_linear_wave(i, j, alpha)
    }
    fn right_linear_wave(&mut self, _i: i64, _j: i64, _alpha: Value) -> Result<(), EngineError> {
        Ok(())
    }
    fn snapshot(&self) -> Vec<Value> {
        self.0.snapshot()
    }
    fn stats(&self) -> EngineStats {
        self.0.stats()
    }
}

#[test]
fn verify_reports_a_counterexample() {
    let args = VerifyArgs {
        seed: 1,
        cases: 50,
        max_runs: 30,
        max_run_len: 15,
    };
    let results = verify_with::<Broken>(&args);
    let mut out = Vec::new();
    assert!(!report_verify(&results, &mut out).unwrap());
    let out = String::from_utf8(out).unwrap();
    assert!(out.starts_with("MISMATCH case "), "{out}");
    assert!(out.contains("instance S=") && out.contains("fast ") && out.contains("naive "), "{out}");
    // The reported case is the first bad one by index.
    let first = results.iter().position(|(_, r)| !r.agrees()).unwrap();
    assert!(out.starts_with(&format!("MISMATCH case {first}\n")), "{out}");
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn bench_rows() {
    let (code, out, _) = call(&["bench", "--sizes", "5,10", "--algo", "fast", "--reps", "3"]);
    assert_eq!(code, 0);
    let rows = csv_rows(&out);
    assert_eq!(rows[0], ["n", "m", "N", "M", "algo", "wall_nanos", "result"]);
    assert_eq!(rows.len(), 1 + 2 * 3);

    let (_, out, _) = call(&["bench", "--sizes", "8,16", "--algo", "fast,block,naive", "--seed", "3"]);
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 1 + 2 * 3);
    for size in rows[1..].chunks(3) {
        assert!(size.iter().all(|r| r[6] == size[0][6] && r[0] == size[0][0]), "{size:?}");
        assert_eq!(size.iter().map(|r| r[4].as_str()).collect::<Vec<_>>(), ["fast", "block", "naive"]);
    }
    let (_, again, _) = call(&["bench", "--sizes", "8,16", "--algo", "fast,block,naive", "--seed", "3"]);
    let results = |rows: &[Vec<String>]| rows.iter().map(|r| (r[0].clone(), r[2].clone(), r[6].clone())).collect::<Vec<_>>();
    assert_eq!(results(&csv_rows(&again)), results(&rows));
}

#[test]
fn bench_flags_oversized_rows() {
    let (code, out, _) = call(&["bench", "--sizes", "1000", "--algo", "naive", "--max-run-len", "1000"]);
    assert_eq!(code, 0);
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 2);
    assert!(rows[1][6].starts_with("skipped"), "{:?}", rows[1]);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_rledtw");
    for sub in ["dist", "verify", "bench"] {
        let st = Command::new(bin).args([sub, "--help"]).output().unwrap();
        assert_eq!(st.status.code(), Some(0), "{sub} --help");
        let st = Command::new(bin).args([sub, "--no-such-flag"]).output().unwrap();
        assert_eq!(st.status.code(), Some(2), "{sub} with an unknown flag");
    }
    let st = Command::new(bin).args(["verify", "--cases", "3"]).output().unwrap();
    assert_eq!(st.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&st.stdout), "OK 3\n");
    let st = Command::new(bin).args(["dist", "a:1000000000000", "b:1"]).output().unwrap();
    assert_eq!(st.status.code(), Some(1));
    let st = Command::new(bin).output().unwrap();
    assert_eq!(st.status.code(), Some(2));
}
