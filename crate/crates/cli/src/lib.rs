// SPDX-License-Identifier: MIT OR Apache-2.0

//! The `rledtw` command line: `dist`, `verify` and `bench`.
//!
//! Exit codes: 0 on success, 1 on a mismatch, overflow or size limit, 2 on
//! usage and input errors.

use std::io::Write;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rledtw_core::dtw::{run, DtwError, Order};
use rledtw_core::gen::{random_instance, random_matrix, random_string, Instance, InstanceBounds};
use rledtw_core::oracle::{block_dtw, naive_dtw, OracleError};
use rledtw_core::{Alphabet, CostFn, Distance, LazyEngine, RangeEngine, RleString};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "rledtw", version, about = "Exact DTW distance of run-length-encoded strings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the distance between two strings.
    Dist(DistArgs),
    /// Compare all algorithms on seeded random instances.
    Verify(VerifyArgs),
    /// Time algorithms on a grid of sizes and print CSV.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Fast,
    Block,
    Naive,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Fast => "fast",
            Algo::Block => "block",
            Algo::Naive => "naive",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CostKind {
    /// 0 for equal symbols, 1 otherwise.
    Discrete,
    /// Absolute difference of numeric labels.
    Abs,
    /// Table read from `--cost-matrix`.
    Matrix,
}

#[derive(Args, Debug)]
pub struct DistArgs {
    #[arg(long, value_enum, default_value = "fast")]
    pub algo: Algo,
    #[arg(long, value_enum, default_value = "discrete")]
    pub cost: CostKind,
    /// CSV file: first row and first column are symbol labels.
    #[arg(long, value_name = "CSV")]
    pub cost_matrix: Option<String>,
    /// Read each input as plain text, one symbol per character.
    #[arg(long)]
    pub raw: bool,
    /// First string, `sym:len,...` (or a path prefixed with `@`).
    pub s: String,
    /// Second string, same format.
    pub t: String,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub cases: u64,
    #[arg(long, default_value_t = 30, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_runs: u64,
    #[arg(long, default_value_t = 15, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_run_len: u64,
}

#[derive(Args, Debug, Clone)]
pub struct BenchArgs {
    /// Algorithms to time, comma separated.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "fast")]
    pub algo: Vec<Algo>,
    /// Run counts `n = m`, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "50,100",
          value_parser = clap::value_parser!(u64).range(1..))]
    pub sizes: Vec<u64>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub reps: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Run lengths are drawn from `[1, max-run-len]`.
    #[arg(long, default_value_t = 15, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_run_len: u64,
}

/// Failures mapped to exit codes.
#[derive(Debug)]
pub enum Failure {
    Usage(anyhow::Error),
    Run(anyhow::Error),
}

impl From<DtwError> for Failure {
    fn from(e: DtwError) -> Self {
        match e {
            DtwError::Cost(_) => Failure::Usage(e.into()),
            _ => Failure::Run(e.into()),
        }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Cost(_) => Failure::Usage(e.into()),
            _ => Failure::Run(e.into()),
        }
    }
}

fn read_arg(text: &str) -> anyhow::Result<String> {
    match text.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).with_context(|| format!("reading {path}")),
        None => Ok(text.to_string()),
    }
}

/// Parses both strings and the cost function with one shared alphabet.
pub fn parse_inputs(a: &DistArgs) -> anyhow::Result<(RleString, RleString, CostFn)> {
    let mut alphabet = if a.cost == CostKind::Abs {
        Alphabet::numeric()
    } else {
        Alphabet::new()
    };
    let cost = match (a.cost, &a.cost_matrix) {
        (CostKind::Matrix, Some(path)) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
            CostFn::matrix_from_csv(&text, &mut alphabet)?
        }
        (CostKind::Matrix, None) => return Err(anyhow!("--cost matrix needs --cost-matrix <csv>")),
        (_, Some(_)) => return Err(anyhow!("--cost-matrix needs --cost matrix")),
        (CostKind::Discrete, None) => CostFn::Discrete,
        (CostKind::Abs, None) => CostFn::AbsDiff,
    };
    let mut parse = |text: &str| -> anyhow::Result<RleString> {
        let text = read_arg(text)?;
        Ok(if a.raw {
            alphabet.parse_raw(&text)?
        } else {
            alphabet.parse_rle(&text)?
        })
    };
    let s = parse(&a.s)?;
    let t = parse(&a.t)?;
    Ok((s, t, cost))
}

pub fn distance(algo: Algo, s: &RleString, t: &RleString, f: &CostFn) -> Result<Distance, Failure> {
    Ok(match algo {
        Algo::Fast => run::<LazyEngine>(s, t, f, Order::RowMajor, None)?.distance,
        Algo::Block => block_dtw(s, t, f)?,
        Algo::Naive => naive_dtw(s, t, f)?,
    })
}

pub fn cmd_dist(a: &DistArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let (s, t, f) = parse_inputs(a).map_err(Failure::Usage)?;
    let d = distance(a.algo, &s, &t, &f)?;
    writeln!(out, "{d}").map_err(|e| Failure::Run(e.into()))?;
    Ok(())
}

/// Outcome of one verify case.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseResult {
    pub index: u64,
    pub fast: Result<Distance, String>,
    pub block: Result<Distance, String>,
    /// `None` when the instance is too large for the naive table.
    pub naive: Option<Result<Distance, String>>,
}

impl CaseResult {
    pub fn agrees(&self) -> bool {
        let base = match &self.block {
            Ok(d) => d,
            Err(_) => return false,
        };
        self.fast.as_ref() == Ok(base) && self.naive.as_ref().is_none_or(|n| n.as_ref() == Ok(base))
    }
}

fn show(r: &Result<Distance, String>) -> String {
    match r {
        Ok(d) => d.to_string(),
        Err(e) => format!("error({e})"),
    }
}

/// Instance `index` of a verify run. Each index has its own stream.
pub fn verify_instance(a: &VerifyArgs, index: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    rng.set_stream(index);
    let b = InstanceBounds {
        max_alphabet: 5,
        max_runs: a.max_runs as usize,
        max_run_len: a.max_run_len,
        max_cost: 9,
    };
    random_instance(&mut rng, &b)
}

/// Runs every case with engine `E` for the fast algorithm.
pub fn verify_with<E: RangeEngine>(a: &VerifyArgs) -> Vec<(Instance, CaseResult)> {
    (0..a.cases)
        .into_par_iter()
        .map(|index| {
            let inst = verify_instance(a, index);
            let (s, t, f) = (&inst.s, &inst.t, &inst.cost);
            let fast = run::<E>(s, t, f, Order::RowMajor, None)
                .map(|r| r.distance)
                .map_err(|e| e.to_string());
            let block = block_dtw(s, t, f).map_err(|e| e.to_string());
            let naive = match naive_dtw(s, t, f) {
                Err(OracleError::TooLarge { .. }) => None,
                other => Some(other.map_err(|e| e.to_string())),
            };
            let res = CaseResult {
                index,
                fast,
                block,
                naive,
            };
            (inst, res)
        })
        .collect()
}

/// Prints `OK <cases>` or the first counterexample by case index.
pub fn report_verify(results: &[(Instance, CaseResult)], out: &mut dyn Write) -> std::io::Result<bool> {
    if let Some((inst, r)) = results.iter().find(|(_, r)| !r.agrees()) {
        writeln!(out, "MISMATCH case {}", r.index)?;
        writeln!(out, "instance {}", inst.describe())?;
        let naive = r.naive.as_ref().map_or("skipped".to_string(), show);
        writeln!(out, "fast {} block {} naive {}", show(&r.fast), show(&r.block), naive)?;
        return Ok(false);
    }
    writeln!(out, "OK {}", results.len())?;
    Ok(true)
}

pub fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let results = verify_with::<LazyEngine>(a);
    match report_verify(&results, out) {
        Ok(true) => Ok(()),
        Ok(false) => Err(Failure::Run(anyhow!("algorithms disagree"))),
        Err(e) => Err(Failure::Run(e.into())),
    }
}

/// The instance timed for run count `n` in a bench run.
pub fn bench_instance(a: &BenchArgs, n: u64) -> (RleString, RleString, CostFn) {
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    rng.set_stream(n);
    let s = random_string(&mut rng, 4, n as usize, a.max_run_len);
    let t = random_string(&mut rng, 4, n as usize, a.max_run_len);
    let f = random_matrix(&mut rng, 4, 9, true);
    (s, t, f)
}

pub fn cmd_bench(a: &BenchArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let io = |e: csv::Error| Failure::Run(e.into());
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "m", "N", "M", "algo", "wall_nanos", "result"]).map_err(io)?;
    for &n in &a.sizes {
        let (s, t, f) = bench_instance(a, n);
        for &algo in &a.algo {
            for _ in 0..a.reps {
                let st = Instant::now();
                let res = distance(algo, &s, &t, &f);
                let nanos = st.elapsed().as_nanos();
                let (nanos, result) = match res {
                    Ok(d) => (nanos.to_string(), d.to_string()),
                    Err(Failure::Run(e)) => (String::new(), format!("skipped: {e}")),
                    Err(e) => return Err(e),
                };
                w.write_record([
                    n.to_string(),
                    n.to_string(),
                    s.expanded_len().to_string(),
                    t.expanded_len().to_string(),
                    algo.name().to_string(),
                    nanos,
                    result,
                ])
                .map_err(io)?;
            }
        }
    }
    w.flush().map_err(|e| Failure::Run(e.into()))?;
    Ok(())
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return if code == 0 { EXIT_OK } else { EXIT_USAGE };
        }
    };
    let res = match &cli.command {
        Command::Dist(a) => cmd_dist(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Bench(a) => cmd_bench(a, out),
    };
    match res {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(e)) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_USAGE
        }
        Err(Failure::Run(e)) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_FAIL
        }
    }
}
