// SPDX-License-Identifier: MIT OR Apache-2.0

//! Seeded random instances and operation sequences for tests and the CLI.

use rand::Rng;

use crate::engine::RangeOp;
use crate::rle::{CostFn, Run, RleString, Symbol, Value};

/// Bounds for [`random_instance`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct InstanceBounds {
    /// Alphabet size is drawn from `[2, max_alphabet]`.
    pub max_alphabet: u32,
    /// Run counts are drawn from `[1, max_runs]`.
    pub max_runs: usize,
    /// Run lengths are drawn from `[1, max_run_len]`.
    pub max_run_len: u64,
    /// Matrix entries are drawn from `[0, max_cost]`.
    pub max_cost: u64,
}

impl Default for InstanceBounds {
    fn default() -> Self {
        InstanceBounds {
            max_alphabet: 5,
            max_runs: 30,
            max_run_len: 15,
            max_cost: 9,
        }
    }
}

/// Two strings over symbols `0..alphabet` and a cost matrix for them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub s: RleString,
    pub t: RleString,
    pub cost: CostFn,
    pub alphabet: u32,
}

impl Instance {
    /// Strings as `sym:len` lists and the matrix row by row.
    pub fn describe(&self) -> String {
        let show = |r: &RleString| {
            r.runs()
                .iter()
                .map(|x| format!("{}:{}", x.symbol.0, x.len))
                .collect::<Vec<_>>()
                .join(",")
        };
        let cost = match &self.cost {
            CostFn::Matrix(rows) => rows
                .iter()
                .map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "))
                .collect::<Vec<_>>()
                .join("; "),
            other => format!("{other:?}"),
        };
        format!("S={} T={} cost=[{}]", show(&self.s), show(&self.t), cost)
    }
}

/// A random string with exactly `runs` runs over `alphabet >= 2` symbols.
pub fn random_string<R: Rng>(rng: &mut R, alphabet: u32, runs: usize, max_run_len: u64) -> RleString {
    let mut out = Vec::with_capacity(runs);
    let mut prev: Option<u32> = None;
    for _ in 0..runs {
        let mut sym = rng.gen_range(0..alphabet);
        if Some(sym) == prev {
            sym = (sym + rng.gen_range(1..alphabet)) % alphabet;
        }
        prev = Some(sym);
        out.push(Run {
            symbol: Symbol(sym),
            len: rng.gen_range(1..=max_run_len),
        });
    }
    RleString::from_runs(out).expect("non-empty runs")
}

/// A random string with `runs` runs, all of length `run_len`.
pub fn random_string_fixed<R: Rng>(rng: &mut R, alphabet: u32, runs: usize, run_len: u64) -> RleString {
    let shape = random_string(rng, alphabet, runs, 1);
    let out = shape.runs().iter().map(|r| Run {
        symbol: r.symbol,
        len: run_len,
    });
    RleString::from_runs(out).expect("non-empty runs")
}

/// A random cost matrix; with `zero_diagonal` equal symbols cost nothing.
pub fn random_matrix<R: Rng>(rng: &mut R, alphabet: u32, max_cost: u64, zero_diagonal: bool) -> CostFn {
    let k = alphabet as usize;
    let rows = (0..k)
        .map(|x| {
            (0..k)
                .map(|y| if zero_diagonal && x == y { 0 } else { rng.gen_range(0..=max_cost) })
                .collect()
        })
        .collect();
    CostFn::matrix(rows).expect("square matrix")
}

pub fn random_instance<R: Rng>(rng: &mut R, b: &InstanceBounds) -> Instance {
    let alphabet = rng.gen_range(2..=b.max_alphabet.max(2));
    let n = rng.gen_range(1..=b.max_runs.max(1));
    let m = rng.gen_range(1..=b.max_runs.max(1));
    let s = random_string(rng, alphabet, n, b.max_run_len);
    let t = random_string(rng, alphabet, m, b.max_run_len);
    let zero = rng.gen_bool(0.5);
    let cost = random_matrix(rng, alphabet, b.max_cost, zero);
    Instance { s, t, cost, alphabet }
}

/// A random operation on `[lo, hi]`: constants in `[-20, 20]`, slopes in
/// `[0, 20]`. Ranges are sometimes short and sometimes wide.
pub fn random_op<R: Rng>(rng: &mut R, lo: i64, hi: i64) -> RangeOp {
    let (i, j) = if rng.gen_bool(0.3) {
        let i = rng.gen_range(lo..=hi);
        let j = (i + rng.gen_range(0..=8)).min(hi);
        (i, j)
    } else {
        let x = rng.gen_range(lo..=hi);
        let y = rng.gen_range(lo..=hi);
        (x.min(y), x.max(y))
    };
    let k: Value = rng.gen_range(-20..=20);
    let alpha: Value = rng.gen_range(0..=20);
    match rng.gen_range(0..4) {
        0 => RangeOp::AddConst { i, j, c: k },
        1 => RangeOp::AddGradient { i, j, g: k },
        2 => RangeOp::LeftLinearWave { i, j, alpha },
        _ => RangeOp::RightLinearWave { i, j, alpha },
    }
}

/// A domain `[lo, hi]` with `hi - lo < max_size`, sometimes straddling zero.
pub fn random_domain<R: Rng>(rng: &mut R, max_size: i64) -> (i64, i64) {
    let size = rng.gen_range(1..=max_size);
    let lo = rng.gen_range(-size..=size / 2);
    (lo, lo + size - 1)
}
