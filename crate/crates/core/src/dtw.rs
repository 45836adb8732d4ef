// SPDX-License-Identifier: MIT OR Apache-2.0

//! The block-by-block driver over the frontier array.
//!
//! The frontier holds one distance per diagonal `d = y - x` in `[-N, M]`.
//! Processing a block first rewrites its diagonals `[a, b]` to the distances
//! of the block's input vertices (top row and left column), then to those of
//! its output vertices (bottom row and right column), using a fixed handful
//! of range operations either way.

use thiserror::Error;

use crate::engine::{EngineError, EngineStats, LazyEngine, RangeEngine};
use crate::rle::{sentinel, CostError, CostFn, Distance, RleString, Value};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DtwError {
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("block ({i}, {j}) does not exist: the strings have {n} and {m} runs")]
    NoSuchBlock { i: usize, j: usize, n: usize, m: usize },
    #[error("values for lengths {n} and {m} with maximum cost {delta_max} may overflow 128 bits")]
    Overflow { n: u64, m: u64, delta_max: Value },
}

/// Geometry of the block formed by run `i` of `S` and run `j` of `T`
/// (1-based). Coordinates are 1-based expanded positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockParams {
    pub i1: u64,
    pub i2: u64,
    pub j1: u64,
    pub j2: u64,
    pub h: u64,
    pub w: u64,
    pub a: i64,
    pub b: i64,
    pub z: i64,
    pub d1: i64,
    pub d2: i64,
    pub c: Value,
}

impl BlockParams {
    fn from_bounds(i1: u64, i2: u64, j1: u64, j2: u64, c: Value) -> Self {
        let (si1, si2, sj1, sj2) = (i1 as i64, i2 as i64, j1 as i64, j2 as i64);
        BlockParams {
            i1,
            i2,
            j1,
            j2,
            h: i2 - i1 + 1,
            w: j2 - j1 + 1,
            a: sj1 - si2,
            b: sj2 - si1,
            z: sj1 - si1,
            d1: sj1 - si1,
            d2: sj2 - si2,
            c,
        }
    }

    /// Input vertex on diagonal `d` in `[a, b]`: top row for `d >= z`,
    /// left column otherwise.
    pub fn input_vertex(&self, d: i64) -> (u64, u64) {
        debug_assert!(self.a <= d && d <= self.b);
        if d >= self.z {
            (self.i1, (self.i1 as i64 + d) as u64)
        } else {
            ((self.j1 as i64 - d) as u64, self.j1)
        }
    }

    /// Output vertex on diagonal `d` in `[a, b]`: bottom row for `d <= d2`,
    /// right column otherwise.
    pub fn output_vertex(&self, d: i64) -> (u64, u64) {
        debug_assert!(self.a <= d && d <= self.b);
        if d <= self.d2 {
            (self.i2, (self.i2 as i64 + d) as u64)
        } else {
            ((self.j2 as i64 - d) as u64, self.j2)
        }
    }
}

/// Parameters of block `(i, j)`, with 1-based run indices.
pub fn block_params(s: &RleString, t: &RleString, f: &CostFn, i: usize, j: usize) -> Result<BlockParams, DtwError> {
    let (n, m) = (s.num_runs(), t.num_runs());
    if i == 0 || j == 0 || i > n || j > m {
        return Err(DtwError::NoSuchBlock { i, j, n, m });
    }
    let (ss, ts) = (s.run_starts(), t.run_starts());
    let c = f.cost(s.runs()[i - 1].symbol, t.runs()[j - 1].symbol)?;
    Ok(BlockParams::from_bounds(ss[i - 1], ss[i] - 1, ts[j - 1], ts[j] - 1, c))
}

/// Order in which blocks are processed. Both respect block dependencies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Order {
    #[default]
    RowMajor,
    ColumnMajor,
}

/// Which vertices of the current block the frontier holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Input,
    Output,
}

/// Receives the whole frontier after each phase of each block.
/// `frontier[d + N]` is the value on diagonal `d`.
pub trait FrontierObserver {
    fn observe(&mut self, phase: Phase, block: &BlockParams, frontier: &[Value]);
}

/// Result of a driver run together with its work counters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DtwRun {
    pub distance: Distance,
    /// The sentinel standing in for infinity.
    pub inf: Value,
    pub blocks: u64,
    /// Engine calls made by the driver, lookups included.
    pub engine_calls: u64,
    pub engine: EngineStats,
}

/// Largest magnitude allowed for `INF * (N + M + 2)^2 * 16`.
const MAGNITUDE_LIMIT: Value = 1 << 120;

fn check_magnitude(n: u64, m: u64, delta_max: Value) -> Result<Value, DtwError> {
    let inf = sentinel(n, m, delta_max);
    let span = Value::from(n) + Value::from(m) + 2;
    let bound = inf
        .checked_mul(span)
        .and_then(|v| v.checked_mul(span))
        .and_then(|v| v.checked_mul(16));
    match bound {
        Some(v) if v < MAGNITUDE_LIMIT => Ok(inf),
        _ => Err(DtwError::Overflow { n, m, delta_max }),
    }
}

/// Exact DTW distance of `s` and `t` with the lazy engine.
pub fn dtw(s: &RleString, t: &RleString, f: &CostFn) -> Result<Distance, DtwError> {
    Ok(run::<LazyEngine>(s, t, f, Order::RowMajor, None)?.distance)
}

/// Runs the driver on engine `E`.
pub fn run<E: RangeEngine>(
    s: &RleString,
    t: &RleString,
    f: &CostFn,
    order: Order,
    mut observer: Option<&mut dyn FrontierObserver>,
) -> Result<DtwRun, DtwError> {
    let (big_n, big_m) = (s.expanded_len(), t.expanded_len());
    let delta_max = f.max_cost_between(s, t)?;
    let inf = check_magnitude(big_n, big_m, delta_max)?;
    let (lo, hi) = (-(big_n as i64), big_m as i64);
    let mut e = E::with_domain(lo, hi)?;
    let mut calls = 0u64;
    e.add_const(1, hi, inf)?;
    e.add_const(lo, -1, inf)?;
    calls += 2;

    let (ss, ts) = (s.run_starts(), t.run_starts());
    let (n, m) = (s.num_runs(), t.num_runs());
    let mut blocks: Vec<(usize, usize)> = Vec::with_capacity(n * m);
    match order {
        Order::RowMajor => (0..n).for_each(|i| (0..m).for_each(|j| blocks.push((i, j)))),
        Order::ColumnMajor => (0..m).for_each(|j| (0..n).for_each(|i| blocks.push((i, j)))),
    }
    for &(i, j) in &blocks {
        let c = f.cost(s.runs()[i].symbol, t.runs()[j].symbol)?;
        let p = BlockParams::from_bounds(ss[i], ss[i + 1] - 1, ts[j], ts[j + 1] - 1, c);
        calls += phase_input(&mut e, &p)?;
        if let Some(obs) = observer.as_deref_mut() {
            obs.observe(Phase::Input, &p, &e.snapshot());
        }
        calls += phase_output(&mut e, &p)?;
        if let Some(obs) = observer.as_deref_mut() {
            obs.observe(Phase::Output, &p, &e.snapshot());
        }
    }
    let v = e.lookup(hi + lo)?;
    calls += 1;
    Ok(DtwRun {
        distance: Distance::from_sentinel(v, inf),
        inf,
        blocks: blocks.len() as u64,
        engine_calls: calls,
        engine: e.stats(),
    })
}

/// Rewrites diagonals `[a, b]` from the block's entering values to the
/// distances of its input vertices. Returns the number of engine calls.
fn phase_input<E: RangeEngine>(e: &mut E, p: &BlockParams) -> Result<u64, EngineError> {
    let (a, b, z, c) = (p.a, p.b, p.z, p.c);
    let fz = e.lookup(z)?;
    let best = fz.min(e.lookup(z - 1)?).min(e.lookup(z + 1)?);
    // The corner: c plus the best of its three predecessors.
    let corner = c + best;
    e.add_const(z, z, corner - c - fz)?;
    e.left_linear_wave(z, b, c)?;
    e.right_linear_wave(a, z, c)?;
    e.add_const(a, b, c)?;
    Ok(7)
}

/// Rewrites diagonals `[a, b]` from input to output vertex distances.
fn phase_output<E: RangeEngine>(e: &mut E, p: &BlockParams) -> Result<u64, EngineError> {
    let (a, b, c) = (p.a, p.b, p.c);
    let (m1, m2) = (p.d1.min(p.d2), p.d1.max(p.d2));
    let mut calls = 0;
    if a < m1 {
        e.add_const(a, m1 - 1, -(a as Value) * c)?;
        e.add_gradient(a, m1 - 1, c)?;
        calls += 2;
    }
    // The inner diagonals cross the block in min(w, h) - 1 diagonal steps.
    e.add_const(m1, m2, (p.w.min(p.h) as Value - 1) * c)?;
    calls += 1;
    if m2 < b {
        e.add_const(m2 + 1, b, b as Value * c)?;
        e.add_gradient(m2 + 1, b, -c)?;
        calls += 2;
    }
    Ok(calls)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::WarmupEngine;
    use crate::oracle::naive_dtw;
    use crate::rle::Alphabet;

    fn parse(a: &mut Alphabet, s: &str) -> RleString {
        a.parse_rle(s).unwrap()
    }

    #[test]
    fn documented_block() {
        let mut al = Alphabet::new();
        let s = parse(&mut al, "a:4,b:3,a:5");
        let t = parse(&mut al, "b:2");
        let p = block_params(&s, &t, &CostFn::Discrete, 1, 1).unwrap();
        assert_eq!((p.i1, p.i2, p.j1, p.j2), (1, 4, 1, 2));
        assert_eq!((p.a, p.b, p.z, p.h, p.w), (-3, 1, 0, 4, 2));
        assert_eq!(p.c, 1);
        assert!(block_params(&s, &t, &CostFn::Discrete, 4, 1).is_err());
        let q = block_params(&s, &t, &CostFn::Discrete, 2, 1).unwrap();
        assert_eq!(q.c, 0);
        assert_eq!((q.d1 == q.d2), (q.w == q.h));
    }

    #[test]
    fn small_cases() {
        let mut al = Alphabet::new();
        let ab = parse(&mut al, "a:1,b:1");
        let b = parse(&mut al, "b:1");
        assert_eq!(dtw(&ab, &b, &CostFn::Discrete).unwrap(), Distance::Finite(1));
        let a3 = parse(&mut al, "a:3");
        let a1b2 = parse(&mut al, "a:1,b:2");
        assert_eq!(dtw(&a3, &a1b2, &CostFn::Discrete).unwrap(), Distance::Finite(2));
        let s = parse(&mut al, "a:4,b:3,a:5");
        assert_eq!(dtw(&s, &s, &CostFn::Discrete).unwrap(), Distance::Finite(0));
        let one = parse(&mut al, "a:1");
        assert_eq!(dtw(&one, &one, &CostFn::Discrete).unwrap(), Distance::Finite(0));
    }

    #[test]
    fn engines_and_orders_agree() {
        let mut al = Alphabet::new();
        let s = parse(&mut al, "a:3,b:2,c:4,a:1");
        let t = parse(&mut al, "c:2,a:5,b:1");
        let f = CostFn::matrix(vec![vec![0, 3, 1], vec![2, 0, 5], vec![4, 1, 0]]).unwrap();
        let want = naive_dtw(&s, &t, &f).unwrap();
        for order in [Order::RowMajor, Order::ColumnMajor] {
            assert_eq!(run::<LazyEngine>(&s, &t, &f, order, None).unwrap().distance, want);
            assert_eq!(run::<WarmupEngine>(&s, &t, &f, order, None).unwrap().distance, want);
        }
    }

    #[test]
    fn overflow_is_reported() {
        let mut al = Alphabet::new();
        let s = parse(&mut al, "a:1,b:1");
        let f = CostFn::matrix(vec![vec![0, u64::MAX], vec![u64::MAX, 0]]).unwrap();
        let big = RleString::from_runs([crate::rle::Run { symbol: crate::rle::Symbol(0), len: u64::MAX / 4 }]).unwrap();
        assert!(matches!(dtw(&big, &s, &f), Err(DtwError::Overflow { .. })));
    }
}
