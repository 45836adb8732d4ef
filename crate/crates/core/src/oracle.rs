// SPDX-License-Identifier: MIT OR Apache-2.0

//! Reference algorithms: the full dynamic program, a block-by-block variant,
//! and literal evaluations of the range operations on dense arrays.

use thiserror::Error;

use crate::engine::RangeOp;
use crate::rle::{sentinel, CostError, CostFn, Distance, RleString, Value};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance too large: {cells} cells exceeds the limit {limit}")]
    TooLarge { cells: u128, limit: u128 },
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error("index range [{i}, {j}] is not inside [{lo}, {hi}]")]
    OutOfRange { i: i64, j: i64, lo: i64, hi: i64 },
}

/// Default cap on the number of table cells the naive algorithm allocates.
pub const NAIVE_CELL_LIMIT: u128 = 50_000_000;
/// Default cap on `N*m + M*n` for the block algorithm.
pub const BLOCK_WORK_LIMIT: u128 = 2_000_000_000;

/// The full `(N+1) x (M+1)` distance table.
#[derive(Clone, Debug)]
pub struct DpTable {
    rows: usize,
    cols: usize,
    dist: Vec<Value>,
    inf: Value,
}

impl DpTable {
    /// Distance to vertex `(x, y)`, `0 <= x <= N`, `0 <= y <= M`.
    pub fn get(&self, x: u64, y: u64) -> Value {
        self.dist[x as usize * self.cols + y as usize]
    }

    pub fn n(&self) -> u64 {
        (self.rows - 1) as u64
    }

    pub fn m(&self) -> u64 {
        (self.cols - 1) as u64
    }

    pub fn inf(&self) -> Value {
        self.inf
    }

    pub fn result(&self) -> Distance {
        Distance::from_sentinel(self.get(self.n(), self.m()), self.inf)
    }
}

fn pair_costs(s: &RleString, t: &RleString, f: &CostFn) -> Result<Vec<Vec<Value>>, CostError> {
    s.runs()
        .iter()
        .map(|a| t.runs().iter().map(|b| f.cost(a.symbol, b.symbol)).collect())
        .collect()
}

/// Fills the whole table with the textbook recurrence.
pub fn naive_table(s: &RleString, t: &RleString, f: &CostFn, limit: u128) -> Result<DpTable, OracleError> {
    let n = s.expanded_len();
    let m = t.expanded_len();
    let cells = (n as u128 + 1) * (m as u128 + 1);
    if cells > limit {
        return Err(OracleError::TooLarge { cells, limit });
    }
    let inf = sentinel(n, m, f.max_cost_between(s, t)?);
    let costs = pair_costs(s, t, f)?;
    let row_run: Vec<usize> = run_index(s);
    let col_run: Vec<usize> = run_index(t);
    let cols = m as usize + 1;
    let mut dist = vec![inf; (n as usize + 1) * cols];
    dist[0] = 0;
    for x in 1..=n as usize {
        let cr = &costs[row_run[x - 1]];
        for y in 1..=m as usize {
            let best = dist[(x - 1) * cols + y]
                .min(dist[x * cols + y - 1])
                .min(dist[(x - 1) * cols + y - 1]);
            dist[x * cols + y] = cr[col_run[y - 1]] + best;
        }
    }
    Ok(DpTable {
        rows: n as usize + 1,
        cols,
        dist,
        inf,
    })
}

fn run_index(s: &RleString) -> Vec<usize> {
    let mut out = Vec::with_capacity(s.expanded_len() as usize);
    for (k, r) in s.runs().iter().enumerate() {
        out.extend(std::iter::repeat_n(k, r.len as usize));
    }
    out
}

pub fn naive_dtw(s: &RleString, t: &RleString, f: &CostFn) -> Result<Distance, OracleError> {
    Ok(naive_table(s, t, f, NAIVE_CELL_LIMIT)?.result())
}

/// Block-by-block evaluation in `O(N*m + M*n)` time.
///
/// Inside a block every edge costs the same, so after the first row and the
/// first column of the block are known, each vertex equals the vertex that
/// starts its diagonal inside the block plus one block cost per diagonal step.
/// The returned counter is the number of vertices evaluated.
pub fn block_dtw_counted(
    s: &RleString,
    t: &RleString,
    f: &CostFn,
    limit: u128,
) -> Result<(Distance, u64), OracleError> {
    let n_total = s.expanded_len();
    let m_total = t.expanded_len();
    let work = n_total as u128 * t.num_runs() as u128 + m_total as u128 * s.num_runs() as u128;
    if work > limit {
        return Err(OracleError::TooLarge { cells: work, limit });
    }
    let inf = sentinel(n_total, m_total, f.max_cost_between(s, t)?);
    let costs = pair_costs(s, t, f)?;
    let rs = s.run_starts();
    let ts = t.run_starts();
    let m = m_total as usize;
    let mut counter = 0u64;

    // row[y] = dist(x0, y) for the last row x0 of the previous block row.
    let mut row = vec![inf; m + 1];
    row[0] = 0;
    let mut next_row = vec![inf; m + 1];
    let mut col: Vec<Value> = Vec::new();
    let mut first_row: Vec<Value> = Vec::new();
    let mut first_col: Vec<Value> = Vec::new();

    for bi in 0..s.num_runs() {
        let i1 = rs[bi] as usize;
        let i2 = rs[bi + 1] as usize - 1;
        let h = i2 - i1 + 1;
        // col[k] = dist(i1 - 1 + k, y0) for the last column y0 of the previous block.
        col.clear();
        col.push(row[0]);
        col.extend(std::iter::repeat_n(inf, h));
        next_row[0] = inf;
        for bj in 0..t.num_runs() {
            let j1 = ts[bj] as usize;
            let j2 = ts[bj + 1] as usize - 1;
            let w = j2 - j1 + 1;
            let c = costs[bi][bj];

            first_row.clear();
            let mut left = col[1];
            for y in j1..=j2 {
                let v = c + row[y].min(row[y - 1]).min(left);
                first_row.push(v);
                left = v;
            }
            first_col.clear();
            let mut up = row[j1];
            for k in 1..=h {
                let v = c + col[k].min(col[k - 1]).min(up);
                first_col.push(v);
                up = v;
            }
            debug_assert_eq!(first_row[0], first_col[0]);
            counter += (h + w) as u64;

            // dist(x, y) for x in [i1, i2], y in [j1, j2] along the diagonal.
            let at = |x: usize, y: usize| -> Value {
                let k = (x - i1).min(y - j1);
                let base = if x - k == i1 {
                    first_row[y - k - j1]
                } else {
                    first_col[x - k - i1]
                };
                base + k as Value * c
            };
            for y in j1..=j2 {
                next_row[y] = at(i2, y);
            }
            let corner = row[j2];
            col[0] = corner;
            for k in 1..=h {
                col[k] = at(i1 + k - 1, j2);
            }
            counter += (h + w) as u64;
        }
        std::mem::swap(&mut row, &mut next_row);
    }
    Ok((Distance::from_sentinel(row[m], inf), counter))
}

pub fn block_dtw(s: &RleString, t: &RleString, f: &CostFn) -> Result<Distance, OracleError> {
    Ok(block_dtw_counted(s, t, f, BLOCK_WORK_LIMIT)?.0)
}

/// A dense array over the closed index range `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseArray {
    lo: i64,
    vals: Vec<Value>,
}

impl DenseArray {
    pub fn zeros(lo: i64, hi: i64) -> Self {
        assert!(lo <= hi, "empty domain");
        Self {
            lo,
            vals: vec![0; (hi - lo + 1) as usize],
        }
    }

    pub fn from_values(lo: i64, vals: Vec<Value>) -> Self {
        assert!(!vals.is_empty(), "empty domain");
        Self { lo, vals }
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.vals.len() as i64 - 1
    }

    pub fn get(&self, k: i64) -> Value {
        self.vals[(k - self.lo) as usize]
    }

    pub fn values(&self) -> &[Value] {
        &self.vals
    }

    fn check(&self, i: i64, j: i64) -> Result<(), OracleError> {
        if i > j || i < self.lo || j > self.hi() {
            return Err(OracleError::OutOfRange {
                i,
                j,
                lo: self.lo,
                hi: self.hi(),
            });
        }
        Ok(())
    }

    /// Applies `op` straight from its definition; waves are quadratic.
    pub fn apply_brute(&mut self, op: &RangeOp) -> Result<(), OracleError> {
        let (i, j) = op.range();
        self.check(i, j)?;
        let off = |k: i64| (k - self.lo) as usize;
        match *op {
            RangeOp::AddConst { c, .. } => {
                for k in i..=j {
                    self.vals[off(k)] += c;
                }
            }
            RangeOp::AddGradient { g, .. } => {
                for k in i..=j {
                    self.vals[off(k)] += k as Value * g;
                }
            }
            RangeOp::LeftLinearWave { alpha, .. } => {
                let old = self.vals.clone();
                for k in i..=j {
                    self.vals[off(k)] = (i..=k)
                        .map(|t| old[off(t)] + (k - t) as Value * alpha)
                        .min()
                        .unwrap();
                }
            }
            RangeOp::RightLinearWave { alpha, .. } => {
                let old = self.vals.clone();
                for k in i..=j {
                    self.vals[off(k)] = (k..=j)
                        .map(|t| old[off(t)] + (t - k) as Value * alpha)
                        .min()
                        .unwrap();
                }
            }
        }
        Ok(())
    }

    /// Linear-time evaluation of the left wave through `L(k) = min(A[k], L(k-1) + alpha)`.
    pub fn left_wave_recurrence(&mut self, i: i64, j: i64, alpha: Value) -> Result<(), OracleError> {
        self.check(i, j)?;
        let base = (i - self.lo) as usize;
        for k in 1..=(j - i) as usize {
            let cand = self.vals[base + k - 1] + alpha;
            if cand < self.vals[base + k] {
                self.vals[base + k] = cand;
            }
        }
        Ok(())
    }

    /// Mirror of [`DenseArray::left_wave_recurrence`].
    pub fn right_wave_recurrence(&mut self, i: i64, j: i64, alpha: Value) -> Result<(), OracleError> {
        self.check(i, j)?;
        let base = (i - self.lo) as usize;
        for k in (0..(j - i) as usize).rev() {
            let cand = self.vals[base + k + 1] + alpha;
            if cand < self.vals[base + k] {
                self.vals[base + k] = cand;
            }
        }
        Ok(())
    }
}
