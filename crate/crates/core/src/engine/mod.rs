// SPDX-License-Identifier: MIT OR Apache-2.0

//! Range operations on an integer array over a closed index interval.
//!
//! Two engines implement [`RangeEngine`]. [`WarmupEngine`] applies every
//! linear wave eagerly by ray shooting. [`LazyEngine`] defers rays that stay
//! inside one mega-segment and only materializes them on demand.

use std::fmt;

use thiserror::Error;

use crate::rle::Value;

mod lazy;
mod pwl;
mod warmup;

pub use lazy::LazyEngine;
pub use warmup::WarmupEngine;

/// One range operation. Waves take a non-negative slope.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RangeOp {
    /// `A[k] += c` for `k` in `[i, j]`.
    AddConst { i: i64, j: i64, c: Value },
    /// `A[k] += k * g` for `k` in `[i, j]`.
    AddGradient { i: i64, j: i64, g: Value },
    /// `A[k] = min over t in [i, k] of A[t] + (k - t) * alpha`.
    LeftLinearWave { i: i64, j: i64, alpha: Value },
    /// `A[k] = min over t in [k, j] of A[t] + (t - k) * alpha`.
    RightLinearWave { i: i64, j: i64, alpha: Value },
}

impl RangeOp {
    pub fn range(&self) -> (i64, i64) {
        match *self {
            RangeOp::AddConst { i, j, .. }
            | RangeOp::AddGradient { i, j, .. }
            | RangeOp::LeftLinearWave { i, j, .. }
            | RangeOp::RightLinearWave { i, j, .. } => (i, j),
        }
    }
}

impl fmt::Display for RangeOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            RangeOp::AddConst { i, j, c } => write!(f, "AddConst({i},{j},{c})"),
            RangeOp::AddGradient { i, j, g } => write!(f, "AddGradient({i},{j},{g})"),
            RangeOp::LeftLinearWave { i, j, alpha } => write!(f, "LeftLinearWave({i},{j},{alpha})"),
            RangeOp::RightLinearWave { i, j, alpha } => write!(f, "RightLinearWave({i},{j},{alpha})"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("index {k} outside the domain [{lo}, {hi}]")]
    OutOfDomain { k: i64, lo: i64, hi: i64 },
    #[error("empty range: {i} > {j}")]
    EmptyRange { i: i64, j: i64 },
    #[error("wave slope {0} is negative")]
    NegativeSlope(Value),
    #[error("invalid domain [{lo}, {hi}]")]
    InvalidDomain { lo: i64, hi: i64 },
}

/// Work counters. The instrumentation counters stay zero unless the engine
/// was built with instrumentation on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EngineStats {
    /// Public operations applied, lookups excluded.
    pub ops: u64,
    pub lookups: u64,
    /// Breakpoints ever inserted, including the initial ones.
    pub breakpoints_inserted: u64,
    pub breakpoints_deleted: u64,
    /// Rays shot explicitly, including those shot by flushes.
    pub rays: u64,
    /// Rays recorded as pending in the add-min structures, one per range update.
    pub pending_updates: u64,
    pub flushes: u64,
    /// Long rays shot by the lazy engine.
    pub long_rays: u64,
    /// Rays checked by the instrumentation.
    pub checked_rays: u64,
    /// Rays whose origin was neither a range endpoint nor an active point.
    pub bad_origins: u64,
    /// Long rays that left their mega-segment's far endpoint active.
    pub long_ray_misses: u64,
    /// Active points created by a wave anywhere except at its far endpoint.
    pub stray_actives: u64,
    /// Flush rays that escaped their mega-segment.
    pub flush_escapes: u64,
}

/// The common interface of the range engines.
pub trait RangeEngine {
    /// An all-zero array over `[lo, hi]`.
    fn with_domain(lo: i64, hi: i64) -> Result<Self, EngineError>
    where
        Self: Sized;

    fn domain(&self) -> (i64, i64);

    fn lookup(&mut self, k: i64) -> Result<Value, EngineError>;

    fn add_const(&mut self, i: i64, j: i64, c: Value) -> Result<(), EngineError>;

    fn add_gradient(&mut self, i: i64, j: i64, g: Value) -> Result<(), EngineError>;

    fn left_linear_wave(&mut self, i: i64, j: i64, alpha: Value) -> Result<(), EngineError>;

    fn right_linear_wave(&mut self, i: i64, j: i64, alpha: Value) -> Result<(), EngineError>;

    /// Every value of the array, `A[lo]` first. Does not change the state.
    fn snapshot(&self) -> Vec<Value>;

    fn stats(&self) -> EngineStats;

    fn apply(&mut self, op: &RangeOp) -> Result<(), EngineError> {
        match *op {
            RangeOp::AddConst { i, j, c } => self.add_const(i, j, c),
            RangeOp::AddGradient { i, j, g } => self.add_gradient(i, j, g),
            RangeOp::LeftLinearWave { i, j, alpha } => self.left_linear_wave(i, j, alpha),
            RangeOp::RightLinearWave { i, j, alpha } => self.right_linear_wave(i, j, alpha),
        }
    }
}

pub(crate) fn check_domain(lo: i64, hi: i64) -> Result<(), EngineError> {
    if lo > hi {
        return Err(EngineError::InvalidDomain { lo, hi });
    }
    Ok(())
}

pub(crate) fn check_range(lo: i64, hi: i64, i: i64, j: i64) -> Result<(), EngineError> {
    if i > j {
        return Err(EngineError::EmptyRange { i, j });
    }
    for k in [i, j] {
        if k < lo || k > hi {
            return Err(EngineError::OutOfDomain { k, lo, hi });
        }
    }
    Ok(())
}

pub(crate) fn check_slope(alpha: Value) -> Result<(), EngineError> {
    if alpha < 0 {
        return Err(EngineError::NegativeSlope(alpha));
    }
    Ok(())
}
