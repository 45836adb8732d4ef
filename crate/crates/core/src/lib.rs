// SPDX-License-Identifier: MIT OR Apache-2.0

//! Exact dynamic time warping of run-length-encoded strings.
//!
//! The distance is computed block by block over a frontier array indexed by
//! diagonal. Each block costs a constant number of range operations on that
//! array, and the array itself is kept as a piecewise-linear function with
//! lazily applied linear waves. Reference algorithms in [`oracle`] compute the
//! same values directly and back every test in the crate.

pub mod add_min;
pub mod dtw;
pub mod engine;
pub mod gen;
pub mod interval_add;
pub mod oracle;
pub mod rle;

pub use dtw::{dtw, BlockParams, DtwError};
pub use engine::{EngineError, LazyEngine, RangeEngine, RangeOp, WarmupEngine};
pub use rle::{Alphabet, CostFn, Distance, RleString, Symbol, Value};
