// SPDX-License-Identifier: MIT OR Apache-2.0

//! Run-length-encoded strings, symbol tables, cost functions and the exact
//! value type shared by every algorithm in the crate.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Exact distance values. All arithmetic on distances is plain `i128`
/// arithmetic; overflow checks are enabled in every build profile of this
/// workspace, so wraparound cannot go unnoticed.
pub type Value = i128;

/// Errors raised while parsing or validating run-length-encoded input.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RleError {
    #[error("empty input")]
    Empty,
    #[error("malformed token `{0}` (expected `<symbol>:<count>`)")]
    MalformedToken(String),
    #[error("invalid run length in token `{0}` (must be a positive integer)")]
    BadCount(String),
    #[error("expanded length overflows 64 bits")]
    LengthOverflow,
    #[error("expanded length {len} exceeds the materialization limit {limit}")]
    TooLong { len: u64, limit: u64 },
    #[error("numeric alphabet requires integer labels, got `{0}`")]
    NonNumericLabel(String),
}

/// Errors raised by cost functions.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CostError {
    #[error("symbol {0} is outside the cost matrix")]
    SymbolOutOfRange(u32),
    #[error("cost matrix: {0}")]
    Matrix(String),
}

/// A small integer symbol id, interned through an [`Alphabet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(pub u32);

/// Symbol table shared by the strings that are compared with each other.
///
/// In the default mode labels get ids in first-appearance order. In numeric
/// mode every label must be a non-negative integer and its id is that integer,
/// which is what the absolute-difference cost expects.
#[derive(Clone, Debug, Default)]
pub struct Alphabet {
    labels: Vec<String>,
    ids: HashMap<String, u32>,
    numeric: bool,
}

impl Alphabet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn numeric() -> Self {
        Self {
            numeric: true,
            ..Self::default()
        }
    }

    pub fn is_numeric(&self) -> bool {
        self.numeric
    }

    pub fn intern(&mut self, label: &str) -> Result<Symbol, RleError> {
        if self.numeric {
            let v: u32 = label
                .parse()
                .map_err(|_| RleError::NonNumericLabel(label.to_string()))?;
            self.ids.entry(label.to_string()).or_insert(v);
            return Ok(Symbol(v));
        }
        if let Some(&id) = self.ids.get(label) {
            return Ok(Symbol(id));
        }
        let id = self.labels.len() as u32;
        self.labels.push(label.to_string());
        self.ids.insert(label.to_string(), id);
        Ok(Symbol(id))
    }

    pub fn label(&self, s: Symbol) -> String {
        if self.numeric {
            return s.0.to_string();
        }
        self.labels
            .get(s.0 as usize)
            .cloned()
            .unwrap_or_else(|| format!("#{}", s.0))
    }

    pub fn len(&self) -> usize {
        if self.numeric {
            self.ids.len()
        } else {
            self.labels.len()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Parses `<symbol>:<count>(,<symbol>:<count>)*` into a canonical string.
    pub fn parse_rle(&mut self, text: &str) -> Result<RleString, RleError> {
        let text = text.trim();
        if text.is_empty() {
            return Err(RleError::Empty);
        }
        let mut runs = Vec::new();
        for token in text.split(',') {
            let token = token.trim();
            let (sym, count) = token
                .rsplit_once(':')
                .ok_or_else(|| RleError::MalformedToken(token.to_string()))?;
            let sym = sym.trim();
            if sym.is_empty() || sym.contains(':') {
                return Err(RleError::MalformedToken(token.to_string()));
            }
            let len: u64 = count
                .trim()
                .parse()
                .map_err(|_| RleError::BadCount(token.to_string()))?;
            if len == 0 {
                return Err(RleError::BadCount(token.to_string()));
            }
            runs.push(Run {
                symbol: self.intern(sym)?,
                len,
            });
        }
        RleString::from_runs(runs)
    }

    /// Every character is one run of length one; adjacent repeats are merged.
    pub fn parse_raw(&mut self, text: &str) -> Result<RleString, RleError> {
        let text = text.trim();
        if text.is_empty() {
            return Err(RleError::Empty);
        }
        let mut runs = Vec::new();
        let mut buf = [0u8; 4];
        for ch in text.chars() {
            runs.push(Run {
                symbol: self.intern(ch.encode_utf8(&mut buf))?,
                len: 1,
            });
        }
        RleString::from_runs(runs)
    }

    pub fn render(&self, s: &RleString) -> String {
        s.runs()
            .iter()
            .map(|r| format!("{}:{}", self.label(r.symbol), r.len))
            .collect::<Vec<_>>()
            .join(",")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Run {
    pub symbol: Symbol,
    pub len: u64,
}

/// A canonical run-length-encoded string: positive run lengths, no two
/// adjacent runs with the same symbol.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RleString {
    runs: Vec<Run>,
    total: u64,
}

impl RleString {
    /// Builds a canonical string, merging adjacent equal-symbol runs.
    pub fn from_runs(runs: impl IntoIterator<Item = Run>) -> Result<Self, RleError> {
        let mut out: Vec<Run> = Vec::new();
        let mut total: u64 = 0;
        for run in runs {
            if run.len == 0 {
                return Err(RleError::BadCount(format!("{}:0", run.symbol.0)));
            }
            total = total.checked_add(run.len).ok_or(RleError::LengthOverflow)?;
            match out.last_mut() {
                Some(last) if last.symbol == run.symbol => last.len += run.len,
                _ => out.push(run),
            }
        }
        if out.is_empty() {
            return Err(RleError::Empty);
        }
        Ok(Self { runs: out, total })
    }

    pub fn runs(&self) -> &[Run] {
        &self.runs
    }

    /// Number of runs `n`.
    pub fn num_runs(&self) -> usize {
        self.runs.len()
    }

    /// Expanded length `N`.
    pub fn expanded_len(&self) -> u64 {
        self.total
    }

    pub fn expand(&self, limit: u64) -> Result<Vec<Symbol>, RleError> {
        if self.total > limit {
            return Err(RleError::TooLong {
                len: self.total,
                limit,
            });
        }
        let mut out = Vec::with_capacity(self.total as usize);
        for r in &self.runs {
            out.extend(std::iter::repeat_n(r.symbol, r.len as usize));
        }
        Ok(out)
    }

    /// First (1-based) expanded position of every run, plus `N + 1` at the end.
    pub fn run_starts(&self) -> Vec<u64> {
        let mut starts = Vec::with_capacity(self.runs.len() + 1);
        let mut pos = 1;
        for r in &self.runs {
            starts.push(pos);
            pos += r.len;
        }
        starts.push(pos);
        starts
    }
}

/// The per-symbol-pair cost. Costs are non-negative integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CostFn {
    /// 0 on equal symbols, 1 otherwise.
    Discrete,
    /// `|x - y|` over symbol ids.
    AbsDiff,
    /// Explicit table indexed by `[x][y]`.
    Matrix(Vec<Vec<u64>>),
}

impl CostFn {
    pub fn matrix(rows: Vec<Vec<u64>>) -> Result<Self, CostError> {
        let k = rows.len();
        if k == 0 {
            return Err(CostError::Matrix("empty matrix".into()));
        }
        if rows.iter().any(|r| r.len() != k) {
            return Err(CostError::Matrix("matrix must be square".into()));
        }
        Ok(CostFn::Matrix(rows))
    }

    /// Reads a square CSV matrix whose first row and first column hold symbol
    /// labels. Header labels are interned into `alphabet` in column order, so
    /// for a fresh alphabet label `k` of the header gets id `k`.
    pub fn matrix_from_csv(text: &str, alphabet: &mut Alphabet) -> Result<Self, CostError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut records = rdr.records();
        let header = records
            .next()
            .ok_or_else(|| CostError::Matrix("missing header row".into()))?
            .map_err(|e| CostError::Matrix(e.to_string()))?;
        let labels: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        let k = labels.len();
        let mut ids = Vec::with_capacity(k);
        for l in &labels {
            let id = alphabet
                .intern(l)
                .map_err(|e| CostError::Matrix(e.to_string()))?;
            ids.push(id.0 as usize);
        }
        let size = ids.iter().copied().max().map_or(0, |m| m + 1);
        let mut table = vec![vec![0u64; size]; size];
        let mut seen = vec![false; k];
        for rec in records {
            let rec = rec.map_err(|e| CostError::Matrix(e.to_string()))?;
            let row_label = rec.get(0).unwrap_or_default();
            let r = labels
                .iter()
                .position(|l| l == row_label)
                .ok_or_else(|| CostError::Matrix(format!("unknown row label `{row_label}`")))?;
            if rec.len() != k + 1 {
                return Err(CostError::Matrix(format!(
                    "row `{row_label}` has {} cells, expected {}",
                    rec.len() - 1,
                    k
                )));
            }
            for (c, cell) in rec.iter().skip(1).enumerate() {
                let v: u64 = cell
                    .parse()
                    .map_err(|_| CostError::Matrix(format!("bad cost `{cell}`")))?;
                table[ids[r]][ids[c]] = v;
            }
            seen[r] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(CostError::Matrix("every label needs a row".into()));
        }
        Ok(CostFn::Matrix(table))
    }

    pub fn cost(&self, x: Symbol, y: Symbol) -> Result<Value, CostError> {
        match self {
            CostFn::Discrete => Ok(Value::from(x != y)),
            CostFn::AbsDiff => Ok((Value::from(x.0) - Value::from(y.0)).abs()),
            CostFn::Matrix(rows) => {
                let row = rows
                    .get(x.0 as usize)
                    .ok_or(CostError::SymbolOutOfRange(x.0))?;
                let v = row.get(y.0 as usize).ok_or(CostError::SymbolOutOfRange(y.0))?;
                Ok(Value::from(*v))
            }
        }
    }

    /// Largest cost between a symbol of `s` and a symbol of `t`.
    pub fn max_cost_between(&self, s: &RleString, t: &RleString) -> Result<Value, CostError> {
        let mut best = 0;
        let mut xs: Vec<Symbol> = s.runs().iter().map(|r| r.symbol).collect();
        let mut ys: Vec<Symbol> = t.runs().iter().map(|r| r.symbol).collect();
        xs.sort_unstable();
        xs.dedup();
        ys.sort_unstable();
        ys.dedup();
        for &x in &xs {
            for &y in &ys {
                best = best.max(self.cost(x, y)?);
            }
        }
        Ok(best)
    }
}

/// The finite stand-in for infinity: `(N + M + 1) * (delta_max + 1)`, strictly
/// above every reachable distance `<= (N + M) * delta_max`.
pub fn sentinel(n_total: u64, m_total: u64, delta_max: Value) -> Value {
    (Value::from(n_total) + Value::from(m_total) + 1) * (delta_max + 1)
}

/// A distance that may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Distance {
    Finite(Value),
    Infinite,
}

impl Distance {
    pub fn from_sentinel(v: Value, inf: Value) -> Self {
        if v >= inf {
            Distance::Infinite
        } else {
            Distance::Finite(v)
        }
    }

    pub fn finite(self) -> Option<Value> {
        match self {
            Distance::Finite(v) => Some(v),
            Distance::Infinite => None,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(v) => write!(f, "{v}"),
            Distance::Infinite => f.write_str("inf"),
        }
    }
}
