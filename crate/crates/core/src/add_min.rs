// SPDX-License-Identifier: MIT OR Apache-2.0

//! Point sets with range add and range chmin, answered exactly by lookups.
//!
//! Points are grouped into segments of one or two consecutive points. A point's
//! value is `min(D[x], R[rep])`, where `D` is an interval-add set over all
//! points, `rep` is the first point of its segment, and `R` is a smaller
//! instance of the same structure holding one entry per segment. A range chmin
//! over whole segments only touches `R`; the at most two segments cut by the
//! range boundary are rewritten point by point. No two adjacent segments both
//! have a single point, so `R` holds at most two thirds of the points and the
//! recursion is shallow.
//!
//! A set keeps exact values in `D` and no `R` until a finite range chmin hits
//! more than `leaf` points. It drops `R` again once every entry there is
//! infinite, checked at most once per `len` updates.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::interval_add::IntervalAddSet;
use crate::rle::Value;

/// Infinity for values stored in this structure.
pub const INF: Value = 1 << 110;

/// Values at or above this are treated as infinite.
pub const INF_THRESHOLD: Value = 1 << 109;

pub fn is_inf(v: Value) -> bool {
    v >= INF_THRESHOLD
}

/// Default flat capacity: grow into the recursive layout above this many
/// points, and fall back below half of it.
pub const DEFAULT_LEAF: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AddMinError {
    #[error("key {0} is already present")]
    Duplicate(i64),
    #[error("key {0} is not present")]
    Missing(i64),
    #[error("empty range: {i} > {j}")]
    EmptyRange { i: i64, j: i64 },
    #[error("cannot shift {from} to {to}: outside its neighbours")]
    BadShift { from: i64, to: i64 },
}

#[derive(Clone, Debug)]
pub struct AddMinSet {
    d: IntervalAddSet,
    reps: BTreeSet<i64>,
    r: Option<Box<AddMinSet>>,
    leaf: usize,
    /// Whether `R` may hold a finite value. While it does not, `D` is exact.
    r_finite: bool,
    /// Updates since the last check for an all-infinite `R`.
    since_check: usize,
}

impl Default for AddMinSet {
    fn default() -> Self {
        Self::with_leaf(DEFAULT_LEAF)
    }
}

impl AddMinSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// A set that stays flat up to `leaf` points (at least 2) on every level.
    pub fn with_leaf(leaf: usize) -> Self {
        AddMinSet {
            d: IntervalAddSet::new(),
            reps: BTreeSet::new(),
            r: None,
            leaf: leaf.max(2),
            r_finite: false,
            since_check: 0,
        }
    }

    fn flatten_below(&self) -> usize {
        self.leaf / 2
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    pub fn contains(&self, x: i64) -> bool {
        self.d.contains(x)
    }

    /// Number of nested levels, counting this one.
    pub fn levels(&self) -> usize {
        1 + self.r.as_ref().map_or(0, |r| r.levels())
    }

    fn rec(&mut self) -> &mut AddMinSet {
        self.r.as_mut().expect("recursive layout")
    }

    fn rep_of(&self, x: i64) -> i64 {
        *self.reps.range(..=x).next_back().expect("every point has a representative")
    }

    /// Points of the segment starting at representative `r`.
    fn segment(&self, r: i64) -> (i64, Option<i64>) {
        let next_rep = self.reps.range(r + 1..).next().copied();
        match self.d.succ_gt(r) {
            Some((s, _)) if next_rep.is_none_or(|nr| s < nr) => (r, Some(s)),
            _ => (r, None),
        }
    }

    fn seg_len(&self, r: i64) -> usize {
        1 + self.segment(r).1.is_some() as usize
    }

    fn value_structured(&self, x: i64) -> Option<Value> {
        let dv = self.d.lookup(x)?;
        if !self.r_finite {
            return Some(dv);
        }
        let rv = self
            .r
            .as_ref()
            .unwrap()
            .lookup(self.rep_of(x))
            .expect("representative stored in the recursive set");
        Some(dv.min(rv))
    }

    pub fn lookup(&self, x: i64) -> Option<Value> {
        if self.r.is_none() {
            self.d.lookup(x)
        } else {
            self.value_structured(x)
        }
    }

    /// All points with their values, in key order.
    pub fn iter(&self) -> Vec<(i64, Value)> {
        let raw = self.d.iter();
        match &self.r {
            None => raw,
            Some(r) => {
                let rv: std::collections::HashMap<i64, Value> = r.iter().into_iter().collect();
                let mut rep = i64::MIN;
                raw.into_iter()
                    .map(|(x, v)| {
                        if self.reps.contains(&x) {
                            rep = x;
                        }
                        (x, v.min(rv[&rep]))
                    })
                    .collect()
            }
        }
    }

    /// Writes the exact value of every point of segment `r` into `D` and
    /// clears the segment's entry in `R`.
    fn materialize(&mut self, r: i64) {
        if !self.r_finite {
            return;
        }
        let (a, b) = self.segment(r);
        let va = self.value_structured(a).unwrap();
        let vb = b.map(|b| self.value_structured(b).unwrap());
        self.d.set(a, va);
        if let (Some(b), Some(vb)) = (b, vb) {
            self.d.set(b, vb);
        }
        self.rec().assign(r, INF).expect("representative present");
    }

    /// Sets the value of an existing point.
    pub fn assign(&mut self, x: i64, c: Value) -> Result<(), AddMinError> {
        if !self.d.contains(x) {
            return Err(AddMinError::Missing(x));
        }
        if self.r.is_none() {
            self.d.set(x, c);
            return Ok(());
        }
        let r = self.rep_of(x);
        self.materialize(r);
        self.d.set(x, c);
        self.tick();
        Ok(())
    }

    /// Moves the point at `x` to `to`, keeping its value. `to` must lie
    /// strictly between the neighbours of `x`.
    pub fn shift(&mut self, x: i64, to: i64) -> Result<(), AddMinError> {
        if !self.d.contains(x) {
            return Err(AddMinError::Missing(x));
        }
        if to == x {
            return Ok(());
        }
        let lo_ok = self.d.pred_lt(x).is_none_or(|(p, _)| p < to);
        let hi_ok = self.d.succ_gt(x).is_none_or(|(s, _)| to < s);
        if !lo_ok || !hi_ok {
            return Err(AddMinError::BadShift { from: x, to });
        }
        let v = self.d.take(x).unwrap();
        self.d.insert(to, v).unwrap();
        if self.reps.remove(&x) {
            self.reps.insert(to);
            self.rec().shift(x, to)?;
        }
        Ok(())
    }

    pub fn insert(&mut self, x: i64, y: Value) -> Result<(), AddMinError> {
        if self.d.contains(x) {
            return Err(AddMinError::Duplicate(x));
        }
        if self.r.is_none() {
            self.d.insert(x, y).unwrap();
            return Ok(());
        }
        self.insert_structured(x, y);
        self.tick();
        Ok(())
    }

    fn insert_structured(&mut self, x: i64, y: Value) {
        let xp = self.d.pred_lt(x).map(|p| p.0);
        let xs = self.d.succ_gt(x).map(|p| p.0);
        let ra = xp.map(|p| self.rep_of(p));
        let rb = xs.map(|s| self.rep_of(s));
        if ra.is_some() && ra == rb {
            // x falls inside a two-point segment [xp, xs]: put x in place of
            // xp, then insert xp in front of the segment.
            let (xp, xs) = (xp.unwrap(), xs.unwrap());
            let yp = self.value_structured(xp).unwrap();
            self.materialize(xp);
            self.d.remove(xp);
            self.d.insert(x, y).unwrap();
            self.reps.remove(&xp);
            self.reps.insert(x);
            self.rec().shift(xp, x).expect("shift inside the segment");
            debug_assert!(self.d.contains(xs));
            self.insert_structured(xp, yp);
            return;
        }
        let la = ra.map(|r| self.seg_len(r));
        let lb = rb.map(|r| self.seg_len(r));
        if la == Some(1) {
            // Join the single-point segment on the left as its second point.
            self.materialize(ra.unwrap());
            self.d.insert(x, y).unwrap();
        } else if lb == Some(1) {
            // Become the first point of the single-point segment on the right.
            let s = rb.unwrap();
            self.materialize(s);
            self.d.insert(x, y).unwrap();
            self.reps.remove(&s);
            self.reps.insert(x);
            self.rec().shift(s, x).expect("shift to a free slot");
        } else {
            self.d.insert(x, y).unwrap();
            self.reps.insert(x);
            self.rec().insert(x, INF).unwrap();
        }
    }

    pub fn remove(&mut self, x: i64) -> bool {
        if !self.d.contains(x) {
            return false;
        }
        if self.r.is_none() {
            self.d.remove(x);
            return true;
        }
        self.remove_structured(x);
        if self.d.len() < self.flatten_below() {
            self.flatten();
        } else {
            self.tick();
        }
        true
    }

    fn remove_structured(&mut self, x: i64) {
        let r = self.rep_of(x);
        let (_, second) = self.segment(r);
        let prev = self.reps.range(..r).next_back().copied();
        let next = self.reps.range(r + 1..).next().copied();
        let lp = prev.map(|p| self.seg_len(p));
        let ln = next.map(|q| self.seg_len(q));
        let survivor = if x == r { second } else { Some(r) };

        if lp == Some(1) {
            // [p] [r, s] -> [p, u]
            let p = prev.unwrap();
            let u = survivor.expect("a neighbour of a single-point segment has two points");
            let vp = self.value_structured(p).unwrap();
            let vu = self.value_structured(u).unwrap();
            self.d.set(p, vp);
            self.d.set(u, vu);
            self.rec().assign(p, INF).unwrap();
            self.d.remove(x);
            self.reps.remove(&r);
            self.rec().remove(r);
        } else if ln == Some(1) {
            // [r, s] [q] -> [u, q]
            let q = next.unwrap();
            let u = survivor.expect("a neighbour of a single-point segment has two points");
            let vu = self.value_structured(u).unwrap();
            let vq = self.value_structured(q).unwrap();
            self.d.set(u, vu);
            self.d.set(q, vq);
            self.reps.remove(&q);
            self.rec().remove(q);
            self.rec().assign(r, INF).unwrap();
            self.d.remove(x);
            if u != r {
                self.reps.remove(&r);
                self.reps.insert(u);
                self.rec().shift(r, u).expect("shift to the survivor");
            }
        } else {
            match survivor {
                None => {
                    self.d.remove(x);
                    self.reps.remove(&x);
                    self.rec().remove(x);
                }
                Some(u) if u != r => {
                    let vu = self.value_structured(u).unwrap();
                    self.d.set(u, vu);
                    self.rec().assign(r, INF).unwrap();
                    self.d.remove(x);
                    self.reps.remove(&r);
                    self.reps.insert(u);
                    self.rec().shift(r, u).expect("shift to the survivor");
                }
                Some(_) => {
                    self.d.remove(x);
                }
            }
        }
    }

    /// Smallest value over all points.
    fn min_all(&self) -> Option<Value> {
        let d = self.d.min_all()?;
        Some(match &self.r {
            Some(r) => r.min_all().map_or(d, |v| d.min(v)),
            None => d,
        })
    }

    /// Counts one update and drops `R` if it has stayed useless long enough.
    fn tick(&mut self) {
        self.since_check += 1;
        if self.r.is_none() || self.since_check < self.d.len() {
            return;
        }
        self.since_check = 0;
        let useless = !self.r_finite || self.r.as_ref().unwrap().min_all().is_none_or(is_inf);
        if useless {
            self.flatten();
        }
    }

    /// Switches from the flat to the recursive layout.
    fn build(&mut self) {
        let pts = self.d.iter();
        let mut r = AddMinSet::with_leaf(self.leaf);
        self.reps.clear();
        for (k, &(x, _)) in pts.iter().enumerate() {
            if k % 2 == 0 {
                self.reps.insert(x);
                r.insert(x, INF).unwrap();
            }
        }
        self.r = Some(Box::new(r));
        self.since_check = 0;
    }

    /// Switches back to the flat layout with exact values in `D`.
    fn flatten(&mut self) {
        for (x, v) in self.iter() {
            self.d.set(x, v);
        }
        self.reps.clear();
        self.r = None;
        self.r_finite = false;
    }

    pub fn add_to_range(&mut self, i: i64, j: i64, c: Value) -> Result<(), AddMinError> {
        self.range_update(i, j, c, false)
    }

    pub fn min_range(&mut self, i: i64, j: i64, c: Value) -> Result<(), AddMinError> {
        self.range_update(i, j, c, true)
    }

    fn range_update(&mut self, i: i64, j: i64, c: Value, is_min: bool) -> Result<(), AddMinError> {
        if i > j {
            return Err(AddMinError::EmptyRange { i, j });
        }
        let first = match self.d.succ_ge(i) {
            Some((x, _)) if x <= j => x,
            _ => return Ok(()),
        };
        let last = self.d.pred_le(j).unwrap().0;
        let upd = |v: Value| if is_min { v.min(c) } else { v + c };
        if self.r.is_none() && is_min && !is_inf(c) && self.d.len() > self.leaf {
            self.build();
        }
        if self.r.is_none() {
            if is_min {
                for (x, v) in self.d.range(first, last) {
                    if c < v {
                        self.d.set(x, c);
                    }
                }
            } else {
                self.d.add_to_range(first, last, c).unwrap();
            }
            return Ok(());
        }

        let ra = self.rep_of(first);
        let rb = self.rep_of(last);
        let mut lo_rep = Some(ra);
        let mut hi_rep = Some(rb);
        let mut fixes: Vec<i64> = Vec::new();
        if ra != first {
            // Only the second point of the first segment is in range.
            fixes.push(first);
            lo_rep = self.reps.range(ra + 1..).next().copied();
        }
        if let (_, Some(t)) = self.segment(rb) {
            if t > j {
                // Only the representative of the last segment is in range.
                if rb >= first && !fixes.contains(&rb) {
                    fixes.push(rb);
                }
                hi_rep = self.reps.range(..rb).next_back().copied();
            }
        }
        if let (Some(a), Some(b)) = (lo_rep, hi_rep) {
            if a <= b {
                let end = self.segment(b).1.unwrap_or(b);
                if is_min {
                    if !is_inf(c) {
                        self.r_finite = true;
                    }
                    self.rec().min_range(a, b, c)?;
                } else {
                    self.d.add_to_range(a, end, c).unwrap();
                    self.rec().add_to_range(a, b, c)?;
                }
            }
        }
        for x in fixes {
            let v = self.value_structured(x).unwrap();
            self.assign(x, upd(v))?;
        }
        Ok(())
    }

    /// Checks the segment invariants and sizes on every level.
    pub fn audit(&self) -> Result<(), String> {
        self.d.audit()?;
        let Some(r) = &self.r else {
            if !self.reps.is_empty() {
                return Err("flat layout with representatives".into());
            }
            if self.r_finite {
                return Err("flat layout flagged finite".into());
            }
            return Ok(());
        };
        if self.d.len() < self.flatten_below() {
            return Err(format!("recursive layout with {} points", self.d.len()));
        }
        let keys: Vec<i64> = self.d.iter().into_iter().map(|p| p.0).collect();
        if self.reps.first() != keys.first() {
            return Err("first point is not a representative".into());
        }
        let mut lens = Vec::new();
        for (k, x) in keys.iter().enumerate() {
            if self.reps.contains(x) {
                lens.push(1usize);
            } else {
                if k == 0 {
                    return Err("orphan point".into());
                }
                *lens.last_mut().unwrap() += 1;
            }
        }
        if self.reps.iter().any(|x| !self.d.contains(*x)) {
            return Err("representative without a point".into());
        }
        if let Some(l) = lens.iter().find(|&&l| l > 2) {
            return Err(format!("segment of length {l}"));
        }
        if lens.windows(2).any(|w| w[0] == 1 && w[1] == 1) {
            return Err("two adjacent single-point segments".into());
        }
        if !self.r_finite && r.iter().iter().any(|&(_, v)| !is_inf(v)) {
            return Err("finite recursive value while marked infinite".into());
        }
        let rkeys: Vec<i64> = r.iter().into_iter().map(|p| p.0).collect();
        if rkeys != self.reps.iter().copied().collect::<Vec<_>>() {
            return Err("recursive keys differ from the representatives".into());
        }
        if 3 * r.len() > 2 * self.d.len() + 2 {
            return Err(format!("recursive set too large: {} of {}", r.len(), self.d.len()));
        }
        r.audit()
    }
}
