// SPDX-License-Identifier: MIT OR Apache-2.0

//! The eager engine: every wave is carried out by explicit ray shooting.

use std::collections::BTreeSet;
use std::fmt::Write;

use super::pwl::{backward_ray, forward_ray, Pwl, RayHost};
use super::{check_domain, check_range, check_slope, EngineError, EngineStats, RangeEngine};
use crate::rle::Value;

#[derive(Clone, Debug)]
pub struct WarmupEngine {
    pwl: Pwl,
    stats: EngineStats,
    instrument: bool,
}

impl RayHost for WarmupEngine {
    fn pwl(&mut self) -> &mut Pwl {
        &mut self.pwl
    }
}

impl WarmupEngine {
    /// An engine that also checks where rays start and which points they
    /// activate. The checks cost time linear in the range of each wave.
    pub fn instrumented(lo: i64, hi: i64) -> Result<Self, EngineError> {
        let mut e = Self::with_domain(lo, hi)?;
        e.instrument = true;
        Ok(e)
    }

    pub fn num_breakpoints(&self) -> usize {
        self.pwl.len()
    }

    /// One line per breakpoint: `bp x y slope`.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for (x, y, a) in self.pwl.points() {
            writeln!(s, "bp {x} {y} {a}").unwrap();
        }
        s
    }

    pub fn audit(&self) -> Result<(), String> {
        self.pwl.audit()?;
        if let Some(x) = self.pwl.breakpoints().find(|&x| self.pwl.redundant(x)) {
            return Err(format!("redundant breakpoint {x}"));
        }
        Ok(())
    }

    fn actives_in(&self, i: i64, j: i64) -> BTreeSet<i64> {
        self.pwl
            .breakpoints_in(i, j)
            .into_iter()
            .filter(|&x| self.pwl.is_active(x))
            .collect()
    }

    fn note_origin(&mut self, o: i64, endpoint: i64) {
        if self.instrument {
            self.stats.checked_rays += 1;
            if o != endpoint && !self.pwl.is_active(o) {
                self.stats.bad_origins += 1;
            }
        }
    }

    fn note_new_actives(&mut self, before: Option<BTreeSet<i64>>, i: i64, j: i64, allowed: i64) {
        if let Some(before) = before {
            let after = self.actives_in(i, j);
            let stray = after.difference(&before).filter(|&&x| x != allowed).count();
            self.stats.stray_actives += stray as u64;
        }
    }

    fn finish(&mut self) {
        self.stats.breakpoints_inserted = self.pwl.inserted;
        self.stats.breakpoints_deleted = self.pwl.deleted;
    }

    fn add_linear(&mut self, i: i64, j: i64, c: Value, g: Value) -> Result<(), EngineError> {
        check_range(self.pwl.lo, self.pwl.hi, i, j)?;
        self.stats.ops += 1;
        let pts: Vec<i64> = [i - 1, i, j, j + 1]
            .into_iter()
            .filter(|&x| x >= self.pwl.lo && x <= self.pwl.hi)
            .collect();
        for &x in &pts {
            self.pwl.ensure(x);
        }
        self.pwl.add_linear(i, j, c, g);
        self.pwl.canonicalize(&pts);
        self.finish();
        Ok(())
    }
}

impl RangeEngine for WarmupEngine {
    fn with_domain(lo: i64, hi: i64) -> Result<Self, EngineError> {
        check_domain(lo, hi)?;
        let pwl = Pwl::new(lo, hi);
        let mut e = WarmupEngine {
            pwl,
            stats: EngineStats::default(),
            instrument: false,
        };
        e.finish();
        Ok(e)
    }

    fn domain(&self) -> (i64, i64) {
        (self.pwl.lo, self.pwl.hi)
    }

    fn lookup(&mut self, k: i64) -> Result<Value, EngineError> {
        check_range(self.pwl.lo, self.pwl.hi, k, k)?;
        self.stats.lookups += 1;
        Ok(self.pwl.value(k))
    }

    fn add_const(&mut self, i: i64, j: i64, c: Value) -> Result<(), EngineError> {
        self.add_linear(i, j, c, 0)
    }

    fn add_gradient(&mut self, i: i64, j: i64, g: Value) -> Result<(), EngineError> {
        self.add_linear(i, j, 0, g)
    }

    fn left_linear_wave(&mut self, i: i64, j: i64, alpha: Value) -> Result<(), EngineError> {
        check_range(self.pwl.lo, self.pwl.hi, i, j)?;
        check_slope(alpha)?;
        self.stats.ops += 1;
        if i == j {
            return Ok(());
        }
        let mut dirty = vec![i, j];
        for x in [i, j, j + 1] {
            if x <= self.pwl.hi {
                self.pwl.ensure(x);
                dirty.push(x);
            }
        }
        let before = self.instrument.then(|| self.actives_in(i, (j + 1).min(self.pwl.hi)));
        let mut from = i;
        while let Some(o) = self.pwl.next_steeper(from, alpha) {
            if o >= j {
                break;
            }
            self.note_origin(o, i);
            let out = forward_ray(self, o, alpha, j, false);
            self.stats.rays += 1;
            dirty.extend(out.touched);
            if out.hit_limit {
                break;
            }
            from = o + 1;
        }
        self.pwl.canonicalize(&dirty);
        self.note_new_actives(before, i, (j + 1).min(self.pwl.hi), j);
        self.finish();
        Ok(())
    }

    fn right_linear_wave(&mut self, i: i64, j: i64, alpha: Value) -> Result<(), EngineError> {
        check_range(self.pwl.lo, self.pwl.hi, i, j)?;
        check_slope(alpha)?;
        self.stats.ops += 1;
        if i == j {
            return Ok(());
        }
        let mut dirty = vec![i, j];
        for x in [i - 1, i, j] {
            if x >= self.pwl.lo {
                self.pwl.ensure(x);
                dirty.push(x);
            }
        }
        let before = self.instrument.then(|| self.actives_in((i - 1).max(self.pwl.lo), j));
        let mut upto = j;
        while let Some(s) = self.pwl.prev_falling(upto, alpha) {
            if s < i {
                break;
            }
            let o = self.pwl.succ(s).expect("s < j");
            self.note_origin(o, j);
            let out = backward_ray(self, o, alpha, i, false);
            self.stats.rays += 1;
            dirty.extend(out.touched);
            if out.hit_limit {
                break;
            }
            upto = out.end;
        }
        self.pwl.canonicalize(&dirty);
        self.note_new_actives(before, (i - 1).max(self.pwl.lo), j, i);
        self.finish();
        Ok(())
    }

    fn snapshot(&self) -> Vec<Value> {
        self.pwl.values()
    }

    fn stats(&self) -> EngineStats {
        self.stats
    }
}
