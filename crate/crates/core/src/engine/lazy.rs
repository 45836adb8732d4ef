// SPDX-License-Identifier: MIT OR Apache-2.0

//! The lazy engine.
//!
//! Breakpoints where the slope strictly increases are active; the stretch
//! between two consecutive active points is a mega-segment and is concave.
//! A wave whose ray stays inside a mega-segment is not shot. Its slope is
//! recorded with one range chmin over the pending slopes of all such
//! mega-segments at once, and the ray is materialized by `flush` when the
//! mega-segment is next inspected. The true array is
//! `min(stored, forward ray, backward ray)` on every mega-segment.
//!
//! A deferred ray never lowers the cell next to the far end of its
//! mega-segment. Rays that would, because they cross the final unit step,
//! are shot at once like long rays: with integer breakpoints such a crossing
//! changes the slope into the far endpoint and can make it passive.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use super::pwl::{backward_ray, forward_ray, Pwl, RayHost, RayOutcome};
use super::{check_domain, check_range, check_slope, EngineError, EngineStats, RangeEngine};
use crate::add_min::{is_inf, AddMinSet, INF};
use crate::interval_add::IntervalAddSet;
use crate::rle::Value;

#[derive(Clone, Debug)]
pub struct LazyEngine {
    pwl: Pwl,
    active: BTreeSet<i64>,
    /// Largest forward slope that must be shot explicitly, keyed by the
    /// mega-segment's left end.
    key_fwd: IntervalAddSet,
    /// Negated largest backward slope that must be shot explicitly, keyed by
    /// the mega-segment's left end.
    key_back: IntervalAddSet,
    /// Pending forward ray slope, keyed by the mega-segment's left end.
    rho: AddMinSet,
    /// Pending backward ray slope magnitude, keyed by the right end.
    rho_back: AddMinSet,
    /// Key ranges that may hold a finite pending slope in `rho` and
    /// `rho_back`. Keys outside them are known to be infinite.
    marked: Marks,
    marked_back: Marks,
    stats: EngineStats,
    instrument: bool,
}

impl RayHost for LazyEngine {
    fn pwl(&mut self) -> &mut Pwl {
        &mut self.pwl
    }

    fn before_ray(&mut self, o: i64, forward: bool) {
        let q = if forward { self.pa_le(o) } else { self.pa_lt(o) };
        if let Some(q) = q {
            self.flush(q);
        }
    }

    fn before_delete(&mut self, w: i64, forward: bool) {
        if self.active.contains(&w) {
            let q = if forward { Some(w) } else { self.pa_lt(w) };
            if let Some(q) = q {
                self.flush(q);
            }
        }
    }

    fn after_delete(&mut self, w: i64) {
        if self.active.contains(&w) {
            self.deactivate(w);
        }
    }
}

/// Disjoint closed intervals of keys.
#[derive(Clone, Debug, Default)]
struct Marks {
    by_start: BTreeMap<i64, i64>,
}

impl Marks {
    fn mark(&mut self, mut a: i64, mut b: i64) {
        if let Some((&s, &e)) = self.by_start.range(..=a).next_back() {
            if e + 1 >= a {
                a = s;
                b = b.max(e);
            }
        }
        while let Some((&s, &e)) = self.by_start.range(a..).next() {
            if s > b + 1 {
                break;
            }
            self.by_start.remove(&s);
            b = b.max(e);
        }
        self.by_start.insert(a, b);
    }

    fn hit(&self, x: i64) -> bool {
        self.by_start.range(..=x).next_back().is_some_and(|(_, &e)| x <= e)
    }

    fn clear(&mut self, x: i64) {
        let Some((&s, &e)) = self.by_start.range(..=x).next_back() else { return };
        if x > e {
            return;
        }
        self.by_start.remove(&s);
        if s < x {
            self.by_start.insert(s, x - 1);
        }
        if x < e {
            self.by_start.insert(x + 1, e);
        }
    }
}

fn floor_ceil(num: Value, den: Value) -> (Value, Value) {
    (num.div_euclid(den), -(-num).div_euclid(den))
}

impl LazyEngine {
    /// An engine that also counts long rays leaving their target active,
    /// rays from unexpected origins, and unexpected new active points.
    pub fn instrumented(lo: i64, hi: i64) -> Result<Self, EngineError> {
        let mut e = Self::with_domain(lo, hi)?;
        e.instrument = true;
        Ok(e)
    }

    pub fn num_breakpoints(&self) -> usize {
        self.pwl.len()
    }

    pub fn num_active(&self) -> usize {
        self.active.len()
    }

    fn pa_le(&self, x: i64) -> Option<i64> {
        self.active.range(..=x).next_back().copied()
    }

    fn pa_lt(&self, x: i64) -> Option<i64> {
        self.active.range(..x).next_back().copied()
    }

    fn sa_ge(&self, x: i64) -> Option<i64> {
        self.active.range(x..).next().copied()
    }

    fn sa_gt(&self, x: i64) -> Option<i64> {
        self.active.range(x + 1..).next().copied()
    }

    fn activate(&mut self, x: i64) {
        self.active.insert(x);
        if x != self.pwl.hi {
            self.rho.insert(x, INF).unwrap();
            self.key_fwd.insert(x, 0).unwrap();
            self.key_back.insert(x, 0).unwrap();
        }
        if x != self.pwl.lo {
            self.rho_back.insert(x, INF).unwrap();
        }
    }

    fn deactivate(&mut self, x: i64) {
        debug_assert!(x != self.pwl.lo && x != self.pwl.hi);
        self.active.remove(&x);
        self.rho.remove(x);
        self.rho_back.remove(x);
        self.key_fwd.remove(x);
        self.key_back.remove(x);
    }

    /// Search keys of the mega-segment `[q, q2]` with slope `gamma`.
    ///
    /// A forward ray of slope `s` must be explicit when `gamma >= s` (it
    /// leaves the mega-segment) or when it passes below the stored value at
    /// `q2 - 1`; the key is the largest such `s`. The backward key mirrors it.
    fn keys(&self, q: i64, q2: i64) -> (Value, Value) {
        // The first segment covers q + 1 and the last one covers q2 - 1.
        let first_line = self.pwl.line(q);
        let last_line = self.pwl.line(self.pwl.pred(q2).expect("q < q2"));
        let yq = first_line.at(q);
        let yq2 = last_line.at(q2);
        let den = (q2 - q) as Value;
        let (fl, ce) = floor_ceil(yq2 - yq, den);
        if q2 - q < 2 {
            return (fl, ce);
        }
        let steps = den - 1;
        let last = (last_line.at(q2 - 1) - yq - 1).div_euclid(steps);
        let first = (first_line.at(q + 1) - yq2 - 1).div_euclid(steps);
        (fl.max(last), ce.min(-first))
    }

    fn refresh_keys(&mut self, q: i64) {
        let Some(q2) = self.sa_gt(q) else { return };
        let (f, b) = self.keys(q, q2);
        self.key_fwd.set(q, f);
        self.key_back.set(q, b);
    }

    /// Whether the mega-segment starting at active `q` has slope `>= s`
    /// (`forward`) or `<= -s` (backward).
    fn is_long(&self, q: i64, s: Value, forward: bool) -> bool {
        let q2 = self.sa_gt(q).expect("not the last active point");
        let num = self.pwl.value(q2) - self.pwl.value(q);
        let den = (q2 - q) as Value;
        if forward {
            num >= s * den
        } else {
            num <= -s * den
        }
    }

    /// Materializes the pending rays of the mega-segment starting at active `q`.
    fn flush(&mut self, q: i64) {
        let Some(q2) = self.sa_gt(q) else { return };
        let r = if self.marked.hit(q) { self.rho.lookup(q).expect("active point") } else { INF };
        let rb = if self.marked_back.hit(q2) {
            self.rho_back.lookup(q2).expect("active point")
        } else {
            INF
        };
        if is_inf(r) && is_inf(rb) {
            return;
        }
        self.stats.flushes += 1;
        if !is_inf(r) {
            self.rho.assign(q, INF).unwrap();
            self.marked.clear(q);
            let out = forward_ray(self, q, r, q2, false);
            self.note_flush_ray(&out);
        }
        if !is_inf(rb) {
            self.rho_back.assign(q2, INF).unwrap();
            self.marked_back.clear(q2);
            let out = backward_ray(self, q2, rb, q, false);
            self.note_flush_ray(&out);
        }
        self.refresh_keys(q);
    }

    fn note_flush_ray(&mut self, out: &RayOutcome) {
        if out.shot {
            self.stats.rays += 1;
        }
        if out.hit_limit {
            self.stats.flush_escapes += 1;
        }
    }

    /// Brings the breakpoints in `pts` back to canonical form and recomputes
    /// their activity and the slopes of the mega-segments around them.
    fn settle(&mut self, pts: impl IntoIterator<Item = i64>) {
        let (lo, hi) = (self.pwl.lo, self.pwl.hi);
        let mut cand: Vec<i64> = pts.into_iter().filter(|&x| x >= lo && x <= hi).collect();
        cand.sort_unstable();
        cand.dedup();
        self.flush_around_all(&cand);
        for &x in &cand {
            if !self.pwl.contains(x) {
                continue;
            }
            if self.pwl.redundant(x) {
                if self.active.contains(&x) {
                    self.deactivate(x);
                }
                self.pwl.remove(x);
                continue;
            }
            match (self.pwl.is_active(x), self.active.contains(&x)) {
                (true, false) => self.activate(x),
                (false, true) => self.deactivate(x),
                _ => {}
            }
        }
        let mut qs = BTreeSet::new();
        for &x in &cand {
            qs.extend(self.pa_le(x));
            qs.extend(self.pa_lt(x));
        }
        for q in qs {
            self.refresh_keys(q);
        }
    }

    /// Flushes every mega-segment containing one of the sorted points `xs`.
    fn flush_around_all(&mut self, xs: &[i64]) {
        let mut last = None;
        for &x in xs {
            for q in [self.pa_lt(x), self.pa_le(x)].into_iter().flatten() {
                if last.is_none_or(|l| q > l) {
                    self.flush(q);
                    last = Some(q);
                }
            }
        }
    }

    /// Flushes the mega-segments around the ends of `[i, j]` and makes their
    /// neighbourhood explicit breakpoints.
    fn prepare(&mut self, i: i64, j: i64) -> Vec<i64> {
        let (lo, hi) = (self.pwl.lo, self.pwl.hi);
        let mut b: Vec<i64> = [i - 1, i, j, j + 1].into_iter().filter(|&x| x >= lo && x <= hi).collect();
        b.dedup();
        self.flush_around_all(&b);
        for &x in &b {
            self.pwl.ensure(x);
        }
        b
    }

    fn note_origin(&mut self, o: i64, endpoint: i64) {
        if self.instrument {
            self.stats.checked_rays += 1;
            if o != endpoint && !self.active.contains(&o) {
                self.stats.bad_origins += 1;
            }
        }
    }

    fn actives_in(&self, i: i64, j: i64) -> BTreeSet<i64> {
        self.active.range(i..=j).copied().collect()
    }

    fn finish(&mut self, long_targets: &[i64], before: Option<(BTreeSet<i64>, i64, i64, i64)>) {
        for &t in long_targets {
            if self.instrument {
                self.stats.checked_rays += 1;
            }
            if self.active.contains(&t) {
                self.stats.long_ray_misses += 1;
            }
        }
        if let Some((before, a, b, allowed)) = before {
            let after = self.actives_in(a, b);
            self.stats.stray_actives += after.difference(&before).filter(|&&x| x != allowed).count() as u64;
        }
        self.stats.breakpoints_inserted = self.pwl.inserted;
        self.stats.breakpoints_deleted = self.pwl.deleted;
    }

    fn shoot_forward(&mut self, o: i64, alpha: Value, j: i64, endpoint: i64) -> RayOutcome {
        self.note_origin(o, endpoint);
        let out = forward_ray(self, o, alpha, j, true);
        if out.shot {
            self.stats.rays += 1;
            self.settle(out.touched.iter().copied());
        }
        out
    }

    fn shoot_backward(&mut self, o: i64, alpha: Value, i: i64, endpoint: i64) -> RayOutcome {
        self.note_origin(o, endpoint);
        let out = backward_ray(self, o, alpha, i, true);
        if out.shot {
            self.stats.rays += 1;
            self.settle(out.touched.iter().copied());
        }
        out
    }

    fn true_values(&self) -> Vec<Value> {
        let lo = self.pwl.lo;
        let mut v = self.pwl.values();
        let act: Vec<i64> = self.active.iter().copied().collect();
        for w in act.windows(2) {
            let (q, q2) = (w[0], w[1]);
            let r = self.rho.lookup(q).unwrap();
            let rb = self.rho_back.lookup(q2).unwrap();
            let (yq, yq2) = (v[(q - lo) as usize], v[(q2 - lo) as usize]);
            for x in q..=q2 {
                let cell = &mut v[(x - lo) as usize];
                if !is_inf(r) {
                    *cell = (*cell).min(yq + r * (x - q) as Value);
                }
                if !is_inf(rb) {
                    *cell = (*cell).min(yq2 + rb * (q2 - x) as Value);
                }
            }
        }
        v
    }

    /// Materializes every pending ray.
    pub fn flush_all(&mut self) {
        let act: Vec<i64> = self.active.iter().copied().collect();
        for q in act {
            self.flush(q);
        }
    }

    /// One line per breakpoint (`bp x y slope`), then one per active point
    /// (`active x gamma rho rho'`), with `-` where a value does not exist.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for (x, y, a) in self.pwl.points() {
            writeln!(s, "bp {x} {y} {a}").unwrap();
        }
        let show = |v: Option<Value>| match v {
            None => "-".to_string(),
            Some(v) if is_inf(v) => "inf".to_string(),
            Some(v) => v.to_string(),
        };
        for &q in &self.active {
            let gamma = match self.sa_gt(q) {
                None => "-".to_string(),
                Some(q2) => {
                    let num = self.pwl.value(q2) - self.pwl.value(q);
                    let den = (q2 - q) as Value;
                    if num % den == 0 {
                        (num / den).to_string()
                    } else {
                        format!("{num}/{den}")
                    }
                }
            };
            writeln!(
                s,
                "active {q} {gamma} {} {}",
                show(self.rho.lookup(q)),
                show(self.rho_back.lookup(q))
            )
            .unwrap();
        }
        s
    }

    /// Checks every structural invariant against a fully flushed copy.
    pub fn audit(&self) -> Result<(), String> {
        let (lo, hi) = (self.pwl.lo, self.pwl.hi);
        self.pwl.audit()?;
        self.key_fwd.audit()?;
        self.key_back.audit()?;
        self.rho.audit()?;
        self.rho_back.audit()?;
        if !self.active.contains(&lo) || !self.active.contains(&hi) {
            return Err("domain endpoints must be active".into());
        }
        if let Some(x) = self.active.iter().find(|&&x| !self.pwl.contains(x)) {
            return Err(format!("active point {x} is not a breakpoint"));
        }
        let keys = |v: Vec<(i64, Value)>| v.into_iter().map(|p| p.0).collect::<Vec<_>>();
        let left: Vec<i64> = self.active.iter().copied().filter(|&x| x != hi).collect();
        let right: Vec<i64> = self.active.iter().copied().filter(|&x| x != lo).collect();
        if keys(self.rho.iter()) != left || keys(self.key_fwd.iter()) != left || keys(self.key_back.iter()) != left {
            return Err("left-keyed structures differ from the active points".into());
        }
        if keys(self.rho_back.iter()) != right {
            return Err("right-keyed structure differs from the active points".into());
        }
        let unmarked = |set: &AddMinSet, m: &Marks| set.iter().into_iter().find(|&(k, v)| !is_inf(v) && !m.hit(k));
        if let Some((k, _)) = unmarked(&self.rho, &self.marked).or(unmarked(&self.rho_back, &self.marked_back)) {
            return Err(format!("finite pending slope at unmarked key {k}"));
        }
        let act: Vec<i64> = self.active.iter().copied().collect();
        for w in act.windows(2) {
            let (q, q2) = (w[0], w[1]);
            let (kf, kb) = self.keys(q, q2);
            if self.key_fwd.lookup(q) != Some(kf) || self.key_back.lookup(q) != Some(kb) {
                return Err(format!("stale search keys at {q}"));
            }
            let r = self.rho.lookup(q).unwrap();
            if !is_inf(r) && r <= kf {
                return Err(format!("pending forward slope {r} at {q} should have been shot"));
            }
            let rb = self.rho_back.lookup(q2).unwrap();
            if !is_inf(rb) && -rb >= kb {
                return Err(format!("pending backward slope {rb} at {q2} should have been shot"));
            }
            for x in self.pwl.breakpoints_in(q + 1, q2 - 1) {
                if self.pwl.is_active(x) && !self.pwl.redundant(x) {
                    // A stored point may look active only while a ray is pending.
                    if is_inf(r) && is_inf(rb) {
                        return Err(format!("unflagged active breakpoint {x}"));
                    }
                }
            }
        }

        let want = self.true_values();
        let mut full = self.clone();
        full.flush_all();
        if full.stats.flush_escapes != self.stats.flush_escapes {
            return Err("a pending ray escaped its mega-segment".into());
        }
        full.pwl.audit()?;
        let got = full.pwl.values();
        if got != want {
            return Err("flushed array differs from the lazy composition".into());
        }
        if let Some(x) = full.pwl.breakpoints().find(|&x| full.pwl.redundant(x)) {
            return Err(format!("redundant breakpoint {x} after flushing"));
        }
        let v = |x: i64| want[(x - lo) as usize];
        let mut true_bps = vec![lo];
        let mut true_active = vec![lo];
        for x in lo + 1..hi {
            let (sin, sout) = (v(x) - v(x - 1), v(x + 1) - v(x));
            if sin != sout {
                true_bps.push(x);
            }
            if sout > sin {
                true_active.push(x);
            }
        }
        if hi != lo {
            true_bps.push(hi);
            true_active.push(hi);
        }
        if full.pwl.breakpoints().collect::<Vec<_>>() != true_bps {
            return Err("breakpoints differ from the true maximal segments".into());
        }
        if act != true_active {
            return Err(format!("active set {act:?} differs from the true one {true_active:?}"));
        }
        Ok(())
    }
}

impl RangeEngine for LazyEngine {
    fn with_domain(lo: i64, hi: i64) -> Result<Self, EngineError> {
        check_domain(lo, hi)?;
        let mut e = LazyEngine {
            pwl: Pwl::new(lo, hi),
            active: BTreeSet::new(),
            key_fwd: IntervalAddSet::new(),
            key_back: IntervalAddSet::new(),
            rho: AddMinSet::new(),
            rho_back: AddMinSet::new(),
            marked: Marks::default(),
            marked_back: Marks::default(),
            stats: EngineStats::default(),
            instrument: false,
        };
        e.activate(lo);
        if hi != lo {
            e.activate(hi);
        }
        e.refresh_keys(lo);
        e.finish(&[], None);
        Ok(e)
    }

    fn domain(&self) -> (i64, i64) {
        (self.pwl.lo, self.pwl.hi)
    }

    fn lookup(&mut self, k: i64) -> Result<Value, EngineError> {
        check_range(self.pwl.lo, self.pwl.hi, k, k)?;
        self.stats.lookups += 1;
        if let Some(q) = self.pa_le(k) {
            self.flush(q);
        }
        let v = self.pwl.value(k);
        self.finish(&[], None);
        Ok(v)
    }

    fn add_const(&mut self, i: i64, j: i64, c: Value) -> Result<(), EngineError> {
        check_range(self.pwl.lo, self.pwl.hi, i, j)?;
        self.stats.ops += 1;
        let b = self.prepare(i, j);
        self.pwl.add_linear(i, j, c, 0);
        self.settle(b);
        self.finish(&[], None);
        Ok(())
    }

    fn add_gradient(&mut self, i: i64, j: i64, g: Value) -> Result<(), EngineError> {
        check_range(self.pwl.lo, self.pwl.hi, i, j)?;
        self.stats.ops += 1;
        let b = self.prepare(i, j);
        self.pwl.add_linear(i, j, 0, g);
        if g != 0 {
            self.key_fwd.add_to_range(i, j, g).unwrap();
            self.key_back.add_to_range(i, j, g).unwrap();
            self.rho.add_to_range(i, j, g).unwrap();
            self.rho_back.add_to_range(i, j, -g).unwrap();
        }
        self.settle(b);
        self.finish(&[], None);
        Ok(())
    }

    fn left_linear_wave(&mut self, i: i64, j: i64, alpha: Value) -> Result<(), EngineError> {
        check_range(self.pwl.lo, self.pwl.hi, i, j)?;
        check_slope(alpha)?;
        self.stats.ops += 1;
        if i == j {
            return Ok(());
        }
        let hi = self.pwl.hi;
        let before = self
            .instrument
            .then(|| (self.actives_in(i, (j + 1).min(hi)), i, (j + 1).min(hi), j));
        let b = self.prepare(i, j);
        let mut long_targets = Vec::new();

        let out = self.shoot_forward(i, alpha, j, i);
        let mut done = out.hit_limit;
        let mut p = if out.shot { out.end } else { i };
        while !done {
            let Some(qw) = self.sa_ge(p) else { break };
            if qw >= j {
                break;
            }
            // A straight run of slope `alpha` into `qw` carries the wave on
            // past it, so `qw` is shot explicitly.
            if qw > i {
                if let Some(q) = self.pa_lt(qw) {
                    self.flush(q);
                }
                if self.pwl.slope_in(qw) == alpha && self.pwl.slope(qw) > alpha {
                    let out = self.shoot_forward(qw, alpha, j, i);
                    done = out.hit_limit;
                    p = if out.shot { out.end } else { qw + 1 };
                    continue;
                }
            }
            let long = self.key_fwd.next_gt(qw - 1, alpha - 1).map(|t| t.0).filter(|&z| z < j);
            match long {
                Some(qz) => {
                    if qw < qz {
                        self.rho.min_range(qw, qz - 1, alpha).unwrap();
                        self.marked.mark(qw, qz - 1);
                        self.stats.pending_updates += 1;
                    }
                    let target = self.sa_gt(qz).expect("qz < j <= hi");
                    if self.is_long(qz, alpha, true) {
                        if target < j {
                            long_targets.push(target);
                        }
                        self.stats.long_rays += 1;
                    }
                    let out = self.shoot_forward(qz, alpha, j, i);
                    done = out.hit_limit;
                    p = if out.shot { out.end } else { qz + 1 };
                }
                None => {
                    let qb = self.pa_lt(j).expect("qw < j is active");
                    if qw < qb {
                        self.rho.min_range(qw, qb - 1, alpha).unwrap();
                        self.marked.mark(qw, qb - 1);
                        self.stats.pending_updates += 1;
                    }
                    self.shoot_forward(qb, alpha, j, i);
                    done = true;
                }
            }
        }
        self.settle(b);
        self.finish(&long_targets, before);
        Ok(())
    }

    fn right_linear_wave(&mut self, i: i64, j: i64, alpha: Value) -> Result<(), EngineError> {
        check_range(self.pwl.lo, self.pwl.hi, i, j)?;
        check_slope(alpha)?;
        self.stats.ops += 1;
        if i == j {
            return Ok(());
        }
        let lo = self.pwl.lo;
        let before = self
            .instrument
            .then(|| (self.actives_in((i - 1).max(lo), j), (i - 1).max(lo), j, i));
        let b = self.prepare(i, j);
        let mut long_targets = Vec::new();

        let out = self.shoot_backward(j, alpha, i, j);
        let mut done = out.hit_limit;
        // Candidates are the active points strictly left of `p`.
        let mut p = if out.shot { out.end + 1 } else { j };
        while !done {
            let Some(qw) = self.pa_lt(p) else { break };
            if qw <= i {
                break;
            }
            if let Some(q) = self.pa_le(qw) {
                self.flush(q);
            }
            if self.pwl.slope(qw) == -alpha && self.pwl.slope_in(qw) < -alpha {
                let out = self.shoot_backward(qw, alpha, i, j);
                done = out.hit_limit;
                p = if out.shot { out.end + 1 } else { qw };
                continue;
            }
            let long = self.key_back.prev_lt(qw, -alpha + 1).map(|t| t.0).filter(|&s| s >= i);
            match long {
                Some(s) => {
                    let o = self.sa_gt(s).expect("s < qw");
                    if o < qw {
                        self.rho_back.min_range(o + 1, qw, alpha).unwrap();
                        self.marked_back.mark(o + 1, qw);
                        self.stats.pending_updates += 1;
                    }
                    if self.is_long(s, alpha, false) {
                        if s > i {
                            long_targets.push(s);
                        }
                        self.stats.long_rays += 1;
                    }
                    let out = self.shoot_backward(o, alpha, i, j);
                    done = out.hit_limit;
                    p = if out.shot { out.end + 1 } else { o };
                }
                None => {
                    let qa = self.sa_ge(i).expect("qw > i is active");
                    if qa < qw {
                        self.rho_back.min_range(qa + 1, qw, alpha).unwrap();
                        self.marked_back.mark(qa + 1, qw);
                        self.stats.pending_updates += 1;
                    }
                    if qa > i {
                        self.shoot_backward(qa, alpha, i, j);
                    }
                    done = true;
                }
            }
        }
        self.settle(b);
        self.finish(&long_targets, before);
        Ok(())
    }

    fn snapshot(&self) -> Vec<Value> {
        self.true_values()
    }

    fn stats(&self) -> EngineStats {
        self.stats
    }
}
