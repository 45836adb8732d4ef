// SPDX-License-Identifier: MIT OR Apache-2.0

//! Piecewise-linear arrays and ray shooting.

use std::collections::BTreeSet;

use crate::interval_add::IntervalAddSet;
use crate::rle::Value;

/// `y = a * x + b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Line {
    pub a: Value,
    pub b: Value,
}

impl Line {
    pub fn at(self, x: i64) -> Value {
        self.a * x as Value + self.b
    }

    /// The line through `(x, y0)` and `(x + 1, y1)`.
    pub fn join(x: i64, y0: Value, y1: Value) -> Line {
        let a = y1 - y0;
        Line { a, b: y0 - a * x as Value }
    }
}

/// An integer array over `[lo, hi]` stored as the breakpoints of its linear
/// interpolation. Each breakpoint carries the line of the segment starting
/// there; the line stored at `hi` only fixes the value at `hi`.
#[derive(Clone, Debug)]
pub(crate) struct Pwl {
    pub lo: i64,
    pub hi: i64,
    bps: BTreeSet<i64>,
    alpha: IntervalAddSet,
    beta: IntervalAddSet,
    pub inserted: u64,
    pub deleted: u64,
}

impl Pwl {
    pub fn new(lo: i64, hi: i64) -> Self {
        let mut p = Pwl {
            lo,
            hi,
            bps: BTreeSet::new(),
            alpha: IntervalAddSet::new(),
            beta: IntervalAddSet::new(),
            inserted: 0,
            deleted: 0,
        };
        p.insert(lo, Line { a: 0, b: 0 });
        if hi != lo {
            p.insert(hi, Line { a: 0, b: 0 });
        }
        p
    }

    pub fn len(&self) -> usize {
        self.bps.len()
    }

    pub fn contains(&self, x: i64) -> bool {
        self.bps.contains(&x)
    }

    pub fn line(&self, x: i64) -> Line {
        Line {
            a: self.alpha.lookup(x).expect("breakpoint"),
            b: self.beta.lookup(x).expect("breakpoint"),
        }
    }

    pub fn slope(&self, x: i64) -> Value {
        self.alpha.lookup(x).expect("breakpoint")
    }

    /// Slope of the segment ending at breakpoint `x > lo`.
    pub fn slope_in(&self, x: i64) -> Value {
        self.slope(self.pred(x).expect("not the first breakpoint"))
    }

    pub fn set_line(&mut self, x: i64, l: Line) {
        debug_assert!(self.contains(x));
        self.alpha.set(x, l.a);
        self.beta.set(x, l.b);
    }

    pub fn insert(&mut self, x: i64, l: Line) {
        debug_assert!(x >= self.lo && x <= self.hi);
        let fresh = self.bps.insert(x);
        debug_assert!(fresh, "breakpoint {x} already present");
        self.alpha.insert(x, l.a).expect("fresh breakpoint");
        self.beta.insert(x, l.b).expect("fresh breakpoint");
        self.inserted += 1;
    }

    pub fn remove(&mut self, x: i64) {
        debug_assert!(x != self.lo && x != self.hi);
        let had = self.bps.remove(&x);
        debug_assert!(had);
        self.alpha.remove(x);
        self.beta.remove(x);
        self.deleted += 1;
    }

    /// Makes `x` a breakpoint without changing any value.
    pub fn ensure(&mut self, x: i64) -> bool {
        if self.contains(x) {
            return false;
        }
        let p = self.pred(x).expect("lo is always a breakpoint");
        let l = self.line(p);
        self.insert(x, l);
        true
    }

    pub fn pred(&self, x: i64) -> Option<i64> {
        self.bps.range(..x).next_back().copied()
    }

    pub fn succ(&self, x: i64) -> Option<i64> {
        self.bps.range(x + 1..).next().copied()
    }

    pub fn value(&self, k: i64) -> Value {
        let p = *self.bps.range(..=k).next_back().expect("k inside the domain");
        self.line(p).at(k)
    }

    /// Whether `x` could be dropped without changing the array.
    pub fn redundant(&self, x: i64) -> bool {
        x != self.lo && x != self.hi && self.slope(x) == self.slope_in(x)
    }

    /// Whether the slope strictly increases at `x`. The endpoints always count.
    pub fn is_active(&self, x: i64) -> bool {
        x == self.lo || x == self.hi || self.slope(x) > self.slope_in(x)
    }

    /// The first breakpoint at or after `x` whose segment is steeper than `s`.
    pub fn next_steeper(&self, x: i64, s: Value) -> Option<i64> {
        self.alpha.next_gt(x - 1, s).map(|p| p.0)
    }

    /// The last breakpoint before `x` whose segment falls faster than `-s`.
    pub fn prev_falling(&self, x: i64, s: Value) -> Option<i64> {
        self.alpha.prev_lt(x, -s).map(|p| p.0)
    }

    /// Adds `c + k * g` to every `A[k]` with `k` in `[i, j]`. The
    /// breakpoints `i - 1`, `i`, `j`, `j + 1` that lie in the domain must exist.
    pub fn add_linear(&mut self, i: i64, j: i64, c: Value, g: Value) {
        let before = (i > self.lo).then(|| self.value(i - 1));
        let after = (j < self.hi).then(|| self.value(j + 1));
        let yi = self.value(i) + c + g * i as Value;
        let yj = self.value(j) + c + g * j as Value;
        if c != 0 {
            self.beta.add_to_range(i, j, c).unwrap();
        }
        if g != 0 {
            self.alpha.add_to_range(i, j, g).unwrap();
        }
        if let Some(y) = before {
            self.set_line(i - 1, Line::join(i - 1, y, yi));
        }
        if let Some(y) = after {
            self.set_line(j, Line::join(j, yj, y));
        }
    }

    /// Drops every redundant breakpoint among `pts` and their successors.
    pub fn canonicalize(&mut self, pts: &[i64]) {
        let mut all: Vec<i64> = Vec::with_capacity(pts.len() * 2);
        for &x in pts {
            if self.contains(x) {
                all.push(x);
                all.extend(self.succ(x));
            }
        }
        all.sort_unstable();
        all.dedup();
        for x in all {
            if self.contains(x) && self.redundant(x) {
                self.remove(x);
            }
        }
    }

    pub fn breakpoints(&self) -> impl Iterator<Item = i64> + '_ {
        self.bps.iter().copied()
    }

    pub fn breakpoints_in(&self, i: i64, j: i64) -> Vec<i64> {
        if i > j {
            return Vec::new();
        }
        self.bps.range(i..=j).copied().collect()
    }

    /// `(x, y, slope)` for every breakpoint.
    pub fn points(&self) -> Vec<(i64, Value, Value)> {
        let a = self.alpha.iter();
        let b = self.beta.iter();
        a.into_iter()
            .zip(b)
            .map(|((x, a), (_, b))| (x, Line { a, b }.at(x), a))
            .collect()
    }

    pub fn values(&self) -> Vec<Value> {
        let mut out = Vec::with_capacity((self.hi - self.lo + 1) as usize);
        let a = self.alpha.iter();
        let b = self.beta.iter();
        let pts: Vec<(i64, Line)> = a.into_iter().zip(b).map(|((x, a), (_, b))| (x, Line { a, b })).collect();
        for (k, &(x, l)) in pts.iter().enumerate() {
            let end = pts.get(k + 1).map_or(self.hi + 1, |p| p.0);
            for t in x..end {
                out.push(l.at(t));
            }
        }
        out
    }

    pub fn audit(&self) -> Result<(), String> {
        self.alpha.audit()?;
        self.beta.audit()?;
        if !self.contains(self.lo) || !self.contains(self.hi) {
            return Err("domain endpoints must be breakpoints".into());
        }
        let keys: Vec<i64> = self.bps.iter().copied().collect();
        let ak: Vec<i64> = self.alpha.iter().into_iter().map(|p| p.0).collect();
        let bk: Vec<i64> = self.beta.iter().into_iter().map(|p| p.0).collect();
        if ak != keys || bk != keys {
            return Err("slope or intercept keys differ from the breakpoints".into());
        }
        for w in keys.windows(2) {
            let (x, s) = (w[0], w[1]);
            if self.line(x).at(s) != self.line(s).at(s) {
                return Err(format!("discontinuity between {x} and {s}"));
            }
        }
        Ok(())
    }
}

/// Callbacks for an engine that keeps extra state around a [`Pwl`].
pub(crate) trait RayHost {
    fn pwl(&mut self) -> &mut Pwl;
    /// Runs before a ray from `o` reads any line.
    fn before_ray(&mut self, _o: i64, _forward: bool) {}
    /// Runs before the ray removes breakpoint `w`.
    fn before_delete(&mut self, _w: i64, _forward: bool) {}
    /// Runs after the ray removed breakpoint `w`.
    fn after_delete(&mut self, _w: i64) {}
}

#[derive(Clone, Debug, Default)]
pub(crate) struct RayOutcome {
    pub shot: bool,
    /// Breakpoints whose own or incoming segment changed.
    pub touched: Vec<i64>,
    /// The breakpoint farthest from the origin that the ray changed.
    pub end: i64,
    pub hit_limit: bool,
}

impl RayOutcome {
    fn idle(o: i64) -> Self {
        RayOutcome {
            end: o,
            ..Default::default()
        }
    }
}

/// Replaces `A[x]` by `min(A[x], A[o] + s * (x - o))` for `x` in `(o, lim]`,
/// assuming the ray does not dip below the array again once it crosses it.
pub(crate) fn forward_ray<H: RayHost>(h: &mut H, o: i64, s: Value, lim: i64, hooks: bool) -> RayOutcome {
    debug_assert!(o < lim);
    if hooks {
        h.before_ray(o, true);
    }
    let p = h.pwl();
    let mut cur = p.line(o);
    if cur.a <= s {
        return RayOutcome::idle(o);
    }
    let ray = Line { a: s, b: cur.at(o) - s * o as Value };
    let mut touched = vec![o];
    let mut prev = o;
    loop {
        let w = h.pwl().succ(prev).expect("the limit is a breakpoint");
        debug_assert!(w <= lim);
        let yw = cur.at(w);
        let rw = ray.at(w);
        if yw >= rw && w == lim {
            let p = h.pwl();
            if lim < p.hi {
                if p.ensure(lim + 1) {
                    touched.push(lim + 1);
                }
                let next = p.value(lim + 1);
                p.set_line(lim, Line::join(lim, rw, next));
                touched.push(lim + 1);
            } else {
                p.set_line(lim, ray);
            }
            p.set_line(o, ray);
            touched.push(lim);
            return RayOutcome {
                shot: true,
                touched,
                end: lim,
                hit_limit: true,
            };
        }
        if yw >= rw {
            if hooks {
                h.before_delete(w, true);
            }
            let p = h.pwl();
            cur = p.line(w);
            p.remove(w);
            h.after_delete(w);
            prev = w;
            continue;
        }
        // The array crosses the ray between `prev` and `w`.
        let p = h.pwl();
        let num = cur.b - ray.b;
        let den = s - cur.a;
        debug_assert!(den > 0);
        let end = if num % den == 0 {
            let xs = (num / den) as i64;
            p.insert(xs, cur);
            touched.push(xs);
            xs
        } else {
            let x1 = num.div_euclid(den) as i64;
            let x2 = x1 + 1;
            p.insert(x1, Line::join(x1, ray.at(x1), cur.at(x2)));
            if x2 != w {
                p.insert(x2, cur);
            }
            touched.push(x1);
            touched.push(x2);
            x1
        };
        touched.push(w);
        p.set_line(o, ray);
        return RayOutcome {
            shot: true,
            touched,
            end,
            hit_limit: false,
        };
    }
}

/// Replaces `A[x]` by `min(A[x], A[o] + s * (o - x))` for `x` in `[lim, o)`.
pub(crate) fn backward_ray<H: RayHost>(h: &mut H, o: i64, s: Value, lim: i64, hooks: bool) -> RayOutcome {
    debug_assert!(lim < o);
    if hooks {
        h.before_ray(o, false);
    }
    let p = h.pwl();
    if p.slope_in(o) >= -s {
        return RayOutcome::idle(o);
    }
    let ray = Line { a: -s, b: p.value(o) + s * o as Value };
    let mut touched = vec![o];
    let mut nxt = o;
    loop {
        let p = h.pwl();
        let w = p.pred(nxt).expect("the limit is a breakpoint");
        debug_assert!(w >= lim);
        let lw = p.line(w);
        let yw = lw.at(w);
        let rw = ray.at(w);
        if yw >= rw && w == lim {
            p.set_line(lim, ray);
            if lim > p.lo {
                if p.ensure(lim - 1) {
                    touched.push(lim - 1);
                }
                let prev = p.value(lim - 1);
                p.set_line(lim - 1, Line::join(lim - 1, prev, rw));
                touched.push(lim - 1);
            }
            touched.push(lim);
            return RayOutcome {
                shot: true,
                touched,
                end: lim,
                hit_limit: true,
            };
        }
        if yw >= rw {
            if hooks {
                h.before_delete(w, false);
            }
            h.pwl().remove(w);
            h.after_delete(w);
            nxt = w;
            continue;
        }
        // The array crosses the ray between `w` and `nxt`.
        let num = ray.b - lw.b;
        let den = lw.a + s;
        debug_assert!(den > 0);
        let end = if num % den == 0 {
            let xs = (num / den) as i64;
            p.insert(xs, ray);
            touched.push(xs);
            xs
        } else {
            let x1 = num.div_euclid(den) as i64;
            let x2 = x1 + 1;
            let conn = Line::join(x1, lw.at(x1), ray.at(x2));
            if x1 > w {
                p.insert(x1, conn);
            } else {
                p.set_line(w, conn);
            }
            p.insert(x2, ray);
            touched.push(x1);
            touched.push(x2);
            x1
        };
        return RayOutcome {
            shot: true,
            touched,
            end,
            hit_limit: false,
        };
    }
}
