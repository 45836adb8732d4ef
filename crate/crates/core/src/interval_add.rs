// SPDX-License-Identifier: MIT OR Apache-2.0

//! Ordered point sets with range add on the second coordinate and directional
//! threshold searches.
//!
//! The set is a treap stored in an arena. Every node keeps its value, the
//! minimum and maximum of its subtree, and an additive tag that is still owed
//! to its children. A node's stored numbers are exact once the tags of all its
//! strict ancestors are added, so read-only queries just sum tags on the way
//! down and never restructure the tree.

use std::fmt;

use thiserror::Error;

use crate::rle::Value;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SetError {
    #[error("key {0} is already present")]
    Duplicate(i64),
    #[error("key {0} is not present")]
    Missing(i64),
    #[error("empty range: {i} > {j}")]
    EmptyRange { i: i64, j: i64 },
}

const NIL: u32 = u32::MAX;

#[derive(Clone, Copy, Debug)]
struct Node {
    key: i64,
    val: Value,
    tag: Value,
    mn: Value,
    mx: Value,
    pri: u32,
    l: u32,
    r: u32,
}

#[derive(Clone)]
pub struct IntervalAddSet {
    nodes: Vec<Node>,
    free: Vec<u32>,
    root: u32,
    len: usize,
    rng: u64,
}

impl Default for IntervalAddSet {
    fn default() -> Self {
        Self::new()
    }
}

impl fmt::Debug for IntervalAddSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.iter()).finish()
    }
}

impl IntervalAddSet {
    pub fn new() -> Self {
        Self {
            nodes: Vec::new(),
            free: Vec::new(),
            root: NIL,
            len: 0,
            rng: 0x9e37_79b9_7f4a_7c15,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    fn next_pri(&mut self) -> u32 {
        let mut x = self.rng;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.rng = x;
        (x >> 32) as u32
    }

    fn alloc(&mut self, key: i64, val: Value) -> u32 {
        let pri = self.next_pri();
        let node = Node {
            key,
            val,
            tag: 0,
            mn: val,
            mx: val,
            pri,
            l: NIL,
            r: NIL,
        };
        if let Some(id) = self.free.pop() {
            self.nodes[id as usize] = node;
            id
        } else {
            self.nodes.push(node);
            (self.nodes.len() - 1) as u32
        }
    }

    #[inline]
    fn node(&self, t: u32) -> &Node {
        &self.nodes[t as usize]
    }

    #[inline]
    fn apply(&mut self, t: u32, c: Value) {
        if t != NIL {
            let n = &mut self.nodes[t as usize];
            n.val += c;
            n.mn += c;
            n.mx += c;
            n.tag += c;
        }
    }

    #[inline]
    fn push(&mut self, t: u32) {
        let (tag, l, r) = {
            let n = self.node(t);
            (n.tag, n.l, n.r)
        };
        if tag != 0 {
            self.apply(l, tag);
            self.apply(r, tag);
            self.nodes[t as usize].tag = 0;
        }
    }

    #[inline]
    fn pull(&mut self, t: u32) {
        let (l, r) = (self.node(t).l, self.node(t).r);
        let mut mn = self.node(t).val;
        let mut mx = mn;
        if l != NIL {
            mn = mn.min(self.node(l).mn);
            mx = mx.max(self.node(l).mx);
        }
        if r != NIL {
            mn = mn.min(self.node(r).mn);
            mx = mx.max(self.node(r).mx);
        }
        let n = &mut self.nodes[t as usize];
        n.mn = mn;
        n.mx = mx;
    }

    /// Splits into keys `< k` (or `<= k` when `inclusive`) and the rest.
    fn split(&mut self, t: u32, k: i64, inclusive: bool) -> (u32, u32) {
        if t == NIL {
            return (NIL, NIL);
        }
        self.push(t);
        let key = self.node(t).key;
        let goes_left = if inclusive { key <= k } else { key < k };
        if goes_left {
            let r = self.node(t).r;
            let (a, b) = self.split(r, k, inclusive);
            self.nodes[t as usize].r = a;
            self.pull(t);
            (t, b)
        } else {
            let l = self.node(t).l;
            let (a, b) = self.split(l, k, inclusive);
            self.nodes[t as usize].l = b;
            self.pull(t);
            (a, t)
        }
    }

    fn merge(&mut self, a: u32, b: u32) -> u32 {
        if a == NIL {
            return b;
        }
        if b == NIL {
            return a;
        }
        if self.node(a).pri > self.node(b).pri {
            self.push(a);
            let r = self.node(a).r;
            let m = self.merge(r, b);
            self.nodes[a as usize].r = m;
            self.pull(a);
            a
        } else {
            self.push(b);
            let l = self.node(b).l;
            let m = self.merge(a, l);
            self.nodes[b as usize].l = m;
            self.pull(b);
            b
        }
    }

    /// Semantic value at `x`, if present.
    pub fn lookup(&self, x: i64) -> Option<Value> {
        let mut t = self.root;
        let mut acc = 0;
        while t != NIL {
            let n = self.node(t);
            if x == n.key {
                return Some(n.val + acc);
            }
            acc += n.tag;
            t = if x < n.key { n.l } else { n.r };
        }
        None
    }

    pub fn contains(&self, x: i64) -> bool {
        self.lookup(x).is_some()
    }

    pub fn insert(&mut self, x: i64, y: Value) -> Result<(), SetError> {
        if self.contains(x) {
            return Err(SetError::Duplicate(x));
        }
        let node = self.alloc(x, y);
        self.root = self.insert_rec(self.root, node);
        self.len += 1;
        Ok(())
    }

    fn insert_rec(&mut self, t: u32, node: u32) -> u32 {
        if t == NIL {
            return node;
        }
        self.push(t);
        let key = self.node(node).key;
        if self.node(node).pri > self.node(t).pri {
            let (a, b) = self.split(t, key, false);
            let n = &mut self.nodes[node as usize];
            n.l = a;
            n.r = b;
            self.pull(node);
            return node;
        }
        if key < self.node(t).key {
            let l = self.insert_rec(self.node(t).l, node);
            self.nodes[t as usize].l = l;
        } else {
            let r = self.insert_rec(self.node(t).r, node);
            self.nodes[t as usize].r = r;
        }
        self.pull(t);
        t
    }

    /// Removes `x` and returns its value, if present.
    pub fn take(&mut self, x: i64) -> Option<Value> {
        let v = self.lookup(x)?;
        self.root = self.take_rec(self.root, x);
        self.len -= 1;
        Some(v)
    }

    fn take_rec(&mut self, t: u32, x: i64) -> u32 {
        self.push(t);
        let Node { key, l, r, .. } = *self.node(t);
        if key == x {
            self.free.push(t);
            return self.merge(l, r);
        }
        if x < key {
            let nl = self.take_rec(l, x);
            self.nodes[t as usize].l = nl;
        } else {
            let nr = self.take_rec(r, x);
            self.nodes[t as usize].r = nr;
        }
        self.pull(t);
        t
    }

    /// Removes `x`; returns whether it was present.
    pub fn remove(&mut self, x: i64) -> bool {
        self.take(x).is_some()
    }

    /// Sets the value at `x`, inserting the point if needed.
    pub fn set(&mut self, x: i64, y: Value) {
        if !self.set_rec(self.root, x, y) {
            self.insert(x, y).expect("absent");
        }
    }

    fn set_rec(&mut self, t: u32, x: i64, y: Value) -> bool {
        if t == NIL {
            return false;
        }
        self.push(t);
        let n = self.node(t);
        let found = if x == n.key {
            self.nodes[t as usize].val = y;
            true
        } else {
            let next = if x < n.key { n.l } else { n.r };
            self.set_rec(next, x, y)
        };
        if found {
            self.pull(t);
        }
        found
    }

    /// Adds `c` to every point with key in `[i, j]`.
    pub fn add_to_range(&mut self, i: i64, j: i64, c: Value) -> Result<(), SetError> {
        if i > j {
            return Err(SetError::EmptyRange { i, j });
        }
        if c != 0 {
            self.add_rec(self.root, i, j, c);
        }
        Ok(())
    }

    fn add_rec(&mut self, t: u32, i: i64, j: i64, c: Value) {
        if t == NIL {
            return;
        }
        self.push(t);
        let Node { key, l, r, .. } = *self.node(t);
        if key < i {
            self.add_rec(r, i, j, c);
        } else if key > j {
            self.add_rec(l, i, j, c);
        } else {
            self.nodes[t as usize].val += c;
            self.add_from(l, i, c);
            self.add_upto(r, j, c);
        }
        self.pull(t);
    }

    /// Adds `c` to the keys `>= i` of subtree `t`.
    fn add_from(&mut self, t: u32, i: i64, c: Value) {
        if t == NIL {
            return;
        }
        self.push(t);
        let Node { key, l, r, .. } = *self.node(t);
        if key >= i {
            self.nodes[t as usize].val += c;
            self.apply(r, c);
            self.add_from(l, i, c);
        } else {
            self.add_from(r, i, c);
        }
        self.pull(t);
    }

    /// Adds `c` to the keys `<= j` of subtree `t`.
    fn add_upto(&mut self, t: u32, j: i64, c: Value) {
        if t == NIL {
            return;
        }
        self.push(t);
        let Node { key, l, r, .. } = *self.node(t);
        if key <= j {
            self.nodes[t as usize].val += c;
            self.apply(l, c);
            self.add_upto(r, j, c);
        } else {
            self.add_upto(l, j, c);
        }
        self.pull(t);
    }

    /// The point with the smallest key `> x` among points with value `> y`.
    pub fn next_gt(&self, x: i64, y: Value) -> Option<(i64, Value)> {
        self.next_gt_rec(self.root, 0, x, y)
    }

    fn next_gt_rec(&self, t: u32, acc: Value, x: i64, y: Value) -> Option<(i64, Value)> {
        if t == NIL {
            return None;
        }
        let n = self.node(t);
        if n.mx + acc <= y {
            return None;
        }
        let inner = acc + n.tag;
        if n.key <= x {
            return self.next_gt_rec(n.r, inner, x, y);
        }
        if let Some(hit) = self.next_gt_rec(n.l, inner, x, y) {
            return Some(hit);
        }
        if n.val + acc > y {
            return Some((n.key, n.val + acc));
        }
        self.next_gt_rec(n.r, inner, x, y)
    }

    /// The point with the largest key `< x` among points with value `< y`.
    pub fn prev_lt(&self, x: i64, y: Value) -> Option<(i64, Value)> {
        self.prev_lt_rec(self.root, 0, x, y)
    }

    fn prev_lt_rec(&self, t: u32, acc: Value, x: i64, y: Value) -> Option<(i64, Value)> {
        if t == NIL {
            return None;
        }
        let n = self.node(t);
        if n.mn + acc >= y {
            return None;
        }
        let inner = acc + n.tag;
        if n.key >= x {
            return self.prev_lt_rec(n.l, inner, x, y);
        }
        if let Some(hit) = self.prev_lt_rec(n.r, inner, x, y) {
            return Some(hit);
        }
        if n.val + acc < y {
            return Some((n.key, n.val + acc));
        }
        self.prev_lt_rec(n.l, inner, x, y)
    }

    /// Largest key `<= x` (or `< x` when `strict`).
    fn pred_impl(&self, x: i64, strict: bool) -> Option<(i64, Value)> {
        let mut t = self.root;
        let mut acc = 0;
        let mut best = None;
        while t != NIL {
            let n = self.node(t);
            let ok = if strict { n.key < x } else { n.key <= x };
            if ok {
                best = Some((n.key, n.val + acc));
                acc += n.tag;
                t = n.r;
            } else {
                acc += n.tag;
                t = n.l;
            }
        }
        best
    }

    /// Smallest key `>= x` (or `> x` when `strict`).
    fn succ_impl(&self, x: i64, strict: bool) -> Option<(i64, Value)> {
        let mut t = self.root;
        let mut acc = 0;
        let mut best = None;
        while t != NIL {
            let n = self.node(t);
            let ok = if strict { n.key > x } else { n.key >= x };
            if ok {
                best = Some((n.key, n.val + acc));
                acc += n.tag;
                t = n.l;
            } else {
                acc += n.tag;
                t = n.r;
            }
        }
        best
    }

    pub fn pred_le(&self, x: i64) -> Option<(i64, Value)> {
        self.pred_impl(x, false)
    }

    pub fn pred_lt(&self, x: i64) -> Option<(i64, Value)> {
        self.pred_impl(x, true)
    }

    pub fn succ_ge(&self, x: i64) -> Option<(i64, Value)> {
        self.succ_impl(x, false)
    }

    pub fn succ_gt(&self, x: i64) -> Option<(i64, Value)> {
        self.succ_impl(x, true)
    }

    /// Smallest value, if any.
    pub fn min_all(&self) -> Option<Value> {
        (self.root != NIL).then(|| self.node(self.root).mn)
    }

    pub fn first(&self) -> Option<(i64, Value)> {
        self.succ_impl(i64::MIN, false)
    }

    pub fn last(&self) -> Option<(i64, Value)> {
        self.pred_impl(i64::MAX, false)
    }

    /// All points in key order.
    pub fn iter(&self) -> Vec<(i64, Value)> {
        let mut out = Vec::with_capacity(self.len);
        self.collect(self.root, 0, i64::MIN, i64::MAX, &mut out);
        out
    }

    /// Points with key in `[i, j]`, in key order.
    pub fn range(&self, i: i64, j: i64) -> Vec<(i64, Value)> {
        let mut out = Vec::new();
        if i <= j {
            self.collect(self.root, 0, i, j, &mut out);
        }
        out
    }

    fn collect(&self, t: u32, acc: Value, i: i64, j: i64, out: &mut Vec<(i64, Value)>) {
        if t == NIL {
            return;
        }
        let n = self.node(t);
        let inner = acc + n.tag;
        if n.key > i {
            self.collect(n.l, inner, i, j, out);
        }
        if n.key >= i && n.key <= j {
            out.push((n.key, n.val + acc));
        }
        if n.key < j {
            self.collect(n.r, inner, i, j, out);
        }
    }

    /// Height of the tree (0 when empty).
    pub fn depth(&self) -> usize {
        fn go(s: &IntervalAddSet, t: u32) -> usize {
            if t == NIL {
                0
            } else {
                1 + go(s, s.node(t).l).max(go(s, s.node(t).r))
            }
        }
        go(self, self.root)
    }

    /// Checks key order, heap order and the min/max aggregates.
    pub fn audit(&self) -> Result<(), String> {
        fn go(
            s: &IntervalAddSet,
            t: u32,
            acc: Value,
            lo: Option<i64>,
            hi: Option<i64>,
            count: &mut usize,
        ) -> Result<Option<(Value, Value)>, String> {
            if t == NIL {
                return Ok(None);
            }
            *count += 1;
            let n = s.node(t);
            if lo.is_some_and(|lo| n.key <= lo) || hi.is_some_and(|hi| n.key >= hi) {
                return Err(format!("key {} out of order", n.key));
            }
            for c in [n.l, n.r] {
                if c != NIL && s.node(c).pri > n.pri {
                    return Err(format!("heap order broken below {}", n.key));
                }
            }
            let inner = acc + n.tag;
            let l = go(s, n.l, inner, lo, Some(n.key), count)?;
            let r = go(s, n.r, inner, Some(n.key), hi, count)?;
            let v = n.val + acc;
            let mut mn = v;
            let mut mx = v;
            for (a, b) in [l, r].into_iter().flatten() {
                mn = mn.min(a);
                mx = mx.max(b);
            }
            if mn != n.mn + acc || mx != n.mx + acc {
                return Err(format!("stale aggregate at {}", n.key));
            }
            Ok(Some((mn, mx)))
        }
        let mut count = 0;
        go(self, self.root, 0, None, None, &mut count)?;
        if count != self.len {
            return Err(format!("length {} but {} nodes reachable", self.len, count));
        }
        Ok(())
    }
}
