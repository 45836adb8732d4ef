// SPDX-License-Identifier: MIT OR Apache-2.0

//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. Pass criterion numbers as arguments to
//! run a subset, e.g. `cargo test --test acceptance -- 2 7`.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rledtw_core::add_min::AddMinSet;
use rledtw_core::dtw::{block_params, run, BlockParams, FrontierObserver, Order, Phase};
use rledtw_core::engine::EngineStats;
use rledtw_core::gen::{
    random_domain, random_instance, random_matrix, random_op, random_string_fixed, Instance, InstanceBounds,
};
use rledtw_core::interval_add::IntervalAddSet;
use rledtw_core::oracle::{block_dtw, block_dtw_counted, naive_dtw, naive_table, DenseArray, DpTable, BLOCK_WORK_LIMIT};
use rledtw_core::{dtw, LazyEngine, RangeEngine, RangeOp, Value, WarmupEngine};

type Outcome = Result<String, String>;

fn instances(seed: u64, count: usize) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let b = InstanceBounds::default();
    (0..count).map(|_| random_instance(&mut rng, &b)).collect()
}

fn dtw_equivalence() -> Outcome {
    let cases = instances(1, 1000);
    let mut zero_diag = 0;
    for (n, inst) in cases.iter().enumerate() {
        let fast = dtw(&inst.s, &inst.t, &inst.cost).map_err(|e| e.to_string())?;
        let block = block_dtw(&inst.s, &inst.t, &inst.cost).map_err(|e| e.to_string())?;
        let naive = naive_dtw(&inst.s, &inst.t, &inst.cost).map_err(|e| e.to_string())?;
        if fast != block || fast != naive {
            return Err(format!(
                "case {n}: fast {fast:?} block {block:?} naive {naive:?} on {}",
                inst.describe()
            ));
        }
        if let rledtw_core::CostFn::Matrix(rows) = &inst.cost {
            zero_diag += rows.iter().enumerate().all(|(k, r)| r[k] == 0) as usize;
        }
    }
    Ok(format!("{} instances agree, {zero_diag} with a zero diagonal", cases.len()))
}

#[derive(Default)]
struct EngineTally {
    sequences: u64,
    ops: u64,
    audits: u64,
    lazy: EngineStats,
    warm: EngineStats,
    failure: Option<String>,
}

fn add_stats(acc: &mut EngineStats, s: &EngineStats) {
    acc.ops += s.ops;
    acc.rays += s.rays;
    acc.long_rays += s.long_rays;
    acc.checked_rays += s.checked_rays;
    acc.bad_origins += s.bad_origins;
    acc.long_ray_misses += s.long_ray_misses;
    acc.stray_actives += s.stray_actives;
    acc.flush_escapes += s.flush_escapes;
    acc.flushes += s.flushes;
}

/// Runs the engine suites once; criteria 2 and 5 both read the tally.
fn engine_suites() -> EngineTally {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut tally = EngineTally::default();
    for seq in 0..10_000 {
        let (lo, hi) = random_domain(&mut rng, 500);
        let len = rng.gen_range(1..=200);
        let ops: Vec<RangeOp> = (0..len).map(|_| random_op(&mut rng, lo, hi)).collect();
        let mut brute = DenseArray::zeros(lo, hi);
        let mut warm = WarmupEngine::instrumented(lo, hi).unwrap();
        let mut lazy = LazyEngine::instrumented(lo, hi).unwrap();
        for (n, op) in ops.iter().enumerate() {
            brute.apply_brute(op).unwrap();
            warm.apply(op).unwrap();
            lazy.apply(op).unwrap();
            let ctx = || format!("sequence {seq} op {n} {op} on [{lo}, {hi}]");
            let problem = if warm.snapshot() != brute.values() {
                Some("warmup values differ".to_string())
            } else if lazy.snapshot() != brute.values() {
                Some("lazy values differ".to_string())
            } else if let Err(e) = lazy.audit() {
                Some(format!("lazy audit: {e}"))
            } else if let Err(e) = warm.audit() {
                Some(format!("warmup audit: {e}"))
            } else {
                None
            };
            tally.audits += 2;
            if let Some(p) = problem {
                tally.failure = Some(format!("{p} after {}", ctx()));
                return tally;
            }
        }
        for k in lo..=hi {
            if lazy.lookup(k).unwrap() != brute.get(k) {
                tally.failure = Some(format!("lookup {k} differs in sequence {seq}"));
                return tally;
            }
        }
        tally.sequences += 1;
        tally.ops += ops.len() as u64;
        add_stats(&mut tally.lazy, &lazy.stats());
        add_stats(&mut tally.warm, &warm.stats());
    }
    tally
}

fn engine_conformance(t: &EngineTally) -> Outcome {
    if let Some(f) = &t.failure {
        return Err(f.clone());
    }
    Ok(format!("{} sequences, {} operations, full arrays equal after each", t.sequences, t.ops))
}

fn lazy_invariants(t: &EngineTally) -> Outcome {
    if let Some(f) = &t.failure {
        return Err(f.clone());
    }
    let (l, w) = (&t.lazy, &t.warm);
    let bad = l.bad_origins + w.bad_origins;
    let misses = l.long_ray_misses;
    let stray = l.stray_actives + w.stray_actives;
    let escapes = l.flush_escapes;
    let detail = format!(
        "{} audits; rays checked lazy {} warmup {}; long rays {}; bad origins {bad}; long-ray misses {misses}; stray actives {stray}; flush escapes {escapes}",
        t.audits, l.checked_rays, w.checked_rays, l.long_rays
    );
    if bad + misses + stray + escapes > 0 || l.checked_rays == 0 || w.checked_rays == 0 || l.long_rays == 0 {
        return Err(detail);
    }
    Ok(detail)
}

fn add_min_conformance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut ops_total = 0u64;
    let mut max_levels = 0;
    for seq in 0..10_000 {
        let leaf = [2usize, 3, 4, 8, 64][rng.gen_range(0..5)];
        let range: i64 = rng.gen_range(4..=200);
        let len = rng.gen_range(1..=300);
        let mut s = AddMinSet::with_leaf(leaf);
        let mut m: BTreeMap<i64, Value> = BTreeMap::new();
        for n in 0..len {
            let x = rng.gen_range(0..range);
            let y = rng.gen_range(0..range);
            let (i, j) = (x.min(y), x.max(y));
            let c: Value = rng.gen_range(-50..=50);
            let desc;
            let ok = match rng.gen_range(0..10) {
                0..=2 => {
                    desc = format!("insert {x} {c}");
                    let ok = s.insert(x, c).is_ok() == !m.contains_key(&x);
                    m.entry(x).or_insert(c);
                    ok
                }
                3 | 4 => {
                    desc = format!("remove {x}");
                    s.remove(x) == m.remove(&x).is_some()
                }
                5 => {
                    desc = format!("lookup {x}");
                    s.lookup(x) == m.get(&x).copied()
                }
                6 | 7 => {
                    let c = c / 5;
                    desc = format!("add [{i}, {j}] {c}");
                    for (_, v) in m.range_mut(i..=j) {
                        *v += c;
                    }
                    s.add_to_range(i, j, c).is_ok()
                }
                _ => {
                    desc = format!("min [{i}, {j}] {c}");
                    for (_, v) in m.range_mut(i..=j) {
                        *v = (*v).min(c);
                    }
                    s.min_range(i, j, c).is_ok()
                }
            };
            let ctx = || format!("sequence {seq} op {n} ({desc}), leaf {leaf}");
            if !ok {
                return Err(format!("result differs at {}", ctx()));
            }
            s.audit().map_err(|e| format!("audit: {e} at {}", ctx()))?;
            if s.iter() != m.iter().map(|(&k, &v)| (k, v)).collect::<Vec<_>>() {
                return Err(format!("contents differ at {}", ctx()));
            }
            max_levels = max_levels.max(s.levels());
        }
        ops_total += len as u64;
    }
    Ok(format!("10000 sequences, {ops_total} operations, up to {max_levels} levels"))
}

fn interval_add_conformance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut ops_total = 0u64;
    let mut hits = 0u64;
    for seq in 0..10_000 {
        let range: i64 = rng.gen_range(2..=150);
        let len = rng.gen_range(1..=300);
        let mut s = IntervalAddSet::new();
        let mut m: BTreeMap<i64, Value> = BTreeMap::new();
        for n in 0..len {
            let x = rng.gen_range(-1..=range);
            let y = rng.gen_range(-1..=range);
            let (i, j) = (x.min(y), x.max(y));
            let c: Value = rng.gen_range(-40..=40);
            let ok = match rng.gen_range(0..6) {
                0 => {
                    let ok = s.insert(x, c).is_ok() == !m.contains_key(&x);
                    m.entry(x).or_insert(c);
                    ok
                }
                1 => s.remove(x) == m.remove(&x).is_some(),
                2 => s.lookup(x) == m.get(&x).copied(),
                3 => {
                    for (_, v) in m.range_mut(i..=j) {
                        *v += c / 4;
                    }
                    s.add_to_range(i, j, c / 4).is_ok()
                }
                4 => {
                    let want = m.range(x + 1..).find(|(_, &v)| v > c).map(|(&k, &v)| (k, v));
                    hits += want.is_some() as u64;
                    s.next_gt(x, c) == want
                }
                _ => {
                    let want = m.range(..x).rev().find(|(_, &v)| v < c).map(|(&k, &v)| (k, v));
                    hits += want.is_some() as u64;
                    s.prev_lt(x, c) == want
                }
            };
            if !ok {
                return Err(format!("result differs at sequence {seq} op {n}"));
            }
            s.audit().map_err(|e| format!("audit: {e} at sequence {seq} op {n}"))?;
        }
        if s.iter() != m.into_iter().collect::<Vec<_>>() {
            return Err(format!("contents differ after sequence {seq}"));
        }
        ops_total += len as u64;
    }
    Ok(format!("10000 sequences, {ops_total} operations, {hits} successful searches"))
}

fn block_cells(inst: &Instance) -> Vec<BlockParams> {
    let mut out = Vec::new();
    for i in 1..=inst.s.num_runs() {
        for j in 1..=inst.t.num_runs() {
            out.push(block_params(&inst.s, &inst.t, &inst.cost, i, j).unwrap());
        }
    }
    out
}

fn dp_structure() -> Outcome {
    let mut cells = 0u64;
    for (n, inst) in instances(6, 200).iter().enumerate() {
        let tab = naive_table(&inst.s, &inst.t, &inst.cost, u128::MAX).map_err(|e| e.to_string())?;
        for p in block_cells(inst) {
            for x in p.i1..=p.i2 {
                for y in p.j1..=p.j2 {
                    let v = tab.get(x, y);
                    if y < p.j2 && v > tab.get(x, y + 1) {
                        return Err(format!("row falls at ({x}, {y}) in case {n}: {}", inst.describe()));
                    }
                    if x < p.i2 && v > tab.get(x + 1, y) {
                        return Err(format!("column falls at ({x}, {y}) in case {n}: {}", inst.describe()));
                    }
                    let (x0, y0) = p.input_vertex(y as i64 - x as i64);
                    if v != tab.get(x0, y0) + p.c * (x - x0) as Value {
                        return Err(format!("diagonal claim fails at ({x}, {y}) in case {n}: {}", inst.describe()));
                    }
                    cells += 1;
                }
            }
        }
    }
    Ok(format!("200 instances, {cells} cells checked"))
}

fn best_of<T>(reps: usize, mut f: impl FnMut() -> T) -> (Duration, T) {
    let mut best: Option<(Duration, T)> = None;
    for _ in 0..reps {
        let st = Instant::now();
        let out = f();
        let el = st.elapsed();
        if best.as_ref().is_none_or(|(d, _)| el < *d) {
            best = Some((el, out));
        }
    }
    best.unwrap()
}

fn scaling() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut rows = Vec::new();
    for (n, reps) in [(64usize, 3usize), (128, 3), (256, 2), (512, 2)] {
        let s = random_string_fixed(&mut rng, 4, n, 100);
        let t = random_string_fixed(&mut rng, 4, n, 100);
        let f = random_matrix(&mut rng, 4, 9, true);
        let (time, r) = best_of(reps, || run::<LazyEngine>(&s, &t, &f, Order::RowMajor, None).unwrap());
        let (block, work) = block_dtw_counted(&s, &t, &f, BLOCK_WORK_LIMIT).map_err(|e| e.to_string())?;
        if block != r.distance {
            return Err(format!("n = {n}: fast {:?} block {block:?}", r.distance));
        }
        let (ins, ops) = (r.engine.breakpoints_inserted, r.engine.ops);
        if ins > 20 * ops {
            return Err(format!("n = {n}: {ins} breakpoints inserted over {ops} operations"));
        }
        rows.push((n, time, work, ins as f64 / ops as f64));
    }
    let mut detail = Vec::new();
    let mut ok = true;
    for w in rows.windows(2) {
        let tr = w[1].1.as_secs_f64() / w[0].1.as_secs_f64();
        let wr = w[1].2 as f64 / w[0].2 as f64;
        ok &= tr <= 5.5 && wr >= 3.9;
        detail.push(format!("{}->{}: time x{tr:.2} block work x{wr:.2}", w[0].0, w[1].0));
    }
    let times: Vec<String> = rows
        .iter()
        .map(|r| format!("n={} {:.2}s {:.2} bp/op", r.0, r.1.as_secs_f64(), r.3))
        .collect();
    let detail = format!("{}; {}", times.join(", "), detail.join(", "));
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Checks every frontier snapshot against the table. Each diagonal holds the
/// distance of the vertex it currently stands for; a vertex the table marks
/// unreachable must read at least the sentinel.
struct FrontierCheck<'a> {
    tab: &'a DpTable,
    big_n: i64,
    current: Vec<(u64, u64)>,
    unreached_checks: u64,
    error: Option<String>,
}

impl FrontierObserver for FrontierCheck<'_> {
    fn observe(&mut self, phase: Phase, p: &BlockParams, frontier: &[Value]) {
        if self.error.is_some() {
            return;
        }
        if phase == Phase::Output {
            for d in p.a..=p.b {
                self.current[(d + self.big_n) as usize] = p.output_vertex(d);
            }
        }
        for (idx, &v) in frontier.iter().enumerate() {
            let d = idx as i64 - self.big_n;
            let (x, y) = if phase == Phase::Input && p.a <= d && d <= p.b {
                p.input_vertex(d)
            } else {
                self.current[idx]
            };
            let want = self.tab.get(x, y);
            let good = if want >= self.tab.inf() {
                self.unreached_checks += 1;
                v >= self.tab.inf()
            } else {
                v == want
            };
            if !good {
                self.error = Some(format!("{phase:?} of block at ({}, {}): diagonal {d} holds {v}, vertex ({x}, {y}) has {want}", p.i1, p.j1));
                return;
            }
        }
    }
}

fn sentinel_soundness() -> Outcome {
    let mut unreached = 0;
    for (n, inst) in instances(1, 50).iter().enumerate() {
        let tab = naive_table(&inst.s, &inst.t, &inst.cost, u128::MAX).map_err(|e| e.to_string())?;
        let big_n = inst.s.expanded_len() as i64;
        let big_m = inst.t.expanded_len() as i64;
        let current = (-big_n..=big_m).map(|d| ((-d).max(0) as u64, d.max(0) as u64)).collect();
        let mut obs = FrontierCheck {
            tab: &tab,
            big_n,
            current,
            unreached_checks: 0,
            error: None,
        };
        let r = run::<LazyEngine>(&inst.s, &inst.t, &inst.cost, Order::RowMajor, Some(&mut obs))
            .map_err(|e| e.to_string())?;
        if let Some(e) = obs.error {
            return Err(format!("case {n}: {e}; {}", inst.describe()));
        }
        if r.inf != tab.inf() {
            return Err(format!("case {n}: sentinels differ"));
        }
        unreached += obs.unreached_checks;
    }
    Ok(format!("50 instances, {unreached} unreached diagonal readings all at or above the sentinel"))
}

fn main() {
    let wanted: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let want = |k: u32| wanted.is_empty() || wanted.contains(&k);
    let mut failed = 0;
    let mut report = |k: u32, name: &str, out: Outcome, took: Duration| {
        let secs = took.as_secs_f64();
        match out {
            Ok(d) => println!("criterion {k} ({name}): PASS [{secs:.1}s] {d}"),
            Err(d) => {
                failed += 1;
                println!("criterion {k} ({name}): FAIL [{secs:.1}s] {d}");
            }
        }
    };
    let timed = |f: &dyn Fn() -> Outcome| {
        let st = Instant::now();
        let out = f();
        (out, st.elapsed())
    };

    if want(1) {
        let (o, t) = timed(&dtw_equivalence);
        report(1, "dtw equivalence", o, t);
    }
    if want(2) || want(5) {
        let st = Instant::now();
        let tally = engine_suites();
        let took = st.elapsed();
        if want(2) {
            report(2, "range engine conformance", engine_conformance(&tally), took);
        }
        if want(5) {
            report(5, "lazy engine invariants", lazy_invariants(&tally), took);
        }
    }
    if want(3) {
        let (o, t) = timed(&add_min_conformance);
        report(3, "add-min conformance", o, t);
    }
    if want(4) {
        let (o, t) = timed(&interval_add_conformance);
        report(4, "interval-add conformance", o, t);
    }
    if want(6) {
        let (o, t) = timed(&dp_structure);
        report(6, "dp monotonicity and diagonals", o, t);
    }
    if want(7) {
        let (o, t) = timed(&scaling);
        report(7, "scaling", o, t);
    }
    if want(8) {
        let (o, t) = timed(&sentinel_soundness);
        report(8, "sentinel soundness", o, t);
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
