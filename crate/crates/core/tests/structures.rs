// SPDX-License-Identifier: MIT OR Apache-2.0

use std::collections::BTreeMap;

use proptest::prelude::*;
use rledtw_core::add_min::{AddMinSet, INF};
use rledtw_core::interval_add::IntervalAddSet;
use rledtw_core::Value;

#[test]
fn add_min_documented_examples() {
    let mut s = AddMinSet::new();
    s.insert(2, 8).unwrap();
    s.min_range(1, 3, 5).unwrap();
    assert_eq!(s.lookup(2), Some(5));

    let mut s = AddMinSet::new();
    for (x, y) in [(1, 4), (2, 9), (5, 3)] {
        s.insert(x, y).unwrap();
    }
    s.add_to_range(1, 5, 2).unwrap();
    assert_eq!([s.lookup(1), s.lookup(2), s.lookup(5)], [Some(6), Some(11), Some(5)]);
    s.add_to_range(1, 5, -2).unwrap();
    s.min_range(2, 5, 7).unwrap();
    assert_eq!([s.lookup(1), s.lookup(2), s.lookup(5)], [Some(4), Some(7), Some(3)]);
    s.min_range(1, 5, INF).unwrap();
    s.add_to_range(1, 5, 0).unwrap();
    assert_eq!(s.iter(), vec![(1, 4), (2, 7), (5, 3)]);
    assert!(s.remove(2));
    assert_eq!(s.lookup(2), None);
}

#[test]
fn add_min_remove_between_segments() {
    // Large enough to use the recursive layout once a chmin lands.
    let mut s = AddMinSet::with_leaf(2);
    for x in 0..9 {
        s.insert(x, 10 + x as Value).unwrap();
    }
    s.min_range(0, 8, 12).unwrap();
    s.audit().unwrap();
    for x in [1, 4, 2, 7] {
        assert!(s.remove(x));
        s.audit().unwrap();
    }
    assert_eq!(s.iter(), vec![(0, 10), (3, 12), (5, 12), (6, 12), (8, 12)]);
}

#[derive(Clone, Debug)]
enum Op {
    Insert(i64, i128),
    Remove(i64),
    Add(i64, i64, i128),
    Min(i64, i64, i128),
    Lookup(i64),
}

fn op(range: i64) -> impl Strategy<Value = Op> {
    prop_oneof![
        3 => (0..range, -60i128..60).prop_map(|(x, y)| Op::Insert(x, y)),
        2 => (0..range).prop_map(Op::Remove),
        2 => (0..range, 0..range, -8i128..8).prop_map(|(a, b, c)| Op::Add(a.min(b), a.max(b), c)),
        2 => (0..range, 0..range, -60i128..60).prop_map(|(a, b, c)| Op::Min(a.min(b), a.max(b), c)),
        1 => (0..range).prop_map(Op::Lookup),
    ]
}

proptest! {
    #[test]
    fn add_min_matches_model(leaf in 2usize..10, ops in prop::collection::vec(op(120), 1..300)) {
        let mut s = AddMinSet::with_leaf(leaf);
        let mut m: BTreeMap<i64, Value> = BTreeMap::new();
        for o in ops {
            match o {
                Op::Insert(x, y) => {
                    prop_assert_eq!(s.insert(x, y).is_ok(), !m.contains_key(&x));
                    m.entry(x).or_insert(y);
                }
                Op::Remove(x) => prop_assert_eq!(s.remove(x), m.remove(&x).is_some()),
                Op::Add(i, j, c) => {
                    s.add_to_range(i, j, c).unwrap();
                    m.range_mut(i..=j).for_each(|(_, v)| *v += c);
                }
                Op::Min(i, j, c) => {
                    s.min_range(i, j, c).unwrap();
                    m.range_mut(i..=j).for_each(|(_, v)| *v = (*v).min(c));
                }
                Op::Lookup(x) => prop_assert_eq!(s.lookup(x), m.get(&x).copied()),
            }
            s.audit().map_err(TestCaseError::fail)?;
        }
        prop_assert_eq!(s.iter(), m.into_iter().collect::<Vec<_>>());
    }

    #[test]
    fn interval_add_matches_model(ops in prop::collection::vec(op(80), 1..300), probes in prop::collection::vec((-1i64..81, -80i128..80), 20)) {
        let mut s = IntervalAddSet::new();
        let mut m: BTreeMap<i64, Value> = BTreeMap::new();
        for o in ops {
            match o {
                Op::Insert(x, y) => {
                    prop_assert_eq!(s.insert(x, y).is_ok(), !m.contains_key(&x));
                    m.entry(x).or_insert(y);
                }
                Op::Remove(x) => prop_assert_eq!(s.take(x), m.remove(&x)),
                Op::Add(i, j, c) | Op::Min(i, j, c) => {
                    s.add_to_range(i, j, c).unwrap();
                    m.range_mut(i..=j).for_each(|(_, v)| *v += c);
                }
                Op::Lookup(x) => prop_assert_eq!(s.lookup(x), m.get(&x).copied()),
            }
            s.audit().map_err(TestCaseError::fail)?;
        }
        let pair = |(&k, &v): (&i64, &Value)| (k, v);
        for (x, y) in probes {
            prop_assert_eq!(s.next_gt(x, y), m.range(x + 1..).find(|e| *e.1 > y).map(pair));
            prop_assert_eq!(s.prev_lt(x, y), m.range(..x).rev().find(|e| *e.1 < y).map(pair));
            prop_assert_eq!(s.pred_le(x), m.range(..=x).next_back().map(pair));
            prop_assert_eq!(s.succ_gt(x), m.range(x + 1..).next().map(pair));
            let hi = x + (y.rem_euclid(10)) as i64;
            prop_assert_eq!(s.range(x, hi), m.range(x..=hi).map(pair).collect::<Vec<_>>());
        }
        prop_assert_eq!(s.min_all(), m.values().copied().min());
        prop_assert_eq!(s.len(), m.len());
    }
}
