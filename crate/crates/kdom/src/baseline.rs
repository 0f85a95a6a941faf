//! Reference schemes for benchmarking: the naive full-scan pipeline and a
//! CI-style scheme that filters through sorted tables of product keys
//! (products of the k smallest and k largest normalized values).

use std::collections::HashMap;

use crate::core::dominance::k_dominates;
use crate::core::item::{SortedProfile, UncertainItem};
use crate::core::probability::{apply_arrival, apply_departure};
use crate::core::window::SlidingWindow;
use crate::core::ScanReport;

pub fn naive_departure_pass(
    window: &mut SlidingWindow,
    departed: &UncertainItem,
    k: usize,
) -> ScanReport {
    let mut rep = ScanReport::default();
    let ids: Vec<u64> = window.ids().collect();
    for id in ids {
        rep.inspected.push(id);
        let e = window.get_mut(id).expect("window id");
        if apply_departure(e, departed, k) {
            rep.updates += 1;
        }
    }
    rep
}

pub fn naive_arrival_pass(
    window: &mut SlidingWindow,
    arrived: &UncertainItem,
    k: usize,
) -> ScanReport {
    let mut rep = ScanReport::default();
    let ids: Vec<u64> = window.ids().collect();
    for id in ids {
        rep.inspected.push(id);
        let e = window.get_mut(id).expect("window id");
        if apply_arrival(e, arrived, k) {
            rep.updates += 1;
        }
    }
    rep
}

/// Full-scan dominator product for the arriving item; multiply by `P(u_new)`
/// for the full value.
pub fn naive_calculate(
    window: &SlidingWindow,
    arrived: &UncertainItem,
    k: usize,
) -> (f64, ScanReport) {
    let mut rep = ScanReport::default();
    let mut partial = 1.0;
    for e in window.entries() {
        rep.inspected.push(e.item.id);
        if k_dominates(&e.item, arrived, k) {
            partial *= 1.0 - e.item.prob;
        }
    }
    (partial, rep)
}

/// Product keys of one item: products of its k smallest and k largest
/// normalized values. Factors are floored at a small epsilon so that exact
/// zeros do not collapse the key ordering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CiKeyRecord {
    pub item_id: u64,
    pub key_min: f64,
    pub key_max: f64,
}

pub fn ci_keys(profile: &SortedProfile, k: usize, eps: f64) -> CiKeyRecord {
    let v = &profile.sorted_values;
    let d = v.len();
    assert!(k >= 1 && k <= d);
    let key_min: f64 = v[..k].iter().map(|x| x.max(eps)).product();
    let key_max: f64 = v[d - k..].iter().map(|x| x.max(eps)).product();
    CiKeyRecord {
        item_id: profile.item_id,
        key_min,
        key_max,
    }
}

/// Sorted product-key tables mirroring the middle-index table mechanic:
/// ids by `key_max` descending and by `key_min` ascending, ties by id.
#[derive(Debug, Clone)]
pub struct CiTable {
    k: usize,
    eps: f64,
    records: HashMap<u64, CiKeyRecord>,
    by_max: Vec<(f64, u64)>,
    by_min: Vec<(f64, u64)>,
}

impl CiTable {
    pub fn new(k: usize, eps: f64) -> Self {
        Self {
            k,
            eps,
            records: HashMap::new(),
            by_max: Vec::new(),
            by_min: Vec::new(),
        }
    }

    pub fn keys_for(&self, profile: &SortedProfile) -> CiKeyRecord {
        ci_keys(profile, self.k, self.eps)
    }

    pub fn len(&self) -> usize {
        self.by_max.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_max.is_empty()
    }

    pub fn insert(&mut self, profile: &SortedProfile) {
        let rec = self.keys_for(profile);
        let id = rec.item_id;
        assert!(
            self.records.insert(id, rec).is_none(),
            "duplicate id {id} in CI table"
        );
        let at = self
            .by_max
            .partition_point(|&(key, i)| key > rec.key_max || (key == rec.key_max && i < id));
        self.by_max.insert(at, (rec.key_max, id));
        let at = self
            .by_min
            .partition_point(|&(key, i)| key < rec.key_min || (key == rec.key_min && i < id));
        self.by_min.insert(at, (rec.key_min, id));
    }

    pub fn remove(&mut self, id: u64) {
        if self.records.remove(&id).is_some() {
            if let Some(i) = self.by_max.iter().position(|&(_, x)| x == id) {
                self.by_max.remove(i);
            }
            if let Some(i) = self.by_min.iter().position(|&(_, x)| x == id) {
                self.by_min.remove(i);
            }
        }
    }

    pub fn by_max(&self) -> &[(f64, u64)] {
        &self.by_max
    }

    pub fn by_min(&self) -> &[(f64, u64)] {
        &self.by_min
    }
}

/// Departure pass with the product-key filter: scans `by_max` descending and
/// breaks once `key_min(probe) > key_max(e)`, which soundly proves the probe
/// cannot k-dominate that entry or any later one.
pub fn ci_departure_pass(
    window: &mut SlidingWindow,
    table: &CiTable,
    departed: &UncertainItem,
    departed_profile: &SortedProfile,
    k: usize,
) -> ScanReport {
    let probe = table.keys_for(departed_profile);
    let mut rep = ScanReport::default();
    for &(e_max, id) in table.by_max() {
        if probe.key_min > e_max {
            rep.broke_at = Some(id);
            break;
        }
        rep.inspected.push(id);
        let e = window.get_mut(id).expect("CI table id missing from window");
        if apply_departure(e, departed, k) {
            rep.updates += 1;
        }
    }
    rep
}

pub fn ci_arrival_pass(
    window: &mut SlidingWindow,
    table: &CiTable,
    arrived: &UncertainItem,
    arrived_profile: &SortedProfile,
    k: usize,
) -> ScanReport {
    let probe = table.keys_for(arrived_profile);
    let mut rep = ScanReport::default();
    for &(e_max, id) in table.by_max() {
        if probe.key_min > e_max {
            rep.broke_at = Some(id);
            break;
        }
        rep.inspected.push(id);
        let e = window.get_mut(id).expect("CI table id missing from window");
        if apply_arrival(e, arrived, k) {
            rep.updates += 1;
        }
    }
    rep
}

/// Dominator product for the arriving item via the `by_min` scan; multiply
/// by `P(u_new)` for the full value.
pub fn ci_calculate(
    window: &SlidingWindow,
    table: &CiTable,
    arrived: &UncertainItem,
    arrived_profile: &SortedProfile,
    k: usize,
) -> (f64, ScanReport) {
    let probe = table.keys_for(arrived_profile);
    let mut rep = ScanReport::default();
    let mut partial = 1.0;
    for &(e_min, id) in table.by_min() {
        if e_min > probe.key_max {
            rep.broke_at = Some(id);
            break;
        }
        rep.inspected.push(id);
        let e = window.get(id).expect("CI table id missing from window");
        if k_dominates(&e.item, arrived, k) {
            partial *= 1.0 - e.item.prob;
        }
    }
    (partial, rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::item::{normalize_and_sort, NormalizationSpec};
    use rand::{Rng, SeedableRng};

    const EPS: f64 = 1e-6;

    fn profiled(id: u64, values: &[f64]) -> (UncertainItem, SortedProfile) {
        let item = UncertainItem::new(id, values.to_vec(), 0.5).unwrap();
        let profile = normalize_and_sort(&item, &NormalizationSpec::unit(values.len()));
        (item, profile)
    }

    #[test]
    fn key_min_never_exceeds_key_max() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..2_000 {
            let d = rng.random_range(2..10);
            let k = rng.random_range(1..=d);
            let values: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..1.0)).collect();
            let (_, profile) = profiled(1, &values);
            let rec = ci_keys(&profile, k, EPS);
            assert!(rec.key_min <= rec.key_max);
        }
    }

    #[test]
    fn k_equals_d_uses_the_same_factor_multiset() {
        let (_, profile) = profiled(1, &[0.2, 0.9, 0.4, 0.6]);
        let rec = ci_keys(&profile, 4, EPS);
        assert_eq!(rec.key_min, rec.key_max);
    }

    #[test]
    fn zero_key_min_probe_excludes_nothing() {
        // A probe whose k smallest values floor to eps^k has the smallest
        // possible key; the strict > comparison never fires against real keys.
        let (_, zero_profile) = profiled(1, &[0.0, 0.0, 0.5, 0.5]);
        let probe = ci_keys(&zero_profile, 2, EPS);
        let (_, other) = profiled(2, &[0.1, 0.2, 0.3, 0.4]);
        let rec = ci_keys(&other, 2, EPS);
        assert!(probe.key_min <= rec.key_max);
    }

    #[test]
    fn product_key_filter_is_sound() {
        // If q k-dominates p then the product of q's k smallest values is at
        // most the product of p's k largest, so key_min(q) > key_max(p) is a
        // sound exclusion. Fuzzed here over ties and floored zeros.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        let mut fired = 0u32;
        for _ in 0..50_000 {
            let d = *[4usize, 8].get(rng.random_range(0..2)).unwrap();
            let k = rng.random_range(1..=d);
            let values = |rng: &mut rand_chacha::ChaCha8Rng| {
                (0..d)
                    .map(|_| (rng.random_range(0..5) as f64) / 4.0)
                    .collect::<Vec<f64>>()
            };
            let (q_item, q_profile) = profiled(1, &values(&mut rng));
            let (p_item, p_profile) = profiled(2, &values(&mut rng));
            let q = ci_keys(&q_profile, k, EPS);
            let p = ci_keys(&p_profile, k, EPS);
            if q.key_min > p.key_max {
                fired += 1;
                assert!(
                    !k_dominates(&q_item, &p_item, k),
                    "CI filter excluded a dominating pair"
                );
            }
        }
        assert!(fired > 0);
    }

    #[test]
    fn table_scan_orderings() {
        let mut table = CiTable::new(2, EPS);
        let (_, a) = profiled(1, &[0.9, 0.9, 0.9, 0.9]);
        let (_, b) = profiled(2, &[0.1, 0.1, 0.9, 0.9]);
        let (_, c) = profiled(3, &[0.5, 0.5, 0.5, 0.5]);
        table.insert(&a);
        table.insert(&b);
        table.insert(&c);
        let max_ids: Vec<u64> = table.by_max().iter().map(|&(_, id)| id).collect();
        assert_eq!(max_ids, vec![1, 2, 3]); // 0.81, 0.81 (tie by id), 0.25
        let min_ids: Vec<u64> = table.by_min().iter().map(|&(_, id)| id).collect();
        assert_eq!(min_ids, vec![2, 3, 1]); // 0.01, 0.25, 0.81
        table.remove(2);
        assert_eq!(table.len(), 2);
    }
}
