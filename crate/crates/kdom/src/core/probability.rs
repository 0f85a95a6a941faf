use std::collections::BTreeMap;

use super::dominance::k_dominates;
use super::item::UncertainItem;
use super::window::{SlidingWindow, WindowEntry};

/// The probability of `u` belonging to the k-dominant skyline of the window:
/// `P(u)` times the product of `(1 - P(u'))` over window items `u'` that
/// k-dominate `u`. The empty product leaves `P(u)` unchanged.
pub fn ksky_probability(u: &UncertainItem, window: &SlidingWindow, k: usize) -> f64 {
    let mut p = u.prob;
    for e in window.entries() {
        if e.item.id != u.id && k_dominates(&e.item, u, k) {
            p *= 1.0 - e.item.prob;
        }
    }
    p
}

/// Departure update: if the evicted item k-dominated this entry, its factor
/// is divided back out of the stored product. Returns whether it applied.
pub fn apply_departure(entry: &mut WindowEntry, departed: &UncertainItem, k: usize) -> bool {
    if k_dominates(departed, &entry.item, k) {
        entry.ksky_prob /= 1.0 - departed.prob;
        entry.updates += 1;
        true
    } else {
        false
    }
}

/// Arrival update: if the incoming item k-dominates this entry, its factor
/// is multiplied into the stored product. Returns whether it applied.
pub fn apply_arrival(entry: &mut WindowEntry, arrived: &UncertainItem, k: usize) -> bool {
    if k_dominates(arrived, &entry.item, k) {
        entry.ksky_prob *= 1.0 - arrived.prob;
        entry.updates += 1;
        true
    } else {
        false
    }
}

/// Brute-force oracle: recomputes every entry's probability from scratch via
/// pairwise k-dominance checks, O(n^2 * d). Independent of the incremental
/// update path; every scheme is checked against this.
pub fn oracle_window_probabilities(window: &SlidingWindow, k: usize) -> BTreeMap<u64, f64> {
    let mut out = BTreeMap::new();
    for e in window.entries() {
        let mut p = e.item.prob;
        for other in window.entries() {
            if other.item.id != e.item.id && k_dominates(&other.item, &e.item, k) {
                p *= 1.0 - other.item.prob;
            }
        }
        out.insert(e.item.id, p);
    }
    out
}
