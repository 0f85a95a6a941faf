//! All Indexing: no persistent tables. Each event filters the window through
//! the threshold test at every admissible position pair, then runs exact
//! k-dominance checks only on the survivors.

use crate::core::dominance::k_dominates;
use crate::core::item::{SortedProfile, UncertainItem};
use crate::core::probability::{apply_arrival, apply_departure};
use crate::core::window::SlidingWindow;
use crate::core::ScanReport;
use crate::mi::{mi_thresholds, ThresholdPositions};

/// All admissible position pairs for (d, k): lower position 0..k, upper
/// position lower + (d - k). Exactly k pairs; the last one is (k-1, d-1).
pub fn position_pairs(d: usize, k: usize) -> Vec<ThresholdPositions> {
    (0..k)
        .map(|lo| ThresholdPositions::new(d, k, lo).expect("lo < k is admissible"))
        .collect()
}

fn excluded_as_dominated(
    probe: &SortedProfile,
    entry: &SortedProfile,
    pairs: &[ThresholdPositions],
) -> bool {
    // Threshold test applied per pair: the probe cannot k-dominate the entry if any
    // pair puts the entry's upper threshold below the probe's lower one.
    pairs
        .iter()
        .any(|&pos| mi_thresholds(probe, pos).0 > mi_thresholds(entry, pos).1)
}

fn excluded_as_dominator(
    entry: &SortedProfile,
    arrived: &SortedProfile,
    pairs: &[ThresholdPositions],
) -> bool {
    pairs
        .iter()
        .any(|&pos| mi_thresholds(entry, pos).0 > mi_thresholds(arrived, pos).1)
}

/// Candidate entries that might be k-dominated by the probe (the departed or
/// arriving item). Sound superset: every excluded entry provably is not.
pub fn cal_ait_max(
    probe: &SortedProfile,
    window: &SlidingWindow,
    pairs: &[ThresholdPositions],
) -> Vec<u64> {
    window
        .entries()
        .filter(|e| !excluded_as_dominated(probe, &e.profile, pairs))
        .map(|e| e.item.id)
        .collect()
}

/// Candidate entries that might k-dominate the arriving item.
pub fn cal_ait_min(
    arrived: &SortedProfile,
    window: &SlidingWindow,
    pairs: &[ThresholdPositions],
) -> Vec<u64> {
    window
        .entries()
        .filter(|e| !excluded_as_dominator(&e.profile, arrived, pairs))
        .map(|e| e.item.id)
        .collect()
}

pub fn ai_departure_pass(
    window: &mut SlidingWindow,
    departed: &UncertainItem,
    departed_profile: &SortedProfile,
    k: usize,
    pairs: &[ThresholdPositions],
) -> ScanReport {
    let candidates = cal_ait_max(departed_profile, window, pairs);
    let mut rep = ScanReport::default();
    for id in candidates {
        rep.inspected.push(id);
        let e = window
            .get_mut(id)
            .expect("candidate id missing from window");
        if apply_departure(e, departed, k) {
            rep.updates += 1;
        }
    }
    rep
}

pub fn ai_arrival_pass(
    window: &mut SlidingWindow,
    arrived: &UncertainItem,
    arrived_profile: &SortedProfile,
    k: usize,
    pairs: &[ThresholdPositions],
) -> ScanReport {
    let candidates = cal_ait_max(arrived_profile, window, pairs);
    let mut rep = ScanReport::default();
    for id in candidates {
        rep.inspected.push(id);
        let e = window
            .get_mut(id)
            .expect("candidate id missing from window");
        if apply_arrival(e, arrived, k) {
            rep.updates += 1;
        }
    }
    rep
}

/// Dominator product for the arriving item over the filtered candidate set.
/// Returns the product of `(1 - P(e))` over candidates that k-dominate it;
/// multiply by `P(u_new)` for the full value.
pub fn ai_calculate(
    window: &SlidingWindow,
    arrived: &UncertainItem,
    arrived_profile: &SortedProfile,
    k: usize,
    pairs: &[ThresholdPositions],
) -> (f64, ScanReport) {
    let candidates = cal_ait_min(arrived_profile, window, pairs);
    let mut rep = ScanReport::default();
    let mut partial = 1.0;
    for id in candidates {
        rep.inspected.push(id);
        let e = window.get(id).expect("candidate id missing from window");
        if k_dominates(&e.item, arrived, k) {
            partial *= 1.0 - e.item.prob;
        }
    }
    (partial, rep)
}
