//! Middle Indexing: a fixed pair of threshold positions into each item's
//! sorted profile, two persistent sorted tables keyed on the resulting
//! thresholds, and early-exit window scans that skip entries the threshold
//! comparison proves irrelevant.

use crate::core::dominance::k_dominates;
use crate::core::item::{SortedProfile, UncertainItem};
use crate::core::probability::{apply_arrival, apply_departure};
use crate::core::window::SlidingWindow;
use crate::core::ScanReport;
use crate::{Error, Result};

/// The two index positions read from a sorted profile. The lower position
/// may be any value in `0..k`; the upper is always `lower + (d - k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ThresholdPositions {
    u_min_pos: usize,
    u_max_pos: usize,
}

impl ThresholdPositions {
    pub fn new(d: usize, k: usize, u_min_pos: usize) -> Result<Self> {
        if k < 1 || k > d {
            return Err(Error::Config(format!("k={k} out of range for d={d}")));
        }
        if u_min_pos >= k {
            return Err(Error::Config(format!(
                "threshold position {u_min_pos} out of range 0..{k}"
            )));
        }
        Ok(Self {
            u_min_pos,
            u_max_pos: u_min_pos + (d - k),
        })
    }

    /// Default selection: the highest admissible lower position, so the
    /// upper threshold reads the largest sorted value.
    pub fn default_for(d: usize, k: usize) -> Result<Self> {
        Self::new(d, k, k - 1)
    }

    pub fn u_min_pos(&self) -> usize {
        self.u_min_pos
    }

    pub fn u_max_pos(&self) -> usize {
        self.u_max_pos
    }
}

/// Reads the (lower, upper) thresholds of a profile at the given positions.
/// The lower never exceeds the upper because the profile is sorted.
pub fn mi_thresholds(profile: &SortedProfile, pos: ThresholdPositions) -> (f64, f64) {
    let v = &profile.sorted_values;
    (v[pos.u_min_pos], v[pos.u_max_pos])
}

/// Sound (but incomplete) pruning test: when the upper threshold of `p` lies
/// strictly below the lower threshold of `q`, `q` cannot k-dominate `p`.
/// Both profiles must use the same positions. A `false` result proves
/// nothing.
pub fn cannot_k_dominate(q: &SortedProfile, p: &SortedProfile, pos: ThresholdPositions) -> bool {
    mi_thresholds(p, pos).1 < mi_thresholds(q, pos).0
}

/// The two persistent sorted tables over the window: ids ordered by upper
/// threshold descending and by lower threshold ascending. Ties break by
/// ascending id for determinism.
#[derive(Debug, Clone)]
pub struct MiTables {
    pos: ThresholdPositions,
    mit_max: Vec<(f64, u64)>,
    mit_min: Vec<(f64, u64)>,
}

impl MiTables {
    pub fn new(pos: ThresholdPositions) -> Self {
        Self {
            pos,
            mit_max: Vec::new(),
            mit_min: Vec::new(),
        }
    }

    pub fn pos(&self) -> ThresholdPositions {
        self.pos
    }

    pub fn len(&self) -> usize {
        self.mit_max.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mit_max.is_empty()
    }

    /// Ordered insert into both tables.
    pub fn insert(&mut self, profile: &SortedProfile) {
        let id = profile.item_id;
        assert!(
            !self.mit_max.iter().any(|&(_, i)| i == id),
            "duplicate id {id} in index tables"
        );
        let (mi_min, mi_max) = mi_thresholds(profile, self.pos);
        let at = self
            .mit_max
            .partition_point(|&(key, i)| key > mi_max || (key == mi_max && i < id));
        self.mit_max.insert(at, (mi_max, id));
        let at = self
            .mit_min
            .partition_point(|&(key, i)| key < mi_min || (key == mi_min && i < id));
        self.mit_min.insert(at, (mi_min, id));
    }

    pub fn remove(&mut self, id: u64) {
        if let Some(i) = self.mit_max.iter().position(|&(_, x)| x == id) {
            self.mit_max.remove(i);
        }
        if let Some(i) = self.mit_min.iter().position(|&(_, x)| x == id) {
            self.mit_min.remove(i);
        }
    }

    /// (upper threshold, id) pairs, upper descending.
    pub fn mit_max(&self) -> &[(f64, u64)] {
        &self.mit_max
    }

    /// (lower threshold, id) pairs, lower ascending.
    pub fn mit_min(&self) -> &[(f64, u64)] {
        &self.mit_min
    }
}

/// Departure pass: scans `mit_max` in order, breaking at the first entry
/// whose upper threshold falls below the departed item's lower threshold;
/// every later entry is provably not k-dominated by it. The departed item
/// must already be out of both window and tables.
pub fn mi_departure_pass(
    window: &mut SlidingWindow,
    tables: &MiTables,
    departed: &UncertainItem,
    departed_profile: &SortedProfile,
    k: usize,
) -> ScanReport {
    let (old_min, _) = mi_thresholds(departed_profile, tables.pos);
    let mut rep = ScanReport::default();
    for &(e_max, id) in &tables.mit_max {
        if old_min > e_max {
            rep.broke_at = Some(id);
            break;
        }
        rep.inspected.push(id);
        let e = window
            .get_mut(id)
            .expect("index table id missing from window");
        if apply_departure(e, departed, k) {
            rep.updates += 1;
        }
    }
    rep
}

/// Arrival pass over the resident entries: same `mit_max` scan keyed on the
/// incoming item's lower threshold, multiplying factors per the arrival
/// update.
pub fn mi_arrival_pass(
    window: &mut SlidingWindow,
    tables: &MiTables,
    arrived: &UncertainItem,
    arrived_profile: &SortedProfile,
    k: usize,
) -> ScanReport {
    let (new_min, _) = mi_thresholds(arrived_profile, tables.pos);
    let mut rep = ScanReport::default();
    for &(e_max, id) in &tables.mit_max {
        if new_min > e_max {
            rep.broke_at = Some(id);
            break;
        }
        rep.inspected.push(id);
        let e = window
            .get_mut(id)
            .expect("index table id missing from window");
        if apply_arrival(e, arrived, k) {
            rep.updates += 1;
        }
    }
    rep
}

/// Dominator scan for the incoming item: walks `mit_min` ascending, breaking
/// at the first entry whose lower threshold exceeds the incoming item's
/// upper threshold. Returns the product of `(1 - P(e))` over the surviving
/// entries that k-dominate it; multiply by `P(u_new)` for the full value.
pub fn mi_calculate(
    window: &SlidingWindow,
    tables: &MiTables,
    arrived: &UncertainItem,
    arrived_profile: &SortedProfile,
    k: usize,
) -> (f64, ScanReport) {
    let (_, new_max) = mi_thresholds(arrived_profile, tables.pos);
    let mut rep = ScanReport::default();
    let mut partial = 1.0;
    for &(e_min, id) in &tables.mit_min {
        if new_max < e_min {
            rep.broke_at = Some(id);
            break;
        }
        rep.inspected.push(id);
        let e = window.get(id).expect("index table id missing from window");
        if k_dominates(&e.item, arrived, k) {
            partial *= 1.0 - e.item.prob;
        }
    }
    (partial, rep)
}
