//! The event pipeline: ingest, evict, update, compute, insert, parameterized
//! by scheme, with per-event instrumentation and the skyline query surface.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::ai;
use crate::baseline::{self, CiTable};
use crate::core::item::{normalize_and_sort, NormalizationSpec, SortedProfile, UncertainItem};
use crate::core::probability::ksky_probability;
use crate::core::window::{SlidingWindow, WindowEntry};
use crate::core::ScanReport;
use crate::mi::{self, MiTables, ThresholdPositions};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    Naive,
    Ci,
    Mi,
    Ai,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 4] = [
        SchemeKind::Naive,
        SchemeKind::Ci,
        SchemeKind::Mi,
        SchemeKind::Ai,
    ];
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchemeKind::Naive => "naive",
            SchemeKind::Ci => "ci",
            SchemeKind::Mi => "mi",
            SchemeKind::Ai => "ai",
        })
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "naive" => Ok(SchemeKind::Naive),
            "ci" => Ok(SchemeKind::Ci),
            "mi" => Ok(SchemeKind::Mi),
            "ai" => Ok(SchemeKind::Ai),
            other => Err(Error::Config(format!("unknown scheme {other:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EngineConfig {
    pub d: usize,
    pub k: usize,
    pub capacity: usize,
    pub scheme: SchemeKind,
    /// Lower threshold position for the MI tables (0..k). Defaults to k-1.
    pub u_min_pos: usize,
    /// Skyline query threshold; a query returns entries with probability >= tau.
    pub tau: f64,
    pub norm: NormalizationSpec,
    /// From-scratch recompute once an entry accumulates this many updates.
    pub recompute_update_limit: u64,
    /// From-scratch recompute once an entry's stored value drops below this.
    pub recompute_floor: f64,
    /// Restrict AI to the single configured position pair instead of all k.
    pub ai_single_pair: bool,
    /// Epsilon floor for CI product keys.
    pub ci_eps: f64,
}

impl EngineConfig {
    pub fn new(d: usize, k: usize, capacity: usize, scheme: SchemeKind) -> Result<Self> {
        let cfg = Self {
            d,
            k,
            capacity,
            scheme,
            u_min_pos: k.saturating_sub(1),
            tau: 0.0,
            norm: NormalizationSpec::unit(d.max(1)),
            recompute_update_limit: 10_000,
            recompute_floor: 1e-300,
            ai_single_pair: false,
            ci_eps: 1e-6,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::Config("d must be positive".into()));
        }
        if self.k < 1 || self.k > self.d {
            return Err(Error::Config(format!(
                "k={} out of range 1..={}",
                self.k, self.d
            )));
        }
        if self.capacity < 1 {
            return Err(Error::Config("window capacity must be >= 1".into()));
        }
        if self.u_min_pos >= self.k {
            return Err(Error::Config(format!(
                "u_min_pos={} out of range 0..{}",
                self.u_min_pos, self.k
            )));
        }
        if self.norm.dim() != self.d {
            return Err(Error::Config(format!(
                "normalization spec covers {} dimensions, expected {}",
                self.norm.dim(),
                self.d
            )));
        }
        if !self.tau.is_finite() || self.tau < 0.0 {
            return Err(Error::Config(format!(
                "tau={} must be finite and >= 0",
                self.tau
            )));
        }
        Ok(())
    }

    pub fn positions(&self) -> ThresholdPositions {
        ThresholdPositions::new(self.d, self.k, self.u_min_pos).expect("validated config")
    }
}

/// Per-event instrumentation. `compared` counts window entries that went
/// through at least one exact k-dominance check during the event; `pruned`
/// is the rest of the window, so the two always sum to `window_size`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventStats {
    pub event_id: u64,
    pub scheme: SchemeKind,
    pub window_size: u64,
    pub compared: u64,
    pub pruned: u64,
    pub wall_nanos: u128,
}

pub const STATS_CSV_HEADER: &str = "event_id,scheme,window_size,compared,pruned,wall_nanos";

impl EventStats {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.event_id,
            self.scheme,
            self.window_size,
            self.compared,
            self.pruned,
            self.wall_nanos
        )
    }
}

/// Per-scheme mutable state. Naive and AI keep nothing between events; CI
/// and MI maintain their sorted tables alongside the window.
#[derive(Debug, Clone)]
pub(crate) enum SchemeState {
    Naive,
    Ci(CiTable),
    Mi(MiTables),
    Ai { pairs: Vec<ThresholdPositions> },
}

impl SchemeState {
    pub(crate) fn new(cfg: &EngineConfig) -> Self {
        match cfg.scheme {
            SchemeKind::Naive => SchemeState::Naive,
            SchemeKind::Ci => SchemeState::Ci(CiTable::new(cfg.k, cfg.ci_eps)),
            SchemeKind::Mi => SchemeState::Mi(MiTables::new(cfg.positions())),
            SchemeKind::Ai => SchemeState::Ai {
                pairs: if cfg.ai_single_pair {
                    vec![cfg.positions()]
                } else {
                    ai::position_pairs(cfg.d, cfg.k)
                },
            },
        }
    }

    pub(crate) fn remove(&mut self, id: u64) {
        match self {
            SchemeState::Naive | SchemeState::Ai { .. } => {}
            SchemeState::Ci(t) => t.remove(id),
            SchemeState::Mi(t) => t.remove(id),
        }
    }

    pub(crate) fn insert(&mut self, profile: &SortedProfile) {
        match self {
            SchemeState::Naive | SchemeState::Ai { .. } => {}
            SchemeState::Ci(t) => t.insert(profile),
            SchemeState::Mi(t) => t.insert(profile),
        }
    }

    pub(crate) fn departure_pass(
        &mut self,
        window: &mut SlidingWindow,
        departed: &UncertainItem,
        departed_profile: &SortedProfile,
        k: usize,
    ) -> ScanReport {
        match self {
            SchemeState::Naive => baseline::naive_departure_pass(window, departed, k),
            SchemeState::Ci(t) => {
                baseline::ci_departure_pass(window, t, departed, departed_profile, k)
            }
            SchemeState::Mi(t) => mi::mi_departure_pass(window, t, departed, departed_profile, k),
            SchemeState::Ai { pairs } => {
                ai::ai_departure_pass(window, departed, departed_profile, k, pairs)
            }
        }
    }

    pub(crate) fn arrival_pass(
        &mut self,
        window: &mut SlidingWindow,
        arrived: &UncertainItem,
        arrived_profile: &SortedProfile,
        k: usize,
    ) -> ScanReport {
        match self {
            SchemeState::Naive => baseline::naive_arrival_pass(window, arrived, k),
            SchemeState::Ci(t) => baseline::ci_arrival_pass(window, t, arrived, arrived_profile, k),
            SchemeState::Mi(t) => mi::mi_arrival_pass(window, t, arrived, arrived_profile, k),
            SchemeState::Ai { pairs } => {
                ai::ai_arrival_pass(window, arrived, arrived_profile, k, pairs)
            }
        }
    }

    /// Dominator product for the arriving item (without its own P factor).
    pub(crate) fn calculate(
        &self,
        window: &SlidingWindow,
        arrived: &UncertainItem,
        arrived_profile: &SortedProfile,
        k: usize,
    ) -> (f64, ScanReport) {
        match self {
            SchemeState::Naive => baseline::naive_calculate(window, arrived, k),
            SchemeState::Ci(t) => baseline::ci_calculate(window, t, arrived, arrived_profile, k),
            SchemeState::Mi(t) => mi::mi_calculate(window, t, arrived, arrived_profile, k),
            SchemeState::Ai { pairs } => {
                ai::ai_calculate(window, arrived, arrived_profile, k, pairs)
            }
        }
    }
}

/// Single-node engine: one logical writer over one window.
#[derive(Debug, Clone)]
pub struct Engine {
    cfg: EngineConfig,
    window: SlidingWindow,
    state: SchemeState,
    last_id: Option<u64>,
    /// Total multiply/divide updates applied across the stream.
    pub total_updates: u64,
    /// From-scratch recomputes triggered by the drift guard.
    pub recomputes: u64,
}

impl Engine {
    pub fn new(cfg: EngineConfig) -> Result<Self> {
        cfg.validate()?;
        let window = SlidingWindow::new(cfg.capacity);
        let state = SchemeState::new(&cfg);
        Ok(Self {
            cfg,
            window,
            state,
            last_id: None,
            total_updates: 0,
            recomputes: 0,
        })
    }

    pub fn config(&self) -> &EngineConfig {
        &self.cfg
    }

    pub fn window(&self) -> &SlidingWindow {
        &self.window
    }

    pub fn process_event(&mut self, item: UncertainItem) -> Result<EventStats> {
        if item.dim() != self.cfg.d {
            return Err(Error::Invalid(format!(
                "item {} has {} dimensions, engine expects {}",
                item.id,
                item.dim(),
                self.cfg.d
            )));
        }
        if let Some(last) = self.last_id {
            if item.id <= last {
                return Err(Error::OutOfOrder { got: item.id, last });
            }
        }
        self.last_id = Some(item.id);
        let k = self.cfg.k;

        let start = Instant::now();
        let profile = normalize_and_sort(&item, &self.cfg.norm);
        let mut inspected: HashSet<u64> = HashSet::new();

        if self.window.is_full() {
            let old = self.window.evict();
            self.state.remove(old.item.id);
            let rep = self
                .state
                .departure_pass(&mut self.window, &old.item, &old.profile, k);
            self.total_updates += rep.updates;
            inspected.extend(rep.inspected);
        }
        let window_size = self.window.len() as u64;

        let rep = self
            .state
            .arrival_pass(&mut self.window, &item, &profile, k);
        self.total_updates += rep.updates;
        inspected.extend(rep.inspected);

        // `compared` tracks entries referenced while updating existing
        // probabilities (the two passes above). The new item's own dominator
        // scan is a separate read-only phase and is not counted against the
        // window partition.
        let (partial, _calc_rep) = self.state.calculate(&self.window, &item, &profile, k);
        let prob = item.prob * partial;

        let event_id = item.id;
        self.state.insert(&profile);
        self.window.push(WindowEntry::new(item, profile, prob));
        self.drift_guard();

        let compared = inspected.len() as u64;
        Ok(EventStats {
            event_id,
            scheme: self.cfg.scheme,
            window_size,
            compared,
            pruned: window_size - compared,
            wall_nanos: start.elapsed().as_nanos(),
        })
    }

    /// Repeated multiply/divide chains accumulate rounding error, so entries
    /// that have seen too many updates (or underflowed) are recomputed from
    /// scratch over the full window.
    fn drift_guard(&mut self) {
        let limit = self.cfg.recompute_update_limit;
        let floor = self.cfg.recompute_floor;
        let stale: Vec<u64> = self
            .window
            .entries()
            .filter(|e| e.updates > limit || (e.ksky_prob < floor && e.updates > 0))
            .map(|e| e.item.id)
            .collect();
        for id in stale {
            let item = self.window.get(id).expect("window id").item.clone();
            let fresh = ksky_probability(&item, &self.window, self.cfg.k);
            let e = self.window.get_mut(id).expect("window id");
            e.ksky_prob = fresh;
            e.updates = 0;
            self.recomputes += 1;
        }
    }

    /// Entries with probability >= tau, sorted by probability descending
    /// then id ascending.
    pub fn query_skyline(&self, tau: f64) -> Vec<(u64, f64)> {
        let mut out: Vec<(u64, f64)> = self
            .window
            .entries()
            .filter(|e| e.ksky_prob >= tau)
            .map(|e| (e.item.id, e.ksky_prob))
            .collect();
        out.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::probability::oracle_window_probabilities;
    use crate::datagen::{generate_stream, Distribution};

    fn item(id: u64, values: &[f64], prob: f64) -> UncertainItem {
        UncertainItem::new(id, values.to_vec(), prob).unwrap()
    }

    fn five_item_stream() -> Vec<UncertainItem> {
        vec![
            item(1, &[10.0, 3.0, 4.0, 6.0], 0.2),
            item(2, &[9.0, 8.0, 5.0, 9.0], 0.4),
            item(3, &[2.0, 10.0, 4.0, 4.0], 0.5),
            item(4, &[5.0, 2.0, 3.0, 8.0], 0.1),
            item(5, &[7.0, 6.0, 4.0, 6.0], 0.8),
        ]
    }

    fn config(scheme: SchemeKind, k: usize, capacity: usize) -> EngineConfig {
        let mut cfg = EngineConfig::new(4, k, capacity, scheme).unwrap();
        cfg.norm = NormalizationSpec::uniform(4, 0.0, 10.0).unwrap();
        cfg
    }

    #[test]
    fn sliding_window_evolution_matches_example_table() {
        let mut engine = Engine::new(config(SchemeKind::Naive, 3, 3)).unwrap();
        let expected: [&[u64]; 5] = [&[1], &[1, 2], &[1, 2, 3], &[2, 3, 4], &[3, 4, 5]];
        for (u, want) in five_item_stream().into_iter().zip(expected) {
            engine.process_event(u).unwrap();
            assert_eq!(engine.window().ids().collect::<Vec<_>>(), want);
        }
    }

    #[test]
    fn capacity_one_window() {
        let mut engine = Engine::new(config(SchemeKind::Mi, 3, 1)).unwrap();
        for u in five_item_stream() {
            let prob = u.prob;
            engine.process_event(u).unwrap();
            assert_eq!(engine.window().len(), 1);
            let e = engine.window().entries().next().unwrap();
            assert_eq!(e.ksky_prob, prob);
        }
    }

    #[test]
    fn out_of_order_event_is_rejected() {
        let mut engine = Engine::new(config(SchemeKind::Naive, 3, 3)).unwrap();
        engine
            .process_event(item(5, &[1.0, 2.0, 3.0, 4.0], 0.5))
            .unwrap();
        let err = engine.process_event(item(5, &[1.0, 2.0, 3.0, 4.0], 0.5));
        assert!(matches!(err, Err(Error::OutOfOrder { .. })));
    }

    #[test]
    fn schemes_agree_on_seeded_stream() {
        let stream = generate_stream(400, 4, Distribution::Uniform, (0.01, 0.99), 99).unwrap();
        let mut engines: Vec<Engine> = SchemeKind::ALL
            .iter()
            .map(|&s| {
                let mut cfg = EngineConfig::new(4, 3, 20, s).unwrap();
                cfg.norm = NormalizationSpec::unit(4);
                Engine::new(cfg).unwrap()
            })
            .collect();
        for u in &stream {
            for engine in &mut engines {
                engine.process_event(u.clone()).unwrap();
            }
            let oracle = oracle_window_probabilities(engines[0].window(), 3);
            for engine in &engines {
                for e in engine.window().entries() {
                    let want = oracle[&e.item.id];
                    assert!(
                        (e.ksky_prob - want).abs() < 1e-9,
                        "{} drifted on item {}: {} vs oracle {}",
                        engine.config().scheme,
                        e.item.id,
                        e.ksky_prob,
                        want
                    );
                }
            }
        }
    }

    #[test]
    fn naive_compares_whole_window() {
        let mut engine = Engine::new(config(SchemeKind::Naive, 3, 3)).unwrap();
        for u in five_item_stream() {
            let stats = engine.process_event(u).unwrap();
            assert_eq!(stats.compared, stats.window_size);
            assert_eq!(stats.pruned, 0);
        }
    }

    #[test]
    fn stats_partition_the_window() {
        let stream = generate_stream(300, 4, Distribution::Uniform, (0.01, 0.99), 7).unwrap();
        for scheme in SchemeKind::ALL {
            let mut cfg = EngineConfig::new(4, 2, 25, scheme).unwrap();
            cfg.norm = NormalizationSpec::unit(4);
            let mut engine = Engine::new(cfg).unwrap();
            for u in &stream {
                let stats = engine.process_event(u.clone()).unwrap();
                assert_eq!(stats.compared + stats.pruned, stats.window_size);
                assert!(stats.compared <= stats.window_size);
            }
        }
    }

    #[test]
    fn query_skyline_thresholds() {
        let mut engine = Engine::new(config(SchemeKind::Naive, 3, 5)).unwrap();
        for u in five_item_stream() {
            engine.process_event(u).unwrap();
        }
        // tau=0: everything, highest probability first.
        let all = engine.query_skyline(0.0);
        assert_eq!(all.len(), 5);
        assert!(all.windows(2).all(|w| w[0].1 >= w[1].1));
        // tau=0.05 keeps u4 (0.1) and drops u2 (0.0288).
        let some = engine.query_skyline(0.05);
        let ids: Vec<u64> = some.iter().map(|&(id, _)| id).collect();
        assert!(ids.contains(&4));
        assert!(!ids.contains(&2));
        // tau above every probability: empty.
        assert!(engine.query_skyline(1.1).is_empty());
    }

    #[test]
    fn drift_guard_recomputes() {
        let mut cfg = EngineConfig::new(4, 2, 10, SchemeKind::Naive).unwrap();
        cfg.norm = NormalizationSpec::unit(4);
        cfg.recompute_update_limit = 3;
        let mut engine = Engine::new(cfg).unwrap();
        let stream = generate_stream(200, 4, Distribution::Uniform, (0.5, 0.99), 13).unwrap();
        for u in stream {
            engine.process_event(u).unwrap();
        }
        assert!(engine.recomputes > 0, "drift guard never engaged");
        let oracle = oracle_window_probabilities(engine.window(), 2);
        for e in engine.window().entries() {
            assert!((e.ksky_prob - oracle[&e.item.id]).abs() < 1e-9);
        }
    }
}
