//! Domain types, dominance predicates, probability updates, and the
//! brute-force oracle the test suites check every scheme against.

pub mod dominance;
pub mod item;
pub mod probability;
pub mod window;

pub use dominance::{dominates, k_dominates};
pub use item::{normalize_and_sort, NormalizationSpec, SortedProfile, UncertainItem};
pub use probability::{
    apply_arrival, apply_departure, ksky_probability, oracle_window_probabilities,
};
pub use window::{SlidingWindow, WindowEntry};

/// What one filter-guided pass over the window actually touched.
#[derive(Debug, Clone, Default)]
pub struct ScanReport {
    /// Ids that went through an exact k-dominance check, in scan order.
    pub inspected: Vec<u64>,
    /// Id at which an ordered scan broke early, if it did.
    pub broke_at: Option<u64>,
    /// Number of probability updates applied during the pass.
    pub updates: u64,
}
