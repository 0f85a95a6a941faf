//! Maintains, for every uncertain item in a count-based sliding window, its
//! probability of belonging to the k-dominant skyline.
//!
//! The window is FIFO with a fixed capacity. Each item carries `d` attribute
//! values (smaller is better) and an occurrence probability in (0,1). The
//! probability of an item being in the k-dominant skyline is its own
//! probability times the product of `(1 - P(u'))` over every window item `u'`
//! that k-dominates it. Arrivals and departures update these products
//! incrementally.
//!
//! Four interchangeable update schemes are provided:
//!
//! * `naive` — full pairwise scan, the in-pipeline reference.
//! * `ci` — product-key filter table (CI-style baseline).
//! * `mi` — Middle Indexing: two persistent sorted threshold tables with
//!   early-exit scans.
//! * `ai` — All Indexing: per-event candidate filtering across every
//!   admissible threshold position pair, no persistent tables.
//!
//! [`distributed`] runs the same pipeline partitioned across simulated
//! coordinator/worker nodes, and [`sweep`] drives benchmark parameter sweeps
//! for the `kdom` CLI.

pub mod ai;
pub mod baseline;
pub mod cli;
pub mod core;
pub mod datagen;
pub mod distributed;
pub mod engine;
pub mod mi;
pub mod sweep;

mod error;

pub use error::{Error, Result};
