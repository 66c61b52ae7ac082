//! Small-space algorithms for statistics over sliding windows, built around a
//! metered cost model: multi-source collision finding in functional graphs,
//! randomized element distinctness, exact sliding-window element distinctness,
//! frequency moments, and extreme order statistics, together with brute-force
//! oracles and an experiment harness.
//!
//! All symbol comparisons and function evaluations performed by the algorithms
//! route through a [`meter::Meter`], so time/space cost claims can be checked
//! empirically. Read-only input and write-only output are not charged to the
//! space meter; every stored index, counter or symbol counts as one cell.

pub mod collide;
pub mod element_distinctness;
pub mod error;
pub mod functional_graph;
pub mod freq_moments;
pub mod harness;
pub mod meter;
pub mod oracle;
pub mod order_stats;
pub mod rng;
pub mod sliding_ed;

pub use error::Error;
pub use meter::Meter;

/// Result alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
