//! Toolkit for learning from class-imbalanced data.
//!
//! The crate provides four layers that build on each other:
//!
//! * [`dataset`]: a dense in-memory dataset with CSV ingest/emit and
//!   label re-encoding, plus [`rng`] for deterministic, splittable
//!   random streams.
//! * [`neighbors`] and [`mlprims`]: exact k-nearest-neighbor and radius
//!   queries (brute force or metric tree), Lloyd k-means, and a linear
//!   propensity model.
//! * [`samplers`]: fourteen minority-oversampling algorithms behind one
//!   signature, and a one-vs-all `transform` that balances every class
//!   up to the majority count.
//! * [`metrics`] and [`harness`]: skew-insensitive evaluation metrics
//!   and a stratified cross-validation harness with per-phase timing.
//!
//! Every randomized routine draws from [`rng::RandomStream`], keyed by
//! seed and task, so results are reproducible across runs and across
//! thread counts.

pub mod dataset;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod mlprims;
pub mod neighbors;
pub mod rng;
pub mod samplers;

pub use dataset::{load_csv, ClassSummary, Dataset, LabelColumn};
pub use error::{Error, Result};
pub use rng::RandomStream;
