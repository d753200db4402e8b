//! Predictive-maintenance classification toolkit.
//!
//! Loads AI4I-style sensor tables, encodes and balances them, trains twelve
//! base classifiers and a bootstrap majority-vote ensemble, evaluates them,
//! and ranks the results with TOPSIS.

pub mod dataio;
pub mod ensemble;
pub mod error;
pub mod learners;
pub mod matrix;
pub mod metrics;
pub mod model;
pub mod pipeline;
pub mod preprocess;
pub mod rng;
pub mod topsis;

pub use error::{Error, Result};
