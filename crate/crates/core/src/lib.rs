//! Belief-function uncertainty sampling for pool-based active learning.

pub mod active;
pub mod belief;
pub mod classifiers;
pub mod datasets;
pub mod error;
pub mod scoring;
pub mod stats;
pub mod uncertainty;

pub use belief::{FocalSet, Frame, MassFunction, ProbabilityVector};
pub use error::{Error, Result};
