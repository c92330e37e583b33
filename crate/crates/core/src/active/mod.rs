//! Pool-based active learning: query strategies, the simulated oracle and the
//! repeated experimental protocol.

mod config;
mod oracle;
mod runner;
mod strategy;

pub use config::ALConfig;
pub use oracle::{oracle_reveal, LabelMode, Oracle};
pub use runner::{
    auac, repetition_rng, run_active_learning, run_repetition, stratified_split, ALRunResult,
    RepetitionResult, CURVE_CSV_HEADER, TIMING_CSV_HEADER,
};
pub use strategy::{
    pool_scores, select_query, top_scores, Learner, ProbabilitySource, QueryStrategy, StrategyKind,
};
