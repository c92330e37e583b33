use serde::{Deserialize, Serialize};

use super::oracle::LabelMode;
use super::strategy::{QueryStrategy, StrategyKind};
use crate::classifiers::EknnParams;
use crate::datasets::RichDataset;
use crate::error::{Error, Result};
use crate::uncertainty::{DEFAULT_RL_RESOLUTION, MIN_RL_RESOLUTION};

/// Settings of one active-learning experiment (one dataset, one strategy).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ALConfig {
    pub strategy: QueryStrategy,
    /// Share of the pool labeled when the run stops.
    pub budget_fraction: f64,
    pub repetitions: usize,
    pub seed: u64,
    pub model: EknnParams,
    /// Share of each class held out for testing.
    pub test_fraction: f64,
    /// Size of the initial labeled set; `None` means one instance per class.
    pub initial_labeled: Option<usize>,
    pub batch_size: usize,
    pub label_mode: LabelMode,
    pub rl_resolution: usize,
    /// Neighbours of the probabilistic K-NN used by `[pknn]` strategies.
    pub pknn_k: usize,
}

impl Default for ALConfig {
    fn default() -> Self {
        ALConfig {
            strategy: QueryStrategy::random(),
            budget_fraction: 0.6,
            repetitions: 100,
            seed: 0,
            model: EknnParams::default(),
            test_fraction: 0.3,
            initial_labeled: None,
            batch_size: 1,
            label_mode: LabelMode::Crisp,
            rl_resolution: DEFAULT_RL_RESOLUTION,
            pknn_k: 7,
        }
    }
}

impl ALConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.budget_fraction > 0.0 && self.budget_fraction <= 1.0) {
            return Err(Error::invalid(
                "budget_fraction",
                format!("{} is outside (0, 1]", self.budget_fraction),
            ));
        }
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::invalid(
                "test_fraction",
                format!("{} is outside (0, 1)", self.test_fraction),
            ));
        }
        if self.repetitions == 0 {
            return Err(Error::invalid("repetitions", "must be at least 1"));
        }
        if self.initial_labeled == Some(0) {
            return Err(Error::invalid("initial_labeled", "must be at least 1"));
        }
        if self.batch_size == 0 {
            return Err(Error::invalid("batch_size", "must be at least 1"));
        }
        if self.rl_resolution < MIN_RL_RESOLUTION {
            return Err(Error::invalid(
                "rl_resolution",
                format!("must be at least {MIN_RL_RESOLUTION}"),
            ));
        }
        if self.pknn_k == 0 {
            return Err(Error::invalid("pknn_k", "must be at least 1"));
        }
        self.model.validate()
    }

    /// Checks that the configuration can run on `dataset`.
    pub fn validate_for(&self, dataset: &RichDataset) -> Result<()> {
        self.validate()?;
        let m = dataset.n_classes();
        if self.strategy.kind() == StrategyKind::RlEpistemic && m != 2 {
            return Err(Error::UnsupportedStrategy {
                strategy: self.strategy.label(),
                classes: m,
            });
        }
        if self.label_mode == LabelMode::Rich && !dataset.has_rich_labels() {
            return Err(Error::NoRichLabel(dataset.name().to_string()));
        }
        if let Some(c) = dataset.class_counts().iter().position(|&n| n < 2) {
            return Err(Error::DegenerateInput(format!(
                "class `{}` needs at least 2 instances for a pool/test split",
                dataset.frame().labels()[c]
            )));
        }
        Ok(())
    }

    pub fn initial_size(&self, n_classes: usize) -> usize {
        self.initial_labeled.unwrap_or(n_classes)
    }
}
