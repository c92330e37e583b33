use std::collections::HashSet;
use std::path::{Path, PathBuf};

use evidal_core::active::{ALConfig, QueryStrategy};
use evidal_core::Error as CoreError;
use serde::{Deserialize, Serialize};

use crate::error::SchemaError;

/// A batch of active-learning experiments: every strategy on every dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    /// Registry names (see `data/manifest.json`), synthetic generator names, or
    /// paths to CSV files.
    pub datasets: Vec<String>,
    pub strategies: Vec<QueryStrategy>,
    /// Settings shared by all runs; `strategy` and `seed` are set per run.
    #[serde(default)]
    pub config: ALConfig,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    /// Master seed; every (dataset, strategy) run uses it, so strategies on the
    /// same dataset see the same splits and initial sets.
    #[serde(default)]
    pub seed: u64,
    /// Worker threads; defaults to the available cores, capped by the repetitions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parallelism: Option<usize>,
}

fn default_output() -> PathBuf {
    PathBuf::from("results")
}

/// The part of a spec that determines the results; embedded in result files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolvedExperiment {
    pub datasets: Vec<String>,
    pub strategies: Vec<QueryStrategy>,
    pub config: ALConfig,
    pub seed: u64,
}

impl ExperimentSpec {
    /// One entry per (dataset, strategy) pair, dataset-major.
    pub fn plan(&self) -> Vec<(String, ALConfig)> {
        self.datasets
            .iter()
            .flat_map(|d| {
                self.strategies
                    .iter()
                    .map(move |s| (d.clone(), self.run_config(*s)))
            })
            .collect()
    }

    pub fn run_config(&self, strategy: QueryStrategy) -> ALConfig {
        ALConfig {
            strategy,
            seed: self.seed,
            ..self.config.clone()
        }
    }

    pub fn resolved(&self) -> ResolvedExperiment {
        ResolvedExperiment {
            datasets: self.datasets.clone(),
            strategies: self.strategies.clone(),
            config: ALConfig {
                seed: self.seed,
                ..self.config.clone()
            },
            seed: self.seed,
        }
    }

    /// Threads to use: the configured degree, else the available cores capped by
    /// the repetitions.
    pub fn threads(&self) -> usize {
        self.parallelism.unwrap_or_else(|| {
            let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
            cores.min(self.config.repetitions).max(1)
        })
    }

    pub fn validate(&self) -> Result<(), SchemaError> {
        if self.datasets.is_empty() {
            return Err(SchemaError::new(
                ".datasets",
                "must list at least one dataset",
            ));
        }
        if self.strategies.is_empty() {
            return Err(SchemaError::new(
                ".strategies",
                "must list at least one strategy",
            ));
        }
        let mut seen = HashSet::new();
        for (i, d) in self.datasets.iter().enumerate() {
            if !seen.insert(d.as_str()) {
                return Err(SchemaError::new(
                    format!(".datasets[{i}]"),
                    format!("`{d}` is listed twice"),
                ));
            }
        }
        let mut seen = HashSet::new();
        for (i, s) in self.strategies.iter().enumerate() {
            if !seen.insert(s.label()) {
                return Err(SchemaError::new(
                    format!(".strategies[{i}]"),
                    format!("`{s}` is listed twice"),
                ));
            }
        }
        if self.parallelism == Some(0) {
            return Err(SchemaError::new(".parallelism", "must be at least 1"));
        }
        self.config.validate().map_err(|e| match e {
            CoreError::InvalidParameter { name, reason } => {
                let path = match name {
                    "k" | "alpha0" | "gamma" => format!(".config.model.{name}"),
                    other => format!(".config.{other}"),
                };
                SchemaError::new(path, reason)
            }
            other => SchemaError::new(".config", other.to_string()),
        })
    }
}

/// Parses and validates a spec from JSON text, filling defaults.
pub fn parse_experiment_spec(text: &str) -> Result<ExperimentSpec, SchemaError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| SchemaError::new(".", e.to_string()))?;
    for (pointer, hint) in [
        (
            "/config/strategy",
            "set strategies in the top-level `strategies` list",
        ),
        (
            "/config/seed",
            "set the seed with the top-level `seed` field",
        ),
    ] {
        if value.pointer(pointer).is_some() {
            return Err(SchemaError::new(pointer.replace('/', "."), hint));
        }
    }
    let spec: ExperimentSpec = serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        let path = if path == "." {
            path
        } else {
            format!(".{path}")
        };
        SchemaError::new(path, e.into_inner().to_string())
    })?;
    spec.validate()?;
    Ok(spec)
}

/// Reads, parses and validates a spec file.
pub fn load_experiment_spec(path: &Path) -> anyhow::Result<ExperimentSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SchemaError::new(".", format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_experiment_spec(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use evidal_core::active::StrategyKind;

    #[test]
    fn minimal_spec_gets_defaults() {
        let spec =
            parse_experiment_spec(r#"{ "datasets": ["iris"], "strategies": ["klir"] }"#).unwrap();
        assert_eq!(spec.strategies[0].klir_lambda(), Some(0.2));
        assert_eq!(spec.config.model.k, 7);
        assert_eq!(spec.config.budget_fraction, 0.6);
        assert_eq!(spec.config.repetitions, 100);
        assert_eq!(spec.output, PathBuf::from("results"));
    }

    #[test]
    fn lambda_out_of_range_reports_path() {
        let err = parse_experiment_spec(
            r#"{ "datasets": ["iris"], "strategies": [{"kind": "klir", "klir_lambda": 1.5}] }"#,
        )
        .unwrap_err();
        assert_eq!(err.path, ".strategies[0].klir_lambda");
    }

    #[test]
    fn config_errors_report_paths() {
        let err = parse_experiment_spec(r#"{ "datasets": ["iris"], "strategies": ["random"], "config": {"budget_fraction": 2} }"#)
            .unwrap_err();
        assert_eq!(err.path, ".config.budget_fraction");
        let err = parse_experiment_spec(r#"{ "datasets": ["iris"], "strategies": ["random"], "config": {"model": {"alpha0": 1}} }"#)
            .unwrap_err();
        assert_eq!(err.path, ".config.model.alpha0");
        let err = parse_experiment_spec(
            r#"{ "datasets": ["iris"], "strategies": ["random"], "config": {"seed": 3} }"#,
        )
        .unwrap_err();
        assert_eq!(err.path, ".config.seed");
        let err = parse_experiment_spec(
            r#"{ "datasets": ["iris"], "strategies": ["random"], "extra": 1 }"#,
        )
        .unwrap_err();
        assert_eq!(err.path, ".extra");
        let err =
            parse_experiment_spec(r#"{ "datasets": [], "strategies": ["random"] }"#).unwrap_err();
        assert_eq!(err.path, ".datasets");
        let err = parse_experiment_spec(
            r#"{ "datasets": ["iris"], "strategies": ["random", "random"] }"#,
        )
        .unwrap_err();
        assert_eq!(err.path, ".strategies[1]");
    }

    #[test]
    fn plan_covers_every_pair() {
        let names: Vec<String> = (0..15).map(|i| format!("\"d{i}\"")).collect();
        let text = format!(
            r#"{{ "datasets": [{}], "strategies": ["random", "least_confidence", "klir"], "seed": 9 }}"#,
            names.join(",")
        );
        let spec = parse_experiment_spec(&text).unwrap();
        let plan = spec.plan();
        assert_eq!(plan.len(), 45);
        assert!(plan.iter().all(|(_, c)| c.seed == 9));
        assert_eq!(plan[2].1.strategy.kind(), StrategyKind::Klir);
    }
}
