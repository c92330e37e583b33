use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::ALConfig;
use super::oracle::Oracle;
use super::strategy::{pool_scores, top_scores, Learner, ProbabilitySource, StrategyKind};
use crate::belief::MassFunction;
use crate::classifiers::{EknnModel, EknnParams, FeatureMatrix, PknnModel, Standardizer};
use crate::datasets::RichDataset;
use crate::error::{Error, Result};

/// Outcome of one repetition of the protocol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepetitionResult {
    pub repetition: usize,
    /// Test accuracy after each labeling step, starting with the initial set.
    pub curve: Vec<f64>,
    /// Labeled-set size at each point of `curve`.
    pub labeled_counts: Vec<usize>,
    pub auac: f64,
    /// Dataset indices of the initial labeled set.
    pub initial: Vec<usize>,
    /// Dataset indices in query order.
    pub queries: Vec<usize>,
    /// Test accuracy of the model trained on the whole pool.
    pub full_accuracy: f64,
    pub pool_size: usize,
    pub test_size: usize,
    /// Set when the repetition failed; the other fields are then empty.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Wall-clock seconds; kept out of the serialized result so that result
    /// files are reproducible.
    #[serde(skip)]
    pub seconds: f64,
}

/// All repetitions of one (dataset, strategy) experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ALRunResult {
    pub dataset: String,
    pub strategy: String,
    pub config: ALConfig,
    pub mean_auac: f64,
    pub mean_full_accuracy: f64,
    pub mean_curve: Vec<f64>,
    pub repetitions: Vec<RepetitionResult>,
}

impl ALRunResult {
    /// AUAC of each successful repetition, in repetition order.
    pub fn auacs(&self) -> Vec<f64> {
        self.successful().map(|r| r.auac).collect()
    }

    pub fn successful(&self) -> impl Iterator<Item = &RepetitionResult> {
        self.repetitions.iter().filter(|r| r.error.is_none())
    }

    pub fn failures(&self) -> impl Iterator<Item = &RepetitionResult> {
        self.repetitions.iter().filter(|r| r.error.is_some())
    }

    /// Rows `dataset,strategy,repetition,step,labeled_count,accuracy`, no header.
    pub fn curve_rows(&self) -> String {
        let mut out = String::new();
        for rep in self.successful() {
            for (step, (acc, count)) in rep.curve.iter().zip(&rep.labeled_counts).enumerate() {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    self.dataset, self.strategy, rep.repetition, step, count, acc
                ));
            }
        }
        out
    }

    /// Rows `dataset,strategy,repetition,seconds`, no header.
    pub fn timing_rows(&self) -> String {
        self.repetitions
            .iter()
            .map(|r| {
                format!(
                    "{},{},{},{:.6}\n",
                    self.dataset, self.strategy, r.repetition, r.seconds
                )
            })
            .collect()
    }
}

pub const CURVE_CSV_HEADER: &str = "dataset,strategy,repetition,step,labeled_count,accuracy\n";
pub const TIMING_CSV_HEADER: &str = "dataset,strategy,repetition,seconds\n";

/// Area under the accuracy curve, as mean accuracy × 100.
pub fn auac(curve: &[f64]) -> Result<f64> {
    if curve.is_empty() {
        return Err(Error::EmptyCurve);
    }
    Ok(100.0 * curve.iter().sum::<f64>() / curve.len() as f64)
}

/// Runs every repetition (in parallel on the current rayon pool) and aggregates
/// them in repetition order, so the result does not depend on scheduling.
pub fn run_active_learning(dataset: &RichDataset, config: &ALConfig) -> Result<ALRunResult> {
    config.validate_for(dataset)?;
    let repetitions: Vec<RepetitionResult> = (0..config.repetitions)
        .into_par_iter()
        .map(|rep| {
            let start = Instant::now();
            let mut result =
                run_repetition(dataset, config, rep).unwrap_or_else(|e| RepetitionResult {
                    repetition: rep,
                    curve: Vec::new(),
                    labeled_counts: Vec::new(),
                    auac: f64::NAN,
                    initial: Vec::new(),
                    queries: Vec::new(),
                    full_accuracy: f64::NAN,
                    pool_size: 0,
                    test_size: 0,
                    error: Some(e.to_string()),
                    seconds: 0.0,
                });
            result.seconds = start.elapsed().as_secs_f64();
            result
        })
        .collect();

    let ok: Vec<&RepetitionResult> = repetitions.iter().filter(|r| r.error.is_none()).collect();
    let mean = |xs: &mut dyn Iterator<Item = f64>| {
        let (s, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
        if n == 0 {
            f64::NAN
        } else {
            s / n as f64
        }
    };
    let mean_auac = mean(&mut ok.iter().map(|r| r.auac));
    let mean_full_accuracy = mean(&mut ok.iter().map(|r| r.full_accuracy));
    let len = ok.first().map_or(0, |r| r.curve.len());
    let mean_curve = (0..len)
        .map(|i| mean(&mut ok.iter().map(|r| r.curve[i])))
        .collect();
    Ok(ALRunResult {
        dataset: dataset.name().to_string(),
        strategy: config.strategy.label(),
        config: config.clone(),
        mean_auac,
        mean_full_accuracy,
        mean_curve,
        repetitions,
    })
}

/// Random stream of repetition `rep`: a function of `(seed, rep)` only.
pub fn repetition_rng(seed: u64, rep: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep as u64);
    rng
}

/// Stratified split into sorted `(pool, test)` index lists. Each class sends
/// `round(test_fraction · n_c)` instances to the test set, keeping at least one in
/// the pool.
pub fn stratified_split<R: Rng + ?Sized>(
    labels: &[usize],
    n_classes: usize,
    test_fraction: f64,
    rng: &mut R,
) -> (Vec<usize>, Vec<usize>) {
    let mut pool = Vec::new();
    let mut test = Vec::new();
    for c in 0..n_classes {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == c).collect();
        members.shuffle(rng);
        let n_test = ((test_fraction * members.len() as f64).round() as usize)
            .min(members.len().saturating_sub(1));
        test.extend_from_slice(&members[..n_test]);
        pool.extend_from_slice(&members[n_test..]);
    }
    pool.sort_unstable();
    test.sort_unstable();
    (pool, test)
}

/// One random pool instance per class (classes drawn at random when fewer are
/// requested), topped up with random pool instances when more are requested.
fn initial_set<R: Rng + ?Sized>(
    pool: &[usize],
    labels: &[usize],
    n_classes: usize,
    size: usize,
    rng: &mut R,
) -> Vec<usize> {
    let mut classes: Vec<usize> = (0..n_classes).collect();
    if size < n_classes {
        classes.shuffle(rng);
        classes.truncate(size);
        classes.sort_unstable();
    }
    let mut chosen = Vec::with_capacity(size);
    for c in classes {
        let members: Vec<usize> = pool.iter().copied().filter(|&i| labels[i] == c).collect();
        chosen.push(members[rng.random_range(0..members.len())]);
    }
    if size > chosen.len() {
        let mut rest: Vec<usize> = pool
            .iter()
            .copied()
            .filter(|i| !chosen.contains(i))
            .collect();
        rest.shuffle(rng);
        chosen.extend(rest.into_iter().take(size - chosen.len()));
    }
    chosen
}

fn fit_learner(
    dataset: &RichDataset,
    config: &ALConfig,
    rows: &[usize],
    labels: &[MassFunction],
    scaler: &Standardizer,
) -> Result<Learner> {
    let x = scaler.transform_rows(dataset.features(), rows);
    let params = EknnParams {
        k: config.model.k.min(rows.len()),
        ..config.model
    };
    let pknn = if config.strategy.probabilities() == ProbabilitySource::Probabilistic {
        let crisp = labels.iter().map(|m| m.betp().argmax()).collect();
        Some(PknnModel::fit(
            x.clone(),
            crisp,
            dataset.frame().clone(),
            config.pknn_k.min(rows.len()),
        )?)
    } else {
        None
    };
    let eknn = EknnModel::fit(x, labels.to_vec(), params)?;
    Ok(Learner {
        eknn,
        pknn,
        rl_resolution: config.rl_resolution,
    })
}

fn accuracy(model: &EknnModel, x: &FeatureMatrix, truth: &[usize]) -> Result<f64> {
    let mut correct = 0usize;
    for (row, &t) in x.rows().zip(truth) {
        if model.predict_mass(row)?.betp().argmax() == t {
            correct += 1;
        }
    }
    Ok(correct as f64 / truth.len() as f64)
}

/// One repetition of the protocol: split, seed, then alternate evaluation and
/// querying until the budget is spent.
pub fn run_repetition(
    dataset: &RichDataset,
    config: &ALConfig,
    rep: usize,
) -> Result<RepetitionResult> {
    let mut rng = repetition_rng(config.seed, rep);
    let m = dataset.n_classes();
    let truth = dataset.true_labels();
    let (pool, test) = stratified_split(truth, m, config.test_fraction, &mut rng);
    debug_assert!(pool.iter().all(|i| test.binary_search(i).is_err()));
    let test_truth: Vec<usize> = test.iter().map(|&i| truth[i]).collect();

    let initial_size = config.initial_size(m).min(pool.len());
    let target = ((config.budget_fraction * pool.len() as f64).ceil() as usize)
        .clamp(initial_size, pool.len());

    let mut oracle = Oracle::new(dataset, config.label_mode);
    let initial = initial_set(&pool, truth, m, initial_size, &mut rng);
    let mut labeled = Vec::with_capacity(target);
    let mut labels = Vec::with_capacity(target);
    for &i in &initial {
        labels.push(oracle.reveal(i)?);
        labeled.push(i);
    }
    let mut unlabeled: Vec<usize> = pool
        .iter()
        .copied()
        .filter(|i| !oracle.is_revealed(*i))
        .collect();

    let mut curve = Vec::new();
    let mut labeled_counts = Vec::new();
    let mut queries = Vec::new();
    loop {
        let scaler = Standardizer::fit(dataset.features(), &labeled)?;
        let learner = fit_learner(dataset, config, &labeled, &labels, &scaler)?;
        let x_test = scaler.transform_rows(dataset.features(), &test);
        curve.push(accuracy(&learner.eknn, &x_test, &test_truth)?);
        labeled_counts.push(labeled.len());
        if labeled.len() >= target {
            break;
        }
        let b = config.batch_size.min(target - labeled.len());
        let picks: Vec<usize> = if config.strategy.kind() == StrategyKind::Random {
            let mut picks = Vec::with_capacity(b);
            let mut remaining: Vec<usize> = (0..unlabeled.len()).collect();
            for _ in 0..b {
                picks.push(remaining.remove(rng.random_range(0..remaining.len())));
            }
            picks
        } else {
            let x_pool = scaler.transform_rows(dataset.features(), &unlabeled);
            top_scores(&pool_scores(&config.strategy, &learner, &x_pool)?, b)
        };
        let chosen: Vec<usize> = picks.iter().map(|&p| unlabeled[p]).collect();
        for &i in &chosen {
            labels.push(oracle.reveal(i)?);
            labeled.push(i);
            queries.push(i);
        }
        unlabeled.retain(|i| !chosen.contains(i));
    }

    // Reference: the model trained on the entire pool.
    let mut full_labels = labels.clone();
    let mut full_rows = labeled.clone();
    for &i in &unlabeled {
        full_labels.push(oracle.reveal(i)?);
        full_rows.push(i);
    }
    let scaler = Standardizer::fit(dataset.features(), &full_rows)?;
    let full = fit_learner(dataset, config, &full_rows, &full_labels, &scaler)?;
    let full_accuracy = accuracy(
        &full.eknn,
        &scaler.transform_rows(dataset.features(), &test),
        &test_truth,
    )?;

    Ok(RepetitionResult {
        repetition: rep,
        auac: auac(&curve)?,
        curve,
        labeled_counts,
        initial,
        queries,
        full_accuracy,
        pool_size: pool.len(),
        test_size: test.len(),
        error: None,
        seconds: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::active::QueryStrategy;
    use crate::datasets::{generate_synthetic, SyntheticKind, SyntheticSpec};

    #[test]
    fn auac_examples() {
        assert!((auac(&[0.8; 10]).unwrap() - 80.0).abs() < 1e-12);
        assert!((auac(&[0.9]).unwrap() - 90.0).abs() < 1e-12);
        let ramp: Vec<f64> = (0..=1000).map(|i| i as f64 / 1000.0).collect();
        assert!((auac(&ramp).unwrap() - 50.0).abs() <= 0.05);
        assert_eq!(auac(&[]), Err(Error::EmptyCurve));
    }

    #[test]
    fn split_is_stratified_and_disjoint() {
        let labels: Vec<usize> = (0..100).map(|i| usize::from(i % 4 == 0)).collect();
        let mut rng = repetition_rng(1, 0);
        let (pool, test) = stratified_split(&labels, 2, 0.3, &mut rng);
        assert_eq!(pool.len() + test.len(), 100);
        assert_eq!(test.iter().filter(|&&i| labels[i] == 1).count(), 8);
        assert_eq!(test.iter().filter(|&&i| labels[i] == 0).count(), 23);
        assert!(pool.iter().all(|i| !test.contains(i)));
    }

    #[test]
    fn curve_length_and_trace() {
        let ds =
            generate_synthetic(&SyntheticSpec::new(SyntheticKind::Circle, 60, 0.05, 2)).unwrap();
        for strategy in [QueryStrategy::random(), QueryStrategy::klir(0.2).unwrap()] {
            let config = ALConfig {
                strategy,
                repetitions: 2,
                ..Default::default()
            };
            let res = run_active_learning(&ds, &config).unwrap();
            for rep in &res.repetitions {
                assert!(rep.error.is_none());
                let target = (0.6 * rep.pool_size as f64).ceil() as usize;
                assert_eq!(rep.curve.len(), target - 2 + 1);
                let mut seen = rep.initial.clone();
                seen.extend(&rep.queries);
                seen.sort_unstable();
                seen.dedup();
                assert_eq!(seen.len(), target);
                assert!(rep.curve.iter().all(|a| (0.0..=1.0).contains(a)));
            }
        }
    }

    #[test]
    fn degenerate_budget_gives_single_point() {
        let ds = generate_synthetic(&SyntheticSpec::new(SyntheticKind::Line, 40, 0.0, 2)).unwrap();
        let config = ALConfig {
            budget_fraction: 0.01,
            repetitions: 1,
            ..Default::default()
        };
        let res = run_active_learning(&ds, &config).unwrap();
        assert_eq!(res.repetitions[0].curve.len(), 1);
    }

    #[test]
    fn same_seed_same_result() {
        let ds = generate_synthetic(&SyntheticSpec::new(SyntheticKind::Sine, 50, 0.05, 9)).unwrap();
        let config = ALConfig {
            strategy: QueryStrategy::random(),
            repetitions: 3,
            seed: 5,
            ..Default::default()
        };
        let a = run_active_learning(&ds, &config).unwrap();
        let b = run_active_learning(&ds, &config).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn rl_strategy_requires_two_classes() {
        let ds = generate_synthetic(&SyntheticSpec::new(
            SyntheticKind::ThreeClassImprecise,
            60,
            0.0,
            1,
        ))
        .unwrap();
        let config = ALConfig {
            strategy: QueryStrategy::new(StrategyKind::RlEpistemic),
            repetitions: 1,
            ..Default::default()
        };
        assert!(matches!(
            run_active_learning(&ds, &config),
            Err(Error::UnsupportedStrategy { .. })
        ));
    }
}
