use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal, StudentsT};

use crate::error::{Error, Result};

/// Result of a test: statistic and p-value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// Two-sided paired Student t-test on `a - b`.
///
/// Identical samples give `t = 0, p = 1`; constant non-zero differences have no
/// defined statistic and give [`Error::ZeroVariance`].
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<TestResult> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::TooFewInstances { needed: 2, got: n });
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::DegenerateInput("samples must be finite".into()));
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    if d.iter().all(|&x| x == 0.0) {
        return Ok(TestResult {
            statistic: 0.0,
            p_value: 1.0,
        });
    }
    let nf = n as f64;
    let mean = d.iter().sum::<f64>() / nf;
    let var = d.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (nf - 1.0);
    if var <= f64::EPSILON * mean * mean {
        return Err(Error::ZeroVariance);
    }
    let t = mean / (var / nf).sqrt();
    let dist = StudentsT::new(0.0, 1.0, nf - 1.0).expect("df >= 1");
    let p = (2.0 * dist.sf(t.abs())).min(1.0);
    Ok(TestResult {
        statistic: t,
        p_value: p,
    })
}

/// Checks that `scores` is a non-ragged finite matrix with at least 2 rows and columns.
fn check_matrix(scores: &[Vec<f64>]) -> Result<(usize, usize)> {
    let n = scores.len();
    let k = scores.first().map_or(0, Vec::len);
    if n < 2 || k < 2 {
        return Err(Error::DegenerateInput(format!(
            "need at least 2 datasets and 2 strategies, got {n} x {k}"
        )));
    }
    if scores.iter().any(|r| r.len() != k) {
        return Err(Error::DegenerateInput("rows have different lengths".into()));
    }
    if scores.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateInput("scores must be finite".into()));
    }
    Ok((n, k))
}

/// Ranks of `values` (1 = largest), ties sharing their average rank.
pub fn rank_descending(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    average_tied_ranks(values, &order)
}

/// Ranks of `values` (1 = smallest), ties sharing their average rank.
pub fn rank_ascending(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    average_tied_ranks(values, &order)
}

fn average_tied_ranks(values: &[f64], order: &[usize]) -> Vec<f64> {
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // Positions start..end (0-based) share ranks start+1..=end.
        let rank = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Per-dataset ranks (rows) of each strategy (columns), 1 = highest score.
pub fn rank_matrix(scores: &[Vec<f64>]) -> Vec<Vec<f64>> {
    scores.iter().map(|row| rank_descending(row)).collect()
}

/// Mean rank of each strategy over the datasets (1 = best).
pub fn average_ranks(scores: &[Vec<f64>]) -> Result<Vec<f64>> {
    let (n, k) = check_matrix(scores)?;
    let mut avg = vec![0.0; k];
    for row in rank_matrix(scores) {
        for (a, r) in avg.iter_mut().zip(row) {
            *a += r;
        }
    }
    Ok(avg.into_iter().map(|s| s / n as f64).collect())
}

/// Friedman test on a datasets × strategies score matrix:
/// `χ² = 12 n / (k (k + 1)) · (Σ_j R_j² - k (k + 1)² / 4)` with `R_j` the average ranks,
/// compared against a χ² distribution with `k - 1` degrees of freedom.
pub fn friedman_test(scores: &[Vec<f64>]) -> Result<TestResult> {
    let (n, k) = check_matrix(scores)?;
    let ranks = average_ranks(scores)?;
    let (nf, kf) = (n as f64, k as f64);
    let sum_sq: f64 = ranks.iter().map(|r| r * r).sum();
    let statistic =
        (12.0 * nf / (kf * (kf + 1.0)) * (sum_sq - kf * (kf + 1.0) * (kf + 1.0) / 4.0)).max(0.0);
    let dist = ChiSquared::new(kf - 1.0).expect("k >= 2");
    Ok(TestResult {
        statistic,
        p_value: dist.sf(statistic).clamp(0.0, 1.0),
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alternative {
    #[default]
    TwoSided,
    /// One-sided in the direction of the observed difference.
    OneSided,
}

/// Largest sample size handled with the exact null distribution.
pub const WILCOXON_EXACT_MAX: usize = 25;

/// Wilcoxon signed-rank test on paired samples. Zero differences are dropped;
/// the statistic is `min(W+, W-)`. Up to [`WILCOXON_EXACT_MAX`] non-zero pairs the
/// p-value comes from the exact permutation distribution of the (tie-averaged)
/// ranks, beyond that from the tie-corrected normal approximation.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64], alternative: Alternative) -> Result<TestResult> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let d: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| x - y)
        .filter(|&x| x != 0.0)
        .collect();
    if d.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateInput("samples must be finite".into()));
    }
    let n = d.len();
    if n == 0 {
        return Ok(TestResult {
            statistic: 0.0,
            p_value: 1.0,
        });
    }
    let abs: Vec<f64> = d.iter().map(|x| x.abs()).collect();
    let ranks = rank_ascending(&abs);
    let w_plus: f64 = d
        .iter()
        .zip(&ranks)
        .filter(|(x, _)| **x > 0.0)
        .map(|(_, r)| r)
        .sum();
    let total = n as f64 * (n as f64 + 1.0) / 2.0;
    let t = w_plus.min(total - w_plus);
    let one_sided = if n <= WILCOXON_EXACT_MAX {
        exact_lower_tail(&ranks, t)
    } else {
        normal_lower_tail(&abs, &ranks, t)
    };
    let p = match alternative {
        Alternative::TwoSided => 2.0 * one_sided,
        Alternative::OneSided => one_sided,
    };
    Ok(TestResult {
        statistic: t,
        p_value: p.min(1.0),
    })
}

/// `P(W+ <= t)` under the null: every sign pattern equally likely. Ranks are
/// half-integers at worst, so the distribution is tabulated over doubled ranks.
fn exact_lower_tail(ranks: &[f64], t: f64) -> f64 {
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let max: usize = doubled.iter().sum();
    let mut counts = vec![0.0f64; max + 1];
    counts[0] = 1.0;
    let mut reach = 0;
    for &r in &doubled {
        for s in (0..=reach).rev() {
            if counts[s] > 0.0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    let limit = (2.0 * t).round() as usize;
    let hits: f64 = counts[..=limit.min(max)].iter().sum();
    hits / 2f64.powi(ranks.len() as i32)
}

fn normal_lower_tail(abs: &[f64], ranks: &[f64], t: f64) -> f64 {
    let n = ranks.len() as f64;
    let mean = n * (n + 1.0) / 4.0;
    let mut tie_term = 0.0;
    let mut sorted: Vec<f64> = abs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let size = (j - i) as f64;
        tie_term += size * size * size - size;
        i = j;
    }
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
    if var <= 0.0 {
        return 1.0;
    }
    Normal::new(0.0, 1.0)
        .expect("standard normal")
        .cdf((t - mean) / var.sqrt())
}

/// Holm step-down adjustment; returned in the input order.
pub fn holm_adjust(p_values: &[f64]) -> Vec<f64> {
    let m = p_values.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| p_values[i].total_cmp(&p_values[j]).then(i.cmp(&j)));
    let mut adjusted = vec![0.0; m];
    let mut running = 0.0f64;
    for (rank, &i) in order.iter().enumerate() {
        let candidate = ((m - rank) as f64 * p_values[i]).min(1.0);
        running = running.max(candidate);
        adjusted[i] = running;
    }
    adjusted
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_test_basics() {
        let a = [1.0, 2.0, 3.0];
        let r = paired_t_test(&a, &a).unwrap();
        assert_eq!((r.statistic, r.p_value), (0.0, 1.0));
        assert!(paired_t_test(&[1.0, 2.0], &[1.0]).is_err());
        assert_eq!(
            paired_t_test(&[2.0, 3.0], &[1.0, 2.0]),
            Err(Error::ZeroVariance)
        );
    }

    #[test]
    fn t_test_is_antisymmetric() {
        let a = [0.3, 0.9, 0.4, 0.8, 0.75];
        let b = [0.2, 0.5, 0.6, 0.1, 0.7];
        let ab = paired_t_test(&a, &b).unwrap();
        let ba = paired_t_test(&b, &a).unwrap();
        assert_eq!(ab.statistic, -ba.statistic);
        assert_eq!(ab.p_value, ba.p_value);
    }

    #[test]
    fn friedman_unanimous_and_tied() {
        let rows = vec![vec![0.9, 0.8, 0.1]; 15];
        let r = friedman_test(&rows).unwrap();
        assert_eq!(r.statistic, 30.0);
        let flat = vec![vec![0.5, 0.5, 0.5]; 6];
        assert_eq!(friedman_test(&flat).unwrap().statistic, 0.0);
        let small = friedman_test(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(small.statistic.is_finite() && (0.0..=1.0).contains(&small.p_value));
        assert!(friedman_test(&[vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn ranks_average_ties() {
        assert_eq!(
            rank_descending(&[0.5, 0.9, 0.5, 0.1]),
            vec![2.5, 1.0, 2.5, 4.0]
        );
        assert_eq!(rank_ascending(&[3.0, 1.0, 2.0]), vec![3.0, 1.0, 2.0]);
    }

    #[test]
    fn wilcoxon_dominance_exact() {
        let a: Vec<f64> = (0..15).map(|i| 1.0 + i as f64).collect();
        let b: Vec<f64> = (0..15).map(|i| i as f64 * 0.5).collect();
        let r = wilcoxon_signed_rank(&a, &b, Alternative::TwoSided).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert!((r.p_value - 2.0 / 32768.0).abs() < 1e-15);
        let one = wilcoxon_signed_rank(&a, &b, Alternative::OneSided).unwrap();
        assert!((one.p_value - 1.0 / 32768.0).abs() < 1e-15);
        assert_eq!(
            wilcoxon_signed_rank(&a, &a, Alternative::TwoSided)
                .unwrap()
                .p_value,
            1.0
        );
    }

    #[test]
    fn holm_examples() {
        let adj = holm_adjust(&[0.01, 0.04, 0.03]);
        assert!((adj[0] - 0.03).abs() < 1e-15);
        assert!((adj[2] - 0.06).abs() < 1e-15);
        assert!((adj[1] - 0.06).abs() < 1e-15);
        assert_eq!(holm_adjust(&[0.6, 0.9]), vec![1.0, 1.0]);
    }
}
