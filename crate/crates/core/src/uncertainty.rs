//! Uncertainty measures used as sampling scores.
//!
//! All entropy-like measures are in bits (log base 2).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::belief::{FocalSet, MassFunction, ProbabilityVector};
use crate::error::{Error, Result};

/// Default grid resolution of the relative-likelihood baseline.
pub const DEFAULT_RL_RESOLUTION: usize = 100_000;

/// Smallest grid resolution accepted by the relative-likelihood baseline.
pub const MIN_RL_RESOLUTION: usize = 1_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UncertaintyKind {
    Entropy,
    LeastConfidence,
    Discord,
    Nonspecificity,
    Klir,
    EvidEpistemic,
    EvidAleatoric,
    RlEpistemic,
    RlAleatoric,
}

impl UncertaintyKind {
    pub const ALL: [UncertaintyKind; 9] = [
        UncertaintyKind::Entropy,
        UncertaintyKind::LeastConfidence,
        UncertaintyKind::Discord,
        UncertaintyKind::Nonspecificity,
        UncertaintyKind::Klir,
        UncertaintyKind::EvidEpistemic,
        UncertaintyKind::EvidAleatoric,
        UncertaintyKind::RlEpistemic,
        UncertaintyKind::RlAleatoric,
    ];

    pub fn name(self) -> &'static str {
        match self {
            UncertaintyKind::Entropy => "entropy",
            UncertaintyKind::LeastConfidence => "least_confidence",
            UncertaintyKind::Discord => "discord",
            UncertaintyKind::Nonspecificity => "nonspecificity",
            UncertaintyKind::Klir => "klir",
            UncertaintyKind::EvidEpistemic => "evid_epistemic",
            UncertaintyKind::EvidAleatoric => "evid_aleatoric",
            UncertaintyKind::RlEpistemic => "rl_epistemic",
            UncertaintyKind::RlAleatoric => "rl_aleatoric",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        UncertaintyKind::ALL.into_iter().find(|k| k.name() == name)
    }
}

impl fmt::Display for UncertaintyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A non-negative uncertainty value tagged with the measure that produced it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyScore {
    pub value: f64,
    pub kind: UncertaintyKind,
}

impl UncertaintyScore {
    fn new(kind: UncertaintyKind, value: f64) -> Self {
        debug_assert!(value >= 0.0, "{kind} produced {value}");
        UncertaintyScore { value, kind }
    }
}

/// Weight of non-specificity in the Klir uncertainty.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct KlirParams {
    lambda: f64,
}

impl KlirParams {
    pub const DEFAULT_LAMBDA: f64 = 0.2;

    pub fn new(lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::invalid(
                "klir_lambda",
                format!("{lambda} is outside [0, 1]"),
            ));
        }
        Ok(KlirParams { lambda })
    }

    pub fn lambda(self) -> f64 {
        self.lambda
    }
}

impl Default for KlirParams {
    fn default() -> Self {
        KlirParams {
            lambda: Self::DEFAULT_LAMBDA,
        }
    }
}

impl TryFrom<f64> for KlirParams {
    type Error = Error;

    fn try_from(lambda: f64) -> Result<Self> {
        KlirParams::new(lambda)
    }
}

impl From<KlirParams> for f64 {
    fn from(p: KlirParams) -> f64 {
        p.lambda
    }
}

/// Maps the negated accumulator of a `-Σ x log x` style sum to a non-negative value,
/// turning `-0.0` and rounding residue into a clean `0.0`.
fn negated(sum: f64) -> f64 {
    if sum < 0.0 {
        -sum
    } else {
        0.0
    }
}

/// Shannon entropy in bits, with `0 log 0 = 0`.
pub fn shannon_entropy(p: &ProbabilityVector) -> UncertaintyScore {
    let mut sum = 0.0;
    for &x in p.values() {
        if x > 0.0 {
            sum += x * x.min(1.0).log2();
        }
    }
    UncertaintyScore::new(UncertaintyKind::Entropy, negated(sum))
}

/// `1 - max p`.
pub fn least_confidence(p: &ProbabilityVector) -> UncertaintyScore {
    let max = p.values().iter().copied().fold(0.0, f64::max);
    UncertaintyScore::new(UncertaintyKind::LeastConfidence, (1.0 - max).max(0.0))
}

/// Discord: `-Σ m(A) log2 BetP(A)`, the conflict part of the Klir uncertainty.
pub fn discord(m: &MassFunction) -> UncertaintyScore {
    UncertaintyScore::new(UncertaintyKind::Discord, discord_value(m))
}

fn discord_value(m: &MassFunction) -> f64 {
    let bet = m.betp();
    let mut sum = 0.0;
    for &(set, mass) in m.focal_elements() {
        let b = subset_probability(bet.values(), set).min(1.0);
        sum += mass * b.log2();
    }
    negated(sum)
}

fn subset_probability(p: &[f64], set: FocalSet) -> f64 {
    if set.is_singleton() {
        p[set.bits().trailing_zeros() as usize]
    } else {
        set.indices().map(|i| p[i]).sum()
    }
}

/// Non-specificity: `Σ m(A) log2 |A|`.
pub fn nonspecificity(m: &MassFunction) -> UncertaintyScore {
    UncertaintyScore::new(UncertaintyKind::Nonspecificity, nonspecificity_value(m))
}

fn nonspecificity_value(m: &MassFunction) -> f64 {
    m.focal_elements()
        .iter()
        .map(|&(set, mass)| mass * (set.len() as f64).log2())
        .sum()
}

/// Klir uncertainty `λ N(m) + (1 - λ) D(m)`.
pub fn klir(m: &MassFunction, params: KlirParams) -> UncertaintyScore {
    let lambda = params.lambda;
    let value = lambda * nonspecificity_value(m) + (1.0 - lambda) * discord_value(m);
    UncertaintyScore::new(UncertaintyKind::Klir, value)
}

/// Evidential epistemic and aleatoric uncertainty:
/// `U_e = Σ_ω min(Pl(ω), 1 - Bel(ω))`, `U_a = Σ_ω min(Bel(ω), 1 - Pl(ω))`.
pub fn evidential_epistemic_aleatoric(m: &MassFunction) -> (UncertaintyScore, UncertaintyScore) {
    let mut epistemic = 0.0;
    let mut aleatoric = 0.0;
    for i in 0..m.frame().len() {
        let w = FocalSet::singleton(i);
        let bel = m.mass(w);
        let pl = m.pl_unchecked(w);
        epistemic += pl.min(1.0 - bel).max(0.0);
        aleatoric += bel.min(1.0 - pl).max(0.0);
    }
    (
        UncertaintyScore::new(UncertaintyKind::EvidEpistemic, epistemic),
        UncertaintyScore::new(UncertaintyKind::EvidAleatoric, aleatoric),
    )
}

/// Binary epistemic/aleatoric uncertainty from the relative likelihood of a
/// Bernoulli parameter, given `p` positive and `n` negative (possibly weighted)
/// observations.
///
/// The degrees of support `π(1) = sup_θ min(L(θ)/L(θ̂), 2θ - 1)` and
/// `π(0) = sup_θ min(L(θ)/L(θ̂), 1 - 2θ)` are maximized over the grid
/// `θ = i / resolution`. The result is `(min(π1, π0), 1 - max(π1, π0))`.
pub fn epistemic_binary_relative_likelihood(
    p: f64,
    n: f64,
    resolution: usize,
) -> Result<(UncertaintyScore, UncertaintyScore)> {
    if !(p.is_finite() && p >= 0.0) {
        return Err(Error::invalid(
            "p_pos",
            format!("{p} is not a finite non-negative weight"),
        ));
    }
    if !(n.is_finite() && n >= 0.0) {
        return Err(Error::invalid(
            "n_neg",
            format!("{n} is not a finite non-negative weight"),
        ));
    }
    if resolution < MIN_RL_RESOLUTION {
        return Err(Error::invalid(
            "resolution",
            format!("{resolution} is below the minimum of {MIN_RL_RESOLUTION}"),
        ));
    }
    let grid = LikelihoodGrid::new(p, n, resolution);
    let pi1 = grid.support_positive();
    let pi0 = grid.support_negative();
    Ok((
        UncertaintyScore::new(UncertaintyKind::RlEpistemic, pi1.min(pi0)),
        UncertaintyScore::new(UncertaintyKind::RlAleatoric, 1.0 - pi1.max(pi0)),
    ))
}

/// Relative likelihood of `θ_i = i / res` for a Bernoulli sample.
///
/// The likelihood `θ^p (1-θ)^n` is unimodal in θ with its peak at `θ̂`, which the
/// support computations exploit: on each side of the peak the objective is a
/// minimum of two monotone functions, so its grid maximum sits next to the grid
/// point where they cross.
struct LikelihoodGrid {
    p: f64,
    n: f64,
    res: usize,
    theta_hat: f64,
    log_peak: f64,
    /// Largest grid index with `θ_i <= θ̂`.
    peak: usize,
}

impl LikelihoodGrid {
    fn new(p: f64, n: f64, res: usize) -> Self {
        let total = p + n;
        let (theta_hat, one_minus_hat) = if total > 0.0 {
            (p / total, n / total)
        } else {
            (0.5, 0.5)
        };
        let log_peak = xlogy(p, theta_hat) + xlogy(n, one_minus_hat);
        let mut peak = ((theta_hat * res as f64).floor() as usize).min(res);
        // Guard against rounding in the floor above.
        while peak > 0 && peak as f64 / res as f64 > theta_hat {
            peak -= 1;
        }
        while peak < res && (peak + 1) as f64 / res as f64 <= theta_hat {
            peak += 1;
        }
        LikelihoodGrid {
            p,
            n,
            res,
            theta_hat,
            log_peak,
            peak,
        }
    }

    fn theta(&self, i: usize) -> f64 {
        i as f64 / self.res as f64
    }

    fn ratio(&self, i: usize) -> f64 {
        let theta = self.theta(i);
        let one_minus = (self.res - i) as f64 / self.res as f64;
        let log_l = xlogy(self.p, theta) + xlogy(self.n, one_minus);
        (log_l - self.log_peak).min(0.0).exp()
    }

    fn positive(&self, i: usize) -> f64 {
        self.ratio(i).min(2.0 * self.theta(i) - 1.0)
    }

    fn negative(&self, i: usize) -> f64 {
        self.ratio(i).min(1.0 - 2.0 * self.theta(i))
    }

    /// `π(1)`: increasing up to the peak, then unimodal with the crossing of the
    /// falling ratio and the rising line `2θ - 1`.
    fn support_positive(&self) -> f64 {
        let mut best = self.positive(self.peak);
        if self.peak < self.res {
            // First index right of the peak where the ratio drops below the line.
            let (mut lo, mut hi) = (self.peak + 1, self.res + 1);
            while lo < hi {
                let mid = lo + (hi - lo) / 2;
                if self.ratio(mid) < 2.0 * self.theta(mid) - 1.0 {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
            for i in [lo.saturating_sub(1), lo] {
                if i > self.peak && i <= self.res {
                    best = best.max(self.positive(i));
                }
            }
        }
        best.max(0.0)
    }

    /// `π(0)`: mirror image of [`Self::support_positive`].
    fn support_negative(&self) -> f64 {
        let mut best = if self.peak < self.res && self.theta(self.peak) < self.theta_hat {
            self.negative(self.peak + 1)
        } else {
            f64::NEG_INFINITY
        };
        // On [0, peak] the ratio rises and the line `1 - 2θ` falls. Find the first
        // index where the ratio reaches the line.
        let (mut lo, mut hi) = (0usize, self.peak + 1);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if self.ratio(mid) >= 1.0 - 2.0 * self.theta(mid) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        for i in [lo.saturating_sub(1), lo] {
            if i <= self.peak {
                best = best.max(self.negative(i));
            }
        }
        best.max(0.0)
    }
}

/// `x ln y` with the convention `0 ln 0 = 0`.
fn xlogy(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.ln()
    }
}
