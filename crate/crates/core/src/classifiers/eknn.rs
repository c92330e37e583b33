use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::features::{squared_distance, FeatureMatrix};
use crate::belief::{Frame, MassFunction, ProbabilityVector};
use crate::error::{Error, Result};

/// Reliability applied to both sources when a combination step hits total conflict.
const CONFLICT_RETRY_DISCOUNT: f64 = 1.0 - 1e-6;

/// How the distance scale `γ` of the evidential K-NN is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum GammaMode {
    /// `γ = 1 / mean squared pairwise distance` over the training set.
    #[default]
    Auto,
    Fixed(f64),
}

impl fmt::Display for GammaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GammaMode::Auto => f.write_str("auto"),
            GammaMode::Fixed(g) => write!(f, "{g}"),
        }
    }
}

impl Serialize for GammaMode {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            GammaMode::Auto => serializer.serialize_str("auto"),
            GammaMode::Fixed(g) => serializer.serialize_f64(*g),
        }
    }
}

impl<'de> Deserialize<'de> for GammaMode {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Text(s) if s == "auto" => Ok(GammaMode::Auto),
            Raw::Text(s) => Err(serde::de::Error::custom(format!(
                "expected \"auto\" or a positive number, got \"{s}\""
            ))),
            Raw::Number(g) if g > 0.0 && g.is_finite() => Ok(GammaMode::Fixed(g)),
            Raw::Number(g) => Err(serde::de::Error::custom(format!(
                "gamma must be positive, got {g}"
            ))),
        }
    }
}

/// Hyperparameters of the evidential K-NN.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EknnParams {
    pub k: usize,
    pub alpha0: f64,
    pub gamma: GammaMode,
}

impl Default for EknnParams {
    fn default() -> Self {
        EknnParams {
            k: 7,
            alpha0: 0.95,
            gamma: GammaMode::Auto,
        }
    }
}

impl EknnParams {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::invalid("k", "must be at least 1"));
        }
        if !(self.alpha0 > 0.0 && self.alpha0 < 1.0) {
            return Err(Error::invalid(
                "alpha0",
                format!("{} is outside (0, 1)", self.alpha0),
            ));
        }
        if let GammaMode::Fixed(g) = self.gamma {
            if !(g > 0.0 && g.is_finite()) {
                return Err(Error::invalid(
                    "gamma",
                    format!("{g} is not a positive number"),
                ));
            }
        }
        Ok(())
    }
}

/// A training point selected as neighbour of a query.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Neighbor {
    pub index: usize,
    pub squared_distance: f64,
}

/// Evidential K-nearest-neighbour classifier: every neighbour contributes its
/// label, discounted by `α0 exp(-γ d²)`, and the pieces of evidence are pooled
/// with Dempster's rule.
#[derive(Clone, Debug)]
pub struct EknnModel {
    features: FeatureMatrix,
    labels: Vec<MassFunction>,
    frame: Frame,
    k: usize,
    alpha0: f64,
    gamma: f64,
}

impl EknnModel {
    pub fn fit(
        features: FeatureMatrix,
        labels: Vec<MassFunction>,
        params: EknnParams,
    ) -> Result<Self> {
        params.validate()?;
        if labels.len() != features.n_rows() {
            return Err(Error::LengthMismatch {
                left: features.n_rows(),
                right: labels.len(),
            });
        }
        if features.n_rows() < params.k {
            return Err(Error::TooFewInstances {
                needed: params.k,
                got: features.n_rows(),
            });
        }
        let frame = labels[0].frame().clone();
        if labels.iter().any(|m| *m.frame() != frame) {
            return Err(Error::FrameMismatch);
        }
        let gamma = match params.gamma {
            GammaMode::Fixed(g) => g,
            GammaMode::Auto => auto_gamma(&features),
        };
        Ok(EknnModel {
            features,
            labels,
            frame,
            k: params.k,
            alpha0: params.alpha0,
            gamma,
        })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn n_train(&self) -> usize {
        self.features.n_rows()
    }

    pub fn labels(&self) -> &[MassFunction] {
        &self.labels
    }

    /// The `k` nearest training points, ordered by distance then training index.
    pub fn neighbors(&self, x: &[f64]) -> Result<Vec<Neighbor>> {
        if x.len() != self.features.n_cols() {
            return Err(Error::DimensionMismatch {
                expected: self.features.n_cols(),
                got: x.len(),
            });
        }
        Ok(nearest(&self.features, x, self.k))
    }

    /// Reliability `α0 exp(-γ d²)` given to a neighbour at squared distance `d2`.
    pub fn reliability(&self, d2: f64) -> f64 {
        self.alpha0 * (-self.gamma * d2).exp()
    }

    pub fn predict_mass(&self, x: &[f64]) -> Result<MassFunction> {
        let neighbors = self.neighbors(x)?;
        let mut acc: Option<MassFunction> = None;
        for nb in neighbors {
            let evidence = self.labels[nb.index].discount(self.reliability(nb.squared_distance));
            acc = Some(match acc {
                None => evidence,
                Some(m) => combine_with_retry(&m, &evidence)?,
            });
        }
        Ok(acc.expect("k >= 1"))
    }

    pub fn predict_betp(&self, x: &[f64]) -> Result<ProbabilityVector> {
        Ok(self.predict_mass(x)?.betp())
    }

    pub fn predict_batch(&self, xs: &FeatureMatrix) -> Result<Vec<MassFunction>> {
        xs.rows().map(|x| self.predict_mass(x)).collect()
    }
}

fn combine_with_retry(a: &MassFunction, b: &MassFunction) -> Result<MassFunction> {
    match a.combine_dempster(b) {
        Err(Error::TotalConflict { .. }) => a
            .discount(CONFLICT_RETRY_DISCOUNT)
            .combine_dempster(&b.discount(CONFLICT_RETRY_DISCOUNT)),
        other => other,
    }
}

/// `1 / mean` of the squared distances over all pairs of distinct training points,
/// or 1 when that mean is zero (all points coincide, or a single point).
///
/// Uses the identity `mean_{i<j} ‖xi - xj‖² = 2 / (N - 1) · Σ_i ‖xi - x̄‖²`.
fn auto_gamma(features: &FeatureMatrix) -> f64 {
    let n = features.n_rows();
    if n < 2 {
        return 1.0;
    }
    let d = features.n_cols();
    let mut mean = vec![0.0; d];
    for row in features.rows() {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    let scatter: f64 = features
        .rows()
        .map(|row| squared_distance(row, &mean))
        .sum();
    let mean_sq = 2.0 * scatter / (n as f64 - 1.0);
    if mean_sq > 1e-12 && mean_sq.is_finite() {
        1.0 / mean_sq
    } else {
        1.0
    }
}

/// Brute-force k nearest rows of `features`, ties broken by lowest row index.
pub(crate) fn nearest(features: &FeatureMatrix, x: &[f64], k: usize) -> Vec<Neighbor> {
    let mut all: Vec<Neighbor> = features
        .rows()
        .enumerate()
        .map(|(index, row)| Neighbor {
            index,
            squared_distance: squared_distance(row, x),
        })
        .collect();
    let order = |a: &Neighbor, b: &Neighbor| {
        a.squared_distance
            .total_cmp(&b.squared_distance)
            .then(a.index.cmp(&b.index))
    };
    let k = k.min(all.len());
    if k < all.len() {
        all.select_nth_unstable_by(k, order);
        all.truncate(k);
    }
    all.sort_unstable_by(order);
    all
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::belief::FocalSet;
    use crate::uncertainty::nonspecificity;

    fn crisp(frame: &Frame, class: usize) -> MassFunction {
        MassFunction::categorical(frame.clone(), FocalSet::singleton(class)).unwrap()
    }

    fn two_class(points: &[[f64; 2]], classes: &[usize], params: EknnParams) -> EknnModel {
        let f = Frame::indexed(2).unwrap();
        let labels = classes.iter().map(|&c| crisp(&f, c)).collect();
        EknnModel::fit(FeatureMatrix::from_rows(points).unwrap(), labels, params).unwrap()
    }

    #[test]
    fn fit_validates() {
        let f = Frame::indexed(2).unwrap();
        let xs = FeatureMatrix::from_rows(&[[0.0, 1.0]; 10]).unwrap();
        let labels: Vec<_> = (0..10).map(|i| crisp(&f, i % 2)).collect();
        let p = EknnParams {
            k: 11,
            ..Default::default()
        };
        assert_eq!(
            EknnModel::fit(xs.clone(), labels.clone(), p).unwrap_err(),
            Error::TooFewInstances {
                needed: 11,
                got: 10
            }
        );
        // All points identical: automatic gamma falls back to 1.
        let m = EknnModel::fit(xs, labels.clone(), EknnParams::default()).unwrap();
        assert_eq!(m.gamma(), 1.0);

        let mut mixed = labels;
        mixed[3] = MassFunction::vacuous(Frame::indexed(3).unwrap());
        let xs = FeatureMatrix::from_rows(&[[0.0, 1.0]; 10]).unwrap();
        assert_eq!(
            EknnModel::fit(xs, mixed, EknnParams::default()).unwrap_err(),
            Error::FrameMismatch
        );
    }

    #[test]
    fn auto_gamma_matches_pairwise_mean() {
        let pts: Vec<[f64; 3]> = (0..10)
            .map(|i| {
                let t = i as f64;
                [t.sin(), (2.0 * t).cos() * 3.0, t * 0.1]
            })
            .collect();
        let xs = FeatureMatrix::from_rows(&pts).unwrap();
        let mut total = 0.0;
        let mut pairs = 0.0;
        for i in 0..10 {
            for j in i + 1..10 {
                total += squared_distance(&pts[i], &pts[j]);
                pairs += 1.0;
            }
        }
        let g = auto_gamma(&xs);
        assert!(g > 0.0 && g.is_finite());
        assert!((g - pairs / total).abs() < 1e-12 * g);
    }

    #[test]
    fn single_neighbor_is_discounted_label() {
        let params = EknnParams {
            k: 1,
            alpha0: 0.95,
            gamma: GammaMode::Fixed(0.5),
        };
        let model = two_class(&[[0.0, 0.0], [10.0, 0.0]], &[0, 1], params);
        let m = model.predict_mass(&[1.0, 0.0]).unwrap();
        let w = 0.95 * (-0.5f64).exp();
        assert!((m.mass(FocalSet::singleton(0)) - w).abs() < 1e-15);
        assert!((m.mass(FocalSet::full(2)) - (1.0 - w)).abs() < 1e-15);
        assert_eq!(m.betp().argmax(), 0);
    }

    #[test]
    fn equidistant_opposite_neighbors_are_balanced() {
        let params = EknnParams {
            k: 2,
            ..Default::default()
        };
        let model = two_class(&[[-1.0, 0.0], [1.0, 0.0]], &[0, 1], params);
        let p = model.predict_betp(&[0.0, 0.0]).unwrap();
        assert!((p.get(0) - 0.5).abs() < 1e-15);
        assert!((p.get(1) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn combination_of_two_neighbors() {
        let f = Frame::indexed(2).unwrap();
        let m1 = MassFunction::new(
            f.clone(),
            [(FocalSet::singleton(0), 0.9), (f.full_set(), 0.1)],
        )
        .unwrap();
        let m2 = MassFunction::new(
            f.clone(),
            [(FocalSet::singleton(1), 0.5), (f.full_set(), 0.5)],
        )
        .unwrap();
        let m = combine_with_retry(&m1, &m2).unwrap();
        assert!((m.mass(FocalSet::singleton(0)) - 0.45 / 0.55).abs() < 1e-12);
        assert!((m.mass(FocalSet::singleton(1)) - 0.05 / 0.55).abs() < 1e-12);
        assert!((m.mass(f.full_set()) - 0.05 / 0.55).abs() < 1e-12);
    }

    #[test]
    fn total_conflict_is_retried() {
        let f = Frame::indexed(2).unwrap();
        let m = combine_with_retry(&crisp(&f, 0), &crisp(&f, 1)).unwrap();
        assert!((m.mass(FocalSet::singleton(0)) - m.mass(FocalSet::singleton(1))).abs() < 1e-12);
    }

    #[test]
    fn huge_gamma_gives_vacuous_output() {
        let params = EknnParams {
            k: 3,
            alpha0: 0.95,
            gamma: GammaMode::Fixed(1e6),
        };
        let model = two_class(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], &[0, 1, 0], params);
        let m = model.predict_mass(&[0.5, 0.5]).unwrap();
        assert!((nonspecificity(&m).value - 1.0).abs() < 1e-6);
    }

    #[test]
    fn neighbor_ties_go_to_lowest_index() {
        let xs = FeatureMatrix::from_rows(&[[1.0], [-1.0], [1.0], [0.5]]).unwrap();
        let nb = nearest(&xs, &[0.0], 3);
        let idx: Vec<_> = nb.iter().map(|n| n.index).collect();
        assert_eq!(idx, vec![3, 0, 1]);
    }

    #[test]
    fn gamma_mode_serde() {
        assert_eq!(serde_json::to_string(&GammaMode::Auto).unwrap(), "\"auto\"");
        assert_eq!(
            serde_json::from_str::<GammaMode>("2.5").unwrap(),
            GammaMode::Fixed(2.5)
        );
        assert!(serde_json::from_str::<GammaMode>("-1").is_err());
        assert!(serde_json::from_str::<GammaMode>("\"fast\"").is_err());
    }
}
