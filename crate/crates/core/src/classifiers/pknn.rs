use super::eknn::{nearest, Neighbor};
use super::features::FeatureMatrix;
use crate::belief::{Frame, ProbabilityVector};
use crate::error::{Error, Result};

/// Distance-weighted probabilistic K-NN: `p(ω) ∝ Σ 1/d` over the neighbours of class ω.
#[derive(Clone, Debug)]
pub struct PknnModel {
    features: FeatureMatrix,
    labels: Vec<usize>,
    frame: Frame,
    k: usize,
}

impl PknnModel {
    pub fn fit(
        features: FeatureMatrix,
        labels: Vec<usize>,
        frame: Frame,
        k: usize,
    ) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("k", "must be at least 1"));
        }
        if labels.len() != features.n_rows() {
            return Err(Error::LengthMismatch {
                left: features.n_rows(),
                right: labels.len(),
            });
        }
        if features.n_rows() < k {
            return Err(Error::TooFewInstances {
                needed: k,
                got: features.n_rows(),
            });
        }
        if let Some(&bad) = labels.iter().find(|&&c| c >= frame.len()) {
            return Err(Error::BadSubset {
                index: bad,
                frame_size: frame.len(),
            });
        }
        Ok(PknnModel {
            features,
            labels,
            frame,
            k,
        })
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn neighbors(&self, x: &[f64]) -> Result<Vec<Neighbor>> {
        if x.len() != self.features.n_cols() {
            return Err(Error::DimensionMismatch {
                expected: self.features.n_cols(),
                got: x.len(),
            });
        }
        Ok(nearest(&self.features, x, self.k))
    }

    /// Class probabilities from inverse-distance weights. If some neighbours
    /// coincide with `x`, the probability is split uniformly over their classes.
    pub fn predict_proba(&self, x: &[f64]) -> Result<ProbabilityVector> {
        let neighbors = self.neighbors(x)?;
        let mut weights = vec![0.0; self.frame.len()];
        let exact: Vec<usize> = neighbors
            .iter()
            .filter(|n| n.squared_distance == 0.0)
            .map(|n| self.labels[n.index])
            .collect();
        if exact.is_empty() {
            for n in &neighbors {
                weights[self.labels[n.index]] += 1.0 / n.squared_distance.sqrt();
            }
        } else {
            for c in exact {
                weights[c] = 1.0;
            }
        }
        ProbabilityVector::from_weights(self.frame.clone(), &weights)
    }
}
