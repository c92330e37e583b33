use serde::{Deserialize, Serialize};

use super::frame::Frame;
use super::mass::MASS_TOLERANCE;
use crate::error::{Error, Result};

/// A probability distribution over the classes of a frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityVector {
    frame: Frame,
    p: Vec<f64>,
}

impl ProbabilityVector {
    pub fn new(frame: Frame, p: Vec<f64>) -> Result<Self> {
        if p.len() != frame.len() {
            return Err(Error::DimensionMismatch {
                expected: frame.len(),
                got: p.len(),
            });
        }
        if let Some(&bad) = p
            .iter()
            .find(|v| !v.is_finite() || **v < 0.0 || **v > 1.0 + MASS_TOLERANCE)
        {
            return Err(Error::NegativeMass { value: bad });
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::SumNotOne { sum });
        }
        Ok(ProbabilityVector { frame, p })
    }

    /// Normalizes non-negative weights. All-zero weights give the uniform distribution.
    pub fn from_weights(frame: Frame, weights: &[f64]) -> Result<Self> {
        if weights.len() != frame.len() {
            return Err(Error::DimensionMismatch {
                expected: frame.len(),
                got: weights.len(),
            });
        }
        if let Some(&bad) = weights.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::NegativeMass { value: bad });
        }
        let total: f64 = weights.iter().sum();
        let p = if total > 0.0 {
            weights.iter().map(|w| w / total).collect()
        } else {
            vec![1.0 / frame.len() as f64; frame.len()]
        };
        Ok(ProbabilityVector { frame, p })
    }

    pub(crate) fn from_raw(frame: Frame, p: Vec<f64>) -> Self {
        debug_assert_eq!(frame.len(), p.len());
        ProbabilityVector { frame, p }
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn values(&self) -> &[f64] {
        &self.p
    }

    pub fn get(&self, index: usize) -> f64 {
        self.p[index]
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    /// Most probable class; ties go to the lowest index.
    pub fn argmax(&self) -> usize {
        argmax_first(&self.p)
    }
}

/// Index of the maximum, breaking ties by the lowest index. NaNs are never selected
/// unless every entry is NaN.
pub fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] || (values[best].is_nan() && !v.is_nan()) {
            best = i;
        }
    }
    best
}
