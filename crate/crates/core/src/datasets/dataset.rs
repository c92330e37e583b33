use serde::{Deserialize, Serialize};

use crate::belief::{FocalSet, Frame, MassFunction};
use crate::classifiers::FeatureMatrix;
use crate::error::{Error, Result};

/// A feature table with crisp ground-truth classes and, optionally, rich labels
/// (one mass function per instance) as supplied by imperfect oracles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RichDataset {
    name: String,
    frame: Frame,
    feature_names: Vec<String>,
    features: FeatureMatrix,
    true_labels: Vec<usize>,
    rich_labels: Option<Vec<MassFunction>>,
}

impl RichDataset {
    pub fn new(
        name: impl Into<String>,
        frame: Frame,
        feature_names: Vec<String>,
        features: FeatureMatrix,
        true_labels: Vec<usize>,
        rich_labels: Option<Vec<MassFunction>>,
    ) -> Result<Self> {
        if feature_names.len() != features.n_cols() {
            return Err(Error::DimensionMismatch {
                expected: features.n_cols(),
                got: feature_names.len(),
            });
        }
        if true_labels.len() != features.n_rows() {
            return Err(Error::LengthMismatch {
                left: features.n_rows(),
                right: true_labels.len(),
            });
        }
        if let Some(&bad) = true_labels.iter().find(|&&c| c >= frame.len()) {
            return Err(Error::BadSubset {
                index: bad,
                frame_size: frame.len(),
            });
        }
        if let Some(rich) = &rich_labels {
            if rich.len() != features.n_rows() {
                return Err(Error::LengthMismatch {
                    left: features.n_rows(),
                    right: rich.len(),
                });
            }
            if rich.iter().any(|m| *m.frame() != frame) {
                return Err(Error::FrameMismatch);
            }
        }
        Ok(RichDataset {
            name: name.into(),
            frame,
            feature_names,
            features,
            true_labels,
            rich_labels,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn n_classes(&self) -> usize {
        self.frame.len()
    }

    pub fn len(&self) -> usize {
        self.features.n_rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn n_features(&self) -> usize {
        self.features.n_cols()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn features(&self) -> &FeatureMatrix {
        &self.features
    }

    pub fn true_labels(&self) -> &[usize] {
        &self.true_labels
    }

    /// Rich labels as stored in the source file, if it had any.
    pub fn rich_labels(&self) -> Option<&[MassFunction]> {
        self.rich_labels.as_deref()
    }

    pub fn has_rich_labels(&self) -> bool {
        self.rich_labels.is_some()
    }

    /// Categorical mass on the ground-truth class of instance `i`.
    pub fn crisp_mass(&self, i: usize) -> MassFunction {
        MassFunction::categorical(self.frame.clone(), FocalSet::singleton(self.true_labels[i]))
            .expect("true labels are validated against the frame")
    }

    /// Every label as a mass function: the stored rich labels, or categorical
    /// masses built from the ground truth for crisp-only data.
    pub fn label_masses(&self) -> Vec<MassFunction> {
        match &self.rich_labels {
            Some(rich) => rich.clone(),
            None => (0..self.len()).map(|i| self.crisp_mass(i)).collect(),
        }
    }

    /// Instance count per class.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes()];
        for &c in &self.true_labels {
            counts[c] += 1;
        }
        counts
    }

    /// Shannon entropy of the class distribution, normalized by `log2 M`.
    pub fn class_entropy(&self) -> f64 {
        let n = self.len() as f64;
        let h: f64 = self
            .class_counts()
            .into_iter()
            .filter(|&c| c > 0)
            .map(|c| {
                let p = c as f64 / n;
                -p * p.log2()
            })
            .sum();
        h / (self.n_classes() as f64).log2()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_shapes() {
        let frame = Frame::indexed(2).unwrap();
        let x = FeatureMatrix::from_rows(&[[0.0], [1.0]]).unwrap();
        let names = vec!["x".to_string()];
        assert!(
            RichDataset::new("d", frame.clone(), names.clone(), x.clone(), vec![0], None).is_err()
        );
        assert!(RichDataset::new(
            "d",
            frame.clone(),
            names.clone(),
            x.clone(),
            vec![0, 2],
            None
        )
        .is_err());
        let ds = RichDataset::new("d", frame, names, x, vec![0, 1], None).unwrap();
        assert_eq!(ds.class_counts(), vec![1, 1]);
        assert_eq!(ds.class_entropy(), 1.0);
        assert!(ds.label_masses()[1].mass(FocalSet::singleton(1)) == 1.0);
    }
}
