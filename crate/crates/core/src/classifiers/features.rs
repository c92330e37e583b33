use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense row-major `rows × cols` matrix of real features.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid(
                "features",
                "all feature values must be finite",
            ));
        }
        Ok(FeatureMatrix { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        FeatureMatrix::new(rows.len(), cols, data)
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        (0..self.rows).map(move |i| self.row(i))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// New matrix made of the given rows, in order.
    pub fn select_rows(&self, indices: &[usize]) -> FeatureMatrix {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        FeatureMatrix {
            rows: indices.len(),
            cols: self.cols,
            data,
        }
    }
}

/// Squared Euclidean distance.
pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Per-column affine map to zero mean and unit variance.
///
/// Columns with zero variance are only centred.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    mean: Vec<f64>,
    scale: Vec<f64>,
}

impl Standardizer {
    /// Estimates the column statistics from the listed rows only.
    pub fn fit(features: &FeatureMatrix, rows: &[usize]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::TooFewInstances { needed: 1, got: 0 });
        }
        let d = features.n_cols();
        let n = rows.len() as f64;
        let mut mean = vec![0.0; d];
        for &r in rows {
            for (m, v) in mean.iter_mut().zip(features.row(r)) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= n;
        }
        let mut var = vec![0.0; d];
        for &r in rows {
            for ((s, v), m) in var.iter_mut().zip(features.row(r)).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let scale = var
            .into_iter()
            .map(|s| {
                let sd = (s / n).sqrt();
                if sd > 1e-12 {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        Ok(Standardizer { mean, scale })
    }

    pub fn transform_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(&self.mean)
            .zip(&self.scale)
            .map(|((v, m), s)| (v - m) / s)
            .collect()
    }

    /// Standardizes the listed rows of `features`, in order.
    pub fn transform_rows(&self, features: &FeatureMatrix, rows: &[usize]) -> FeatureMatrix {
        let mut data = Vec::with_capacity(rows.len() * features.n_cols());
        for &r in rows {
            data.extend(self.transform_row(features.row(r)));
        }
        FeatureMatrix {
            rows: rows.len(),
            cols: features.n_cols(),
            data,
        }
    }

    pub fn transform(&self, features: &FeatureMatrix) -> FeatureMatrix {
        let all: Vec<usize> = (0..features.n_rows()).collect();
        self.transform_rows(features, &all)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_shape_checks() {
        assert!(FeatureMatrix::new(2, 2, vec![1.0; 3]).is_err());
        assert!(FeatureMatrix::from_rows(&[vec![1.0, 2.0], vec![3.0]]).is_err());
        assert!(FeatureMatrix::new(1, 1, vec![f64::NAN]).is_err());
        let m = FeatureMatrix::from_rows(&[[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]]).unwrap();
        assert_eq!(m.row(1), &[3.0, 4.0]);
        assert_eq!(m.select_rows(&[2, 0]).as_slice(), &[5.0, 6.0, 1.0, 2.0]);
    }

    #[test]
    fn standardizer_uses_only_listed_rows() {
        let m = FeatureMatrix::from_rows(&[[0.0, 5.0], [2.0, 5.0], [100.0, -7.0]]).unwrap();
        let s = Standardizer::fit(&m, &[0, 1]).unwrap();
        assert_eq!(s.transform_row(&[0.0, 5.0]), vec![-1.0, 0.0]);
        assert_eq!(s.transform_row(&[2.0, 6.0]), vec![1.0, 1.0]);
        assert!(Standardizer::fit(&m, &[]).is_err());
    }
}
