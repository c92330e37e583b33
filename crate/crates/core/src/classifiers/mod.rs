//! Nearest-neighbour classifiers: the evidential K-NN and a probabilistic baseline.

mod eknn;
mod features;
mod pknn;

pub use eknn::{EknnModel, EknnParams, GammaMode, Neighbor};
pub use features::{squared_distance, FeatureMatrix, Standardizer};
pub use pknn::PknnModel;
