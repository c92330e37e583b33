//! Fixtures shared by the benchmarks.
use evidal_core::belief::{random_mass, Frame, MassFunction};
use evidal_core::classifiers::{EknnModel, EknnParams};
use evidal_core::datasets::{generate_synthetic, RichDataset, SyntheticKind, SyntheticSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `count` random mass functions on a frame of `classes` classes.
pub fn masses(classes: usize, count: usize, max_focal: usize, seed: u64) -> Vec<MassFunction> {
    let frame = Frame::indexed(classes).expect("valid frame size");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| random_mass(&frame, max_focal, &mut rng))
        .collect()
}

/// A synthetic 2-D dataset of `n` points.
pub fn dataset(kind: SyntheticKind, n: usize) -> RichDataset {
    generate_synthetic(&SyntheticSpec::new(kind, n, 0.05, 1)).expect("valid synthetic spec")
}

/// An evidential K-NN fitted on all of `data`.
pub fn eknn(data: &RichDataset) -> EknnModel {
    EknnModel::fit(
        data.features().clone(),
        data.label_masses(),
        EknnParams::default(),
    )
    .expect("valid training set")
}
