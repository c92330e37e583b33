use rand::Rng;

use super::frame::{FocalSet, Frame};
use super::mass::MassFunction;

/// A random mass function with 1 to `max_focal` focal sets drawn uniformly from
/// the non-empty subsets of `frame`, and uniform random weights.
pub fn random_mass<R: Rng + ?Sized>(frame: &Frame, max_focal: usize, rng: &mut R) -> MassFunction {
    let subsets = (1u64 << frame.len()) - 1;
    let count = rng.random_range(1..=max_focal.max(1));
    let entries: Vec<(FocalSet, f64)> = (0..count)
        .map(|_| {
            let bits = rng.random_range(1..=subsets) as u32;
            (FocalSet::from_bits(bits), rng.random_range(0.01..1.0))
        })
        .collect();
    normalized(frame, entries)
}

/// A random Bayesian mass function (singleton focal sets only).
pub fn random_bayesian<R: Rng + ?Sized>(frame: &Frame, rng: &mut R) -> MassFunction {
    let entries: Vec<(FocalSet, f64)> = (0..frame.len())
        .map(|i| (FocalSet::singleton(i), rng.random_range(0.01..1.0)))
        .collect();
    normalized(frame, entries)
}

fn normalized(frame: &Frame, mut entries: Vec<(FocalSet, f64)>) -> MassFunction {
    let total: f64 = entries.iter().map(|e| e.1).sum();
    for e in &mut entries {
        e.1 /= total;
    }
    MassFunction::new_renormalized(frame.clone(), entries, 1e-6)
        .expect("weights are positive and normalized")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_masses_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let frame = Frame::indexed(4).unwrap();
        for _ in 0..200 {
            let m = random_mass(&frame, 5, &mut rng);
            assert!(m.focal_elements().len() <= 5);
            let total: f64 = m.focal_elements().iter().map(|e| e.1).sum();
            assert!((total - 1.0).abs() < 1e-9);
            assert!(random_bayesian(&frame, &mut rng).is_bayesian());
        }
    }
}
