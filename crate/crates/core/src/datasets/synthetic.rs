//! Two-dimensional toy datasets reproducing the qualitative layouts of the
//! illustrative uncertainty maps: separable classes with linear, sinusoidal and
//! circular boundaries, plus rich-labelled variants with a region of ignorance
//! or imprecision.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::dataset::RichDataset;
use crate::belief::{FocalSet, Frame, MassFunction};
use crate::classifiers::FeatureMatrix;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SyntheticKind {
    Line,
    Sine,
    Circle,
    TwoBlobIgnorance,
    ThreeClassImprecise,
}

impl SyntheticKind {
    pub const ALL: [SyntheticKind; 5] = [
        SyntheticKind::Line,
        SyntheticKind::Sine,
        SyntheticKind::Circle,
        SyntheticKind::TwoBlobIgnorance,
        SyntheticKind::ThreeClassImprecise,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SyntheticKind::Line => "line",
            SyntheticKind::Sine => "sine",
            SyntheticKind::Circle => "circle",
            SyntheticKind::TwoBlobIgnorance => "two_blob_ignorance",
            SyntheticKind::ThreeClassImprecise => "three_class_imprecise",
        }
    }
}

impl fmt::Display for SyntheticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SyntheticKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SyntheticKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::invalid("kind", format!("unknown synthetic dataset `{s}`")))
    }
}

/// Parameters of a synthetic dataset. Generation is a pure function of this value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticSpec {
    pub kind: SyntheticKind,
    pub n: usize,
    /// Standard deviation of the jitter applied to the separable layouts, or of
    /// the blobs for the rich-labelled ones.
    pub noise: f64,
    pub seed: u64,
    /// Share of instances whose label is made imprecise (`three_class_imprecise`).
    pub imprecise_fraction: f64,
    /// Mass kept on the true class inside the ignorance / imprecision region; the
    /// rest goes to the class pair.
    pub singleton_mass: f64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            kind: SyntheticKind::Line,
            n: 200,
            noise: 0.05,
            seed: 0,
            imprecise_fraction: 0.2,
            singleton_mass: 0.5,
        }
    }
}

impl SyntheticSpec {
    pub fn new(kind: SyntheticKind, n: usize, noise: f64, seed: u64) -> Self {
        SyntheticSpec {
            kind,
            n,
            noise,
            seed,
            ..Default::default()
        }
    }
}

/// Lower edge of the band whose labels carry ignorance in `two_blob_ignorance`.
const IGNORANCE_BAND: f64 = 0.5;

pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<RichDataset> {
    if spec.n < 10 {
        return Err(Error::invalid(
            "n",
            format!("need at least 10 points, got {}", spec.n),
        ));
    }
    if !(spec.noise >= 0.0 && spec.noise.is_finite()) {
        return Err(Error::invalid(
            "noise",
            format!("{} is not a non-negative number", spec.noise),
        ));
    }
    if !(0.0..=1.0).contains(&spec.singleton_mass) {
        return Err(Error::invalid(
            "singleton_mass",
            format!("{} is outside [0, 1]", spec.singleton_mass),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    match spec.kind {
        SyntheticKind::Line => separable(spec, &mut rng, |x, y| y > x),
        SyntheticKind::Sine => separable(spec, &mut rng, |x, y| {
            y > 0.5 * (std::f64::consts::PI * x).sin()
        }),
        SyntheticKind::Circle => separable(spec, &mut rng, |x, y| x * x + y * y < 0.36),
        SyntheticKind::TwoBlobIgnorance => two_blob_ignorance(spec, &mut rng),
        SyntheticKind::ThreeClassImprecise => three_class_imprecise(spec, &mut rng),
    }
}

/// Balanced two-class sample on `[-1, 1]²` labelled by `boundary`; the jitter is
/// redrawn whenever it would carry a point across the boundary, so the classes
/// stay perfectly separated.
fn separable<F>(spec: &SyntheticSpec, rng: &mut ChaCha8Rng, boundary: F) -> Result<RichDataset>
where
    F: Fn(f64, f64) -> bool,
{
    let mut points = Vec::with_capacity(spec.n);
    let mut labels = Vec::with_capacity(spec.n);
    for i in 0..spec.n {
        let class = i % 2;
        let (x, y) = loop {
            let x = rng.random_range(-1.0..=1.0);
            let y = rng.random_range(-1.0..=1.0);
            if boundary(x, y) as usize == class {
                break (x, y);
            }
        };
        let mut p = [x, y];
        for _ in 0..8 {
            let jx = x + spec.noise * rng.sample::<f64, _>(StandardNormal);
            let jy = y + spec.noise * rng.sample::<f64, _>(StandardNormal);
            if boundary(jx, jy) as usize == class {
                p = [jx, jy];
                break;
            }
        }
        points.push(p);
        labels.push(class);
    }
    build(spec.kind.name(), 2, &points, labels, None)
}

/// Two Gaussian blobs; labels of points in the upper band `y > 0.5` are partly
/// ignorant: `m({true}) = s`, `m(Ω) = 1 - s`.
fn two_blob_ignorance(spec: &SyntheticSpec, rng: &mut ChaCha8Rng) -> Result<RichDataset> {
    let sd = 0.4 + spec.noise;
    let frame = Frame::indexed(2)?;
    let mut points = Vec::with_capacity(spec.n);
    let mut labels = Vec::with_capacity(spec.n);
    let mut rich = Vec::with_capacity(spec.n);
    for i in 0..spec.n {
        let class = i % 2;
        let cx = if class == 0 { -1.0 } else { 1.0 };
        let x = cx + sd * rng.sample::<f64, _>(StandardNormal);
        let y = sd * rng.sample::<f64, _>(StandardNormal);
        points.push([x, y]);
        labels.push(class);
        rich.push(if y > IGNORANCE_BAND {
            soft_label(&frame, class, frame.full_set(), spec.singleton_mass)?
        } else {
            MassFunction::categorical(frame.clone(), FocalSet::singleton(class))?
        });
    }
    build(spec.kind.name(), 2, &points, labels, Some(rich))
}

/// Three Gaussian blobs on a circle. Exactly `round(fraction · n)` instances of
/// classes 0 and 1, those closest to the bisector separating their blobs, get an
/// imprecise label `m({true}) = s`, `m({0, 1}) = 1 - s`.
fn three_class_imprecise(spec: &SyntheticSpec, rng: &mut ChaCha8Rng) -> Result<RichDataset> {
    let sd = 0.35 + spec.noise;
    let frame = Frame::indexed(3)?;
    let centers: Vec<[f64; 2]> = (0..3)
        .map(|c| {
            let angle = std::f64::consts::FRAC_PI_2 + c as f64 * 2.0 * std::f64::consts::PI / 3.0;
            [angle.cos(), angle.sin()]
        })
        .collect();
    let mut points = Vec::with_capacity(spec.n);
    let mut labels = Vec::with_capacity(spec.n);
    for i in 0..spec.n {
        let class = i % 3;
        let x = centers[class][0] + sd * rng.sample::<f64, _>(StandardNormal);
        let y = centers[class][1] + sd * rng.sample::<f64, _>(StandardNormal);
        points.push([x, y]);
        labels.push(class);
    }
    let candidates: Vec<usize> = (0..spec.n).filter(|&i| labels[i] < 2).collect();
    let count = (spec.imprecise_fraction * spec.n as f64).round() as usize;
    if !(0.0..=1.0).contains(&spec.imprecise_fraction) || count > candidates.len() {
        return Err(Error::invalid(
            "imprecise_fraction",
            format!(
                "{} exceeds the share of classes 0 and 1",
                spec.imprecise_fraction
            ),
        ));
    }
    // Distance to the bisector of the blob-0 / blob-1 centres.
    let (a, b) = (centers[0], centers[1]);
    let normal = [b[0] - a[0], b[1] - a[1]];
    let norm = (normal[0] * normal[0] + normal[1] * normal[1]).sqrt();
    let mid = [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
    let dist =
        |p: [f64; 2]| ((p[0] - mid[0]) * normal[0] + (p[1] - mid[1]) * normal[1]).abs() / norm;
    let mut ranked = candidates;
    ranked.sort_by(|&i, &j| dist(points[i]).total_cmp(&dist(points[j])).then(i.cmp(&j)));
    let mut imprecise = vec![false; spec.n];
    for &i in &ranked[..count] {
        imprecise[i] = true;
    }
    let pair = FocalSet::from_indices(&[0, 1]);
    let rich = (0..spec.n)
        .map(|i| {
            if imprecise[i] {
                soft_label(&frame, labels[i], pair, spec.singleton_mass)
            } else {
                MassFunction::categorical(frame.clone(), FocalSet::singleton(labels[i]))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    build(spec.kind.name(), 3, &points, labels, Some(rich))
}

fn soft_label(
    frame: &Frame,
    class: usize,
    wide: FocalSet,
    singleton_mass: f64,
) -> Result<MassFunction> {
    MassFunction::new(
        frame.clone(),
        [
            (FocalSet::singleton(class), singleton_mass),
            (wide, 1.0 - singleton_mass),
        ],
    )
}

fn build(
    name: &str,
    classes: usize,
    points: &[[f64; 2]],
    labels: Vec<usize>,
    rich: Option<Vec<MassFunction>>,
) -> Result<RichDataset> {
    let features = FeatureMatrix::from_rows(points)?;
    RichDataset::new(
        name,
        Frame::indexed(classes)?,
        vec!["x".into(), "y".into()],
        features,
        labels,
        rich,
    )
}

/// Stand-in for a 42-feature, 200-instance two-class rich-labelled dataset:
/// `two_blob_ignorance` embedded into 42 dimensions by a random orthonormal
/// 2-frame, plus small isotropic noise in the remaining directions.
pub fn dog2_surrogate(seed: u64) -> Result<RichDataset> {
    const DIM: usize = 42;
    let base = generate_synthetic(&SyntheticSpec {
        kind: SyntheticKind::TwoBlobIgnorance,
        n: 200,
        seed,
        ..Default::default()
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_d062);
    let mut u: Vec<f64> = (0..DIM).map(|_| rng.sample(StandardNormal)).collect();
    let mut v: Vec<f64> = (0..DIM).map(|_| rng.sample(StandardNormal)).collect();
    normalize(&mut u);
    let proj: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
    for (vi, ui) in v.iter_mut().zip(&u) {
        *vi -= proj * ui;
    }
    normalize(&mut v);
    let mut data = Vec::with_capacity(base.len() * DIM);
    for row in base.features().rows() {
        for d in 0..DIM {
            let noise: f64 = rng.sample(StandardNormal);
            data.push(row[0] * u[d] + row[1] * v[d] + 0.05 * noise);
        }
    }
    let features = FeatureMatrix::new(base.len(), DIM, data)?;
    RichDataset::new(
        "dog2",
        base.frame().clone(),
        (0..DIM).map(|d| format!("f{d}")).collect(),
        features,
        base.true_labels().to_vec(),
        base.rich_labels().map(<[_]>::to_vec),
    )
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in v {
        *x /= norm;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic() {
        for kind in SyntheticKind::ALL {
            let spec = SyntheticSpec::new(kind, 60, 0.1, 7);
            assert_eq!(
                generate_synthetic(&spec).unwrap(),
                generate_synthetic(&spec).unwrap()
            );
        }
        assert!(generate_synthetic(&SyntheticSpec::new(SyntheticKind::Line, 9, 0.1, 7)).is_err());
    }

    #[test]
    fn line_is_linearly_separable() {
        let ds = generate_synthetic(&SyntheticSpec::new(SyntheticKind::Line, 200, 0.1, 3)).unwrap();
        for (row, &c) in ds.features().rows().zip(ds.true_labels()) {
            assert_eq!((row[1] > row[0]) as usize, c);
        }
        assert_eq!(ds.class_counts(), vec![100, 100]);
    }

    #[test]
    fn imprecise_fraction_is_exact() {
        let spec = SyntheticSpec {
            imprecise_fraction: 0.25,
            ..SyntheticSpec::new(SyntheticKind::ThreeClassImprecise, 120, 0.0, 1)
        };
        let ds = generate_synthetic(&spec).unwrap();
        let imprecise = ds
            .rich_labels()
            .unwrap()
            .iter()
            .filter(|m| m.focal_elements().iter().any(|e| !e.0.is_singleton()))
            .count();
        assert_eq!(imprecise, 30);
    }

    #[test]
    fn ignorance_band_labels() {
        let ds = generate_synthetic(&SyntheticSpec::new(
            SyntheticKind::TwoBlobIgnorance,
            100,
            0.0,
            5,
        ))
        .unwrap();
        let rich = ds.rich_labels().unwrap();
        for (row, m) in ds.features().rows().zip(rich) {
            assert_eq!(row[1] > IGNORANCE_BAND, !m.is_bayesian());
        }
    }

    #[test]
    fn surrogate_shape() {
        let ds = dog2_surrogate(1).unwrap();
        assert_eq!((ds.len(), ds.n_features(), ds.n_classes()), (200, 42, 2));
        assert!(ds.has_rich_labels());
    }
}
