use std::path::PathBuf;

use anyhow::Result;
use evidal_core::classifiers::{EknnModel, EknnParams, GammaMode, PknnModel};
use evidal_core::datasets::{
    generate_synthetic, landscape, Bounds, LandscapeModel, SyntheticKind, SyntheticSpec,
};
use evidal_core::scoring::ScoreParams;
use evidal_core::uncertainty::{KlirParams, UncertaintyKind};

use crate::error::ValidationError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Classifier {
    #[default]
    Evidential,
    Probabilistic,
}

#[derive(Clone, Debug)]
pub struct LandscapeArgs {
    pub kind: SyntheticKind,
    pub measure: UncertaintyKind,
    pub lambda: f64,
    pub resolution: usize,
    pub n: usize,
    pub noise: f64,
    pub seed: u64,
    pub k: usize,
    pub alpha0: f64,
    pub gamma: Option<f64>,
    pub classifier: Classifier,
    pub margin: f64,
    pub rl_resolution: usize,
    pub out: PathBuf,
}

/// Trains on a synthetic 2-D sample and rasterizes `measure`; writes
/// `<kind>_<measure>.csv` and `.pgm` under `out`. Returns the two paths.
pub fn run(args: LandscapeArgs) -> Result<(PathBuf, PathBuf)> {
    let invalid = |e: evidal_core::Error| ValidationError(e.to_string());
    let klir = KlirParams::new(args.lambda).map_err(invalid)?;
    let spec = SyntheticSpec::new(args.kind, args.n, args.noise, args.seed);
    let data = generate_synthetic(&spec).map_err(invalid)?;
    let bounds = Bounds::around(data.features().rows(), args.margin).map_err(invalid)?;
    let params = ScoreParams {
        klir,
        rl_resolution: args.rl_resolution,
    };

    let raster = match args.classifier {
        Classifier::Evidential => {
            let gamma = args.gamma.map_or(GammaMode::Auto, GammaMode::Fixed);
            let eknn_params = EknnParams {
                k: args.k,
                alpha0: args.alpha0,
                gamma,
            };
            let model = EknnModel::fit(data.features().clone(), data.label_masses(), eknn_params)
                .map_err(invalid)?;
            landscape(
                LandscapeModel::Evidential(&model),
                bounds,
                args.resolution,
                args.measure,
                &params,
            )
        }
        Classifier::Probabilistic => {
            if !matches!(
                args.measure,
                UncertaintyKind::Entropy | UncertaintyKind::LeastConfidence
            ) {
                return Err(ValidationError(format!(
                    "the probabilistic classifier supports entropy and least_confidence, not {}",
                    args.measure.name()
                ))
                .into());
            }
            let model = PknnModel::fit(
                data.features().clone(),
                data.true_labels().to_vec(),
                data.frame().clone(),
                args.k,
            )
            .map_err(invalid)?;
            landscape(
                LandscapeModel::Probabilistic(&model),
                bounds,
                args.resolution,
                args.measure,
                &params,
            )
        }
    }
    .map_err(|e| match e {
        e @ (evidal_core::Error::InvalidParameter { .. }
        | evidal_core::Error::UnsupportedStrategy { .. }) => {
            anyhow::Error::from(ValidationError(e.to_string()))
        }
        e => e.into(),
    })?;

    std::fs::create_dir_all(&args.out)?;
    let stem = format!("{}_{}", args.kind.name(), args.measure.name());
    let csv = args.out.join(format!("{stem}.csv"));
    let pgm = args.out.join(format!("{stem}.pgm"));
    raster.write_csv(&csv)?;
    raster.write_pgm(&pgm)?;
    let (lo, hi) = raster.min_max();
    println!(
        "{} ({}x{}, range {lo:.4}..{hi:.4})",
        csv.display(),
        args.resolution,
        args.resolution
    );
    println!("{}", pgm.display());
    Ok((csv, pgm))
}
