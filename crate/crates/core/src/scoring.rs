//! Uncertainty scores of a fitted model at a query point.

use serde::{Deserialize, Serialize};

use crate::belief::MassFunction;
use crate::classifiers::{EknnModel, PknnModel};
use crate::error::{Error, Result};
use crate::uncertainty::{self as u, KlirParams, UncertaintyKind, DEFAULT_RL_RESOLUTION};

/// Parameters of the measures that have any.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScoreParams {
    pub klir: KlirParams,
    pub rl_resolution: usize,
}

impl Default for ScoreParams {
    fn default() -> Self {
        ScoreParams {
            klir: KlirParams::default(),
            rl_resolution: DEFAULT_RL_RESOLUTION,
        }
    }
}

/// Score of a mass-function output. Probabilistic measures use its pignistic
/// probability. The relative-likelihood measures need neighbour information and
/// are not available here.
pub fn mass_score(m: &MassFunction, kind: UncertaintyKind, params: &ScoreParams) -> Option<f64> {
    let value = match kind {
        UncertaintyKind::Entropy => u::shannon_entropy(&m.betp()).value,
        UncertaintyKind::LeastConfidence => u::least_confidence(&m.betp()).value,
        UncertaintyKind::Discord => u::discord(m).value,
        UncertaintyKind::Nonspecificity => u::nonspecificity(m).value,
        UncertaintyKind::Klir => u::klir(m, params.klir).value,
        UncertaintyKind::EvidEpistemic => u::evidential_epistemic_aleatoric(m).0.value,
        UncertaintyKind::EvidAleatoric => u::evidential_epistemic_aleatoric(m).1.value,
        UncertaintyKind::RlEpistemic | UncertaintyKind::RlAleatoric => return None,
    };
    Some(value)
}

/// Score of the evidential K-NN at `x`.
pub fn evidential_score(
    model: &EknnModel,
    x: &[f64],
    kind: UncertaintyKind,
    params: &ScoreParams,
) -> Result<f64> {
    match kind {
        UncertaintyKind::RlEpistemic | UncertaintyKind::RlAleatoric => {
            let (p, n) = weighted_counts(model, x)?;
            let (e, a) = u::epistemic_binary_relative_likelihood(p, n, params.rl_resolution)?;
            Ok(if kind == UncertaintyKind::RlEpistemic {
                e.value
            } else {
                a.value
            })
        }
        _ => {
            let m = model.predict_mass(x)?;
            Ok(mass_score(&m, kind, params).expect("mass-based measure"))
        }
    }
}

/// Distance-weighted positive / negative counts among the neighbours of `x`
/// (binary frames only): each neighbour adds `exp(-γ d²)` split according to
/// the pignistic probability of its label, class 1 being the positive class.
pub fn weighted_counts(model: &EknnModel, x: &[f64]) -> Result<(f64, f64)> {
    if model.frame().len() != 2 {
        return Err(Error::UnsupportedStrategy {
            strategy: UncertaintyKind::RlEpistemic.name().into(),
            classes: model.frame().len(),
        });
    }
    let (mut p, mut n) = (0.0, 0.0);
    for nb in model.neighbors(x)? {
        let w = (-model.gamma() * nb.squared_distance).exp();
        let bet = model.labels()[nb.index].betp();
        p += w * bet.get(1);
        n += w * bet.get(0);
    }
    Ok((p, n))
}

/// Score of the probabilistic K-NN at `x`; only entropy and least confidence apply.
pub fn probabilistic_score(model: &PknnModel, x: &[f64], kind: UncertaintyKind) -> Result<f64> {
    let p = model.predict_proba(x)?;
    match kind {
        UncertaintyKind::Entropy => Ok(u::shannon_entropy(&p).value),
        UncertaintyKind::LeastConfidence => Ok(u::least_confidence(&p).value),
        other => Err(Error::invalid(
            "measure",
            format!("`{other}` needs an evidential model, the probabilistic K-NN only supports entropy and least_confidence"),
        )),
    }
}
