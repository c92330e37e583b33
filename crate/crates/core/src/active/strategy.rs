use std::fmt;

use rand::Rng;
use serde::de::{self, MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::belief::argmax_first;
use crate::classifiers::{EknnModel, FeatureMatrix, PknnModel};
use crate::error::{Error, Result};
use crate::scoring::{evidential_score, probabilistic_score, ScoreParams};
use crate::uncertainty::{KlirParams, UncertaintyKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    Random,
    Entropy,
    LeastConfidence,
    Klir,
    EvidEpistemic,
    RlEpistemic,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 6] = [
        StrategyKind::Random,
        StrategyKind::Entropy,
        StrategyKind::LeastConfidence,
        StrategyKind::Klir,
        StrategyKind::EvidEpistemic,
        StrategyKind::RlEpistemic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::Random => "random",
            StrategyKind::Entropy => "entropy",
            StrategyKind::LeastConfidence => "least_confidence",
            StrategyKind::Klir => "klir",
            StrategyKind::EvidEpistemic => "evid_epistemic",
            StrategyKind::RlEpistemic => "rl_epistemic",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        StrategyKind::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Measure maximized by the strategy; `None` for random sampling.
    pub fn measure(self) -> Option<UncertaintyKind> {
        match self {
            StrategyKind::Random => None,
            StrategyKind::Entropy => Some(UncertaintyKind::Entropy),
            StrategyKind::LeastConfidence => Some(UncertaintyKind::LeastConfidence),
            StrategyKind::Klir => Some(UncertaintyKind::Klir),
            StrategyKind::EvidEpistemic => Some(UncertaintyKind::EvidEpistemic),
            StrategyKind::RlEpistemic => Some(UncertaintyKind::RlEpistemic),
        }
    }
}

/// Model whose class probabilities feed the entropy and least-confidence strategies.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbabilitySource {
    /// Pignistic probability of the evidential K-NN output.
    #[default]
    Evidential,
    /// Distance-weighted probabilistic K-NN.
    Probabilistic,
}

/// A query rule. The Klir weight is present exactly when the kind is `klir`.
///
/// Deserializes from a bare name (`"klir"` takes the default λ = 0.2), a name with
/// the weight (`"klir(0.3)"`), or an object
/// `{"kind": "klir", "klir_lambda": 0.3, "probabilities": "evidential"}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QueryStrategy {
    kind: StrategyKind,
    klir: Option<KlirParams>,
    probabilities: ProbabilitySource,
}

impl QueryStrategy {
    pub fn new(kind: StrategyKind) -> Self {
        let klir = (kind == StrategyKind::Klir).then(KlirParams::default);
        QueryStrategy {
            kind,
            klir,
            probabilities: ProbabilitySource::default(),
        }
    }

    pub fn random() -> Self {
        QueryStrategy::new(StrategyKind::Random)
    }

    pub fn klir(lambda: f64) -> Result<Self> {
        Ok(QueryStrategy {
            kind: StrategyKind::Klir,
            klir: Some(KlirParams::new(lambda)?),
            probabilities: ProbabilitySource::default(),
        })
    }

    pub fn with_probabilities(mut self, source: ProbabilitySource) -> Result<Self> {
        if source != ProbabilitySource::Evidential
            && !matches!(
                self.kind,
                StrategyKind::Entropy | StrategyKind::LeastConfidence
            )
        {
            return Err(Error::invalid(
                "probabilities",
                format!(
                    "only entropy and least_confidence can use another model, not {}",
                    self.kind.name()
                ),
            ));
        }
        self.probabilities = source;
        Ok(self)
    }

    pub fn kind(&self) -> StrategyKind {
        self.kind
    }

    pub fn klir_lambda(&self) -> Option<f64> {
        self.klir.map(KlirParams::lambda)
    }

    pub fn probabilities(&self) -> ProbabilitySource {
        self.probabilities
    }

    /// Short display name, e.g. `random`, `klir(0.2)`, `entropy[pknn]`.
    pub fn label(&self) -> String {
        let mut s = match self.klir {
            Some(p) => format!("klir({})", p.lambda()),
            None => self.kind.name().to_string(),
        };
        if self.probabilities == ProbabilitySource::Probabilistic {
            s.push_str("[pknn]");
        }
        s
    }

    /// Parses the string forms accepted by deserialization.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let (body, source) = match text.strip_suffix("[pknn]") {
            Some(b) => (b, ProbabilitySource::Probabilistic),
            None => (text, ProbabilitySource::Evidential),
        };
        let unknown = || Error::invalid("strategy", format!("unknown strategy `{text}`"));
        let strategy = match body.strip_prefix("klir(").and_then(|r| r.strip_suffix(')')) {
            Some(lambda) => {
                let lambda: f64 = lambda.trim().parse().map_err(|_| unknown())?;
                QueryStrategy::klir(lambda)?
            }
            None => QueryStrategy::new(StrategyKind::parse(body).ok_or_else(unknown)?),
        };
        strategy.with_probabilities(source)
    }

    pub(crate) fn score_params(&self, rl_resolution: usize) -> ScoreParams {
        ScoreParams {
            klir: self.klir.unwrap_or_default(),
            rl_resolution,
        }
    }
}

impl fmt::Display for QueryStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StrategyObject {
    kind: StrategyKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    klir_lambda: Option<KlirParams>,
    #[serde(default, skip_serializing_if = "is_default_source")]
    probabilities: ProbabilitySource,
}

fn is_default_source(s: &ProbabilitySource) -> bool {
    *s == ProbabilitySource::default()
}

impl TryFrom<StrategyObject> for QueryStrategy {
    type Error = Error;

    fn try_from(raw: StrategyObject) -> Result<Self> {
        let strategy = match (raw.kind, raw.klir_lambda) {
            (StrategyKind::Klir, lambda) => QueryStrategy {
                kind: StrategyKind::Klir,
                klir: Some(lambda.unwrap_or_default()),
                probabilities: ProbabilitySource::default(),
            },
            (kind, None) => QueryStrategy::new(kind),
            (kind, Some(_)) => {
                return Err(Error::invalid(
                    "klir_lambda",
                    format!("only allowed for the klir strategy, not {}", kind.name()),
                ))
            }
        };
        strategy.with_probabilities(raw.probabilities)
    }
}

impl Serialize for QueryStrategy {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        StrategyObject {
            kind: self.kind,
            klir_lambda: self.klir,
            probabilities: self.probabilities,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for QueryStrategy {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct StrategyVisitor;

        impl<'de> Visitor<'de> for StrategyVisitor {
            type Value = QueryStrategy;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(
                    "a strategy name such as \"klir(0.2)\" or an object with a `kind` field",
                )
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<QueryStrategy, E> {
                QueryStrategy::parse(v).map_err(E::custom)
            }

            fn visit_map<A: MapAccess<'de>>(
                self,
                map: A,
            ) -> std::result::Result<QueryStrategy, A::Error> {
                let raw = StrategyObject::deserialize(de::value::MapAccessDeserializer::new(map))?;
                QueryStrategy::try_from(raw).map_err(de::Error::custom)
            }
        }

        deserializer.deserialize_any(StrategyVisitor)
    }
}

/// The models fitted on the current labeled set.
#[derive(Clone, Debug)]
pub struct Learner {
    pub eknn: EknnModel,
    /// Only needed by strategies reading probabilistic K-NN outputs.
    pub pknn: Option<PknnModel>,
    pub rl_resolution: usize,
}

/// Score of every pool row under `strategy` (not defined for random sampling).
pub fn pool_scores(
    strategy: &QueryStrategy,
    learner: &Learner,
    pool: &FeatureMatrix,
) -> Result<Vec<f64>> {
    let measure = strategy
        .kind
        .measure()
        .ok_or_else(|| Error::invalid("strategy", "random sampling has no scores"))?;
    let params = strategy.score_params(learner.rl_resolution);
    match strategy.probabilities {
        ProbabilitySource::Probabilistic => {
            let pknn = learner
                .pknn
                .as_ref()
                .ok_or_else(|| Error::invalid("strategy", "probabilistic K-NN was not fitted"))?;
            pool.rows()
                .map(|x| probabilistic_score(pknn, x, measure))
                .collect()
        }
        ProbabilitySource::Evidential => pool
            .rows()
            .map(|x| evidential_score(&learner.eknn, x, measure, &params))
            .collect(),
    }
}

/// Pool row to query next: a uniform draw for random sampling, otherwise the
/// most uncertain row (lowest row on ties).
pub fn select_query<R: Rng + ?Sized>(
    strategy: &QueryStrategy,
    learner: &Learner,
    pool: &FeatureMatrix,
    rng: &mut R,
) -> Result<usize> {
    if pool.n_rows() == 0 {
        return Err(Error::EmptyPool);
    }
    if strategy.kind == StrategyKind::Random {
        return Ok(rng.random_range(0..pool.n_rows()));
    }
    Ok(argmax_first(&pool_scores(strategy, learner, pool)?))
}

/// The `b` rows with the highest scores, ties to the lowest row.
pub fn top_scores(scores: &[f64], b: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&i, &j| scores[j].total_cmp(&scores[i]).then(i.cmp(&j)));
    order.truncate(b);
    order
}
