use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::hypothesis::{
    average_ranks, friedman_test, holm_adjust, wilcoxon_signed_rank, Alternative, TestResult,
};
use crate::error::{Error, Result};

/// Settings of the pairwise Wilcoxon–Holm comparison.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CdParams {
    pub alpha: f64,
    pub alternative: Alternative,
}

impl Default for CdParams {
    fn default() -> Self {
        CdParams {
            alpha: 0.05,
            alternative: Alternative::TwoSided,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairwiseTest {
    pub left: usize,
    pub right: usize,
    pub statistic: f64,
    pub p_value: f64,
    pub p_adjusted: f64,
    pub rejected: bool,
}

/// Average ranks and groups of statistically indistinguishable strategies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CDResult {
    pub strategies: Vec<String>,
    /// Mean rank per strategy over datasets, 1 = best.
    pub average_ranks: Vec<f64>,
    pub friedman: TestResult,
    pub pairwise: Vec<PairwiseTest>,
    /// Maximal sets of strategies with no rejected pair, members ordered by rank.
    pub cliques: Vec<Vec<usize>>,
    pub params: CdParams,
}

impl CDResult {
    /// Strategy indices from best to worst average rank.
    pub fn order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.strategies.len()).collect();
        order.sort_by(|&a, &b| {
            self.average_ranks[a]
                .total_cmp(&self.average_ranks[b])
                .then(a.cmp(&b))
        });
        order
    }

    pub fn rejected(&self, a: usize, b: usize) -> bool {
        self.pairwise
            .iter()
            .any(|t| ((t.left, t.right) == (a, b) || (t.left, t.right) == (b, a)) && t.rejected)
    }
}

/// Friedman test, pairwise Wilcoxon signed-rank tests with Holm correction, and
/// the resulting cliques for a critical-difference diagram.
///
/// `scores` is datasets × strategies with higher values better.
pub fn wilcoxon_holm_cd(
    strategies: &[String],
    scores: &[Vec<f64>],
    params: CdParams,
) -> Result<CDResult> {
    if !(params.alpha > 0.0 && params.alpha < 1.0) {
        return Err(Error::invalid(
            "alpha",
            format!("{} is outside (0, 1)", params.alpha),
        ));
    }
    let ranks = average_ranks(scores)?;
    let k = ranks.len();
    if strategies.len() != k {
        return Err(Error::LengthMismatch {
            left: strategies.len(),
            right: k,
        });
    }
    let friedman = friedman_test(scores)?;
    let column = |j: usize| scores.iter().map(|row| row[j]).collect::<Vec<_>>();

    let pairs: Vec<(usize, usize)> = (0..k)
        .flat_map(|a| (a + 1..k).map(move |b| (a, b)))
        .collect();
    let mut pairwise = pairs
        .into_par_iter()
        .map(|(a, b)| {
            let t = wilcoxon_signed_rank(&column(a), &column(b), params.alternative)?;
            Ok(PairwiseTest {
                left: a,
                right: b,
                statistic: t.statistic,
                p_value: t.p_value,
                p_adjusted: 0.0,
                rejected: false,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let raw: Vec<f64> = pairwise.iter().map(|t| t.p_value).collect();
    for (t, adj) in pairwise.iter_mut().zip(holm_adjust(&raw)) {
        t.p_adjusted = adj;
        t.rejected = adj < params.alpha;
    }

    let mut result = CDResult {
        strategies: strategies.to_vec(),
        average_ranks: ranks,
        friedman,
        pairwise,
        cliques: Vec::new(),
        params,
    };
    result.cliques = maximal_cliques(&result);
    Ok(result)
}

/// Bron–Kerbosch enumeration on the "not significantly different" graph.
fn maximal_cliques(result: &CDResult) -> Vec<Vec<usize>> {
    let order = result.order();
    let k = order.len();
    let adjacent: Vec<Vec<bool>> = (0..k)
        .map(|a| (0..k).map(|b| a != b && !result.rejected(a, b)).collect())
        .collect();
    let mut cliques = Vec::new();
    bron_kerbosch(
        &adjacent,
        &mut Vec::new(),
        order.clone(),
        Vec::new(),
        &mut cliques,
    );
    let position = |s: usize| order.iter().position(|&o| o == s).unwrap_or(usize::MAX);
    for clique in &mut cliques {
        clique.sort_by_key(|&s| position(s));
    }
    cliques.sort_by_key(|c: &Vec<usize>| (position(c[0]), std::cmp::Reverse(c.len())));
    cliques
}

fn bron_kerbosch(
    adjacent: &[Vec<bool>],
    current: &mut Vec<usize>,
    candidates: Vec<usize>,
    excluded: Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if candidates.is_empty() {
        if excluded.is_empty() {
            out.push(current.clone());
        }
        return;
    }
    let mut candidates = candidates;
    let mut excluded = excluded;
    while let Some(v) = candidates.first().copied() {
        let keep = |set: &[usize]| {
            set.iter()
                .copied()
                .filter(|&u| adjacent[v][u])
                .collect::<Vec<_>>()
        };
        current.push(v);
        bron_kerbosch(adjacent, current, keep(&candidates), keep(&excluded), out);
        current.pop();
        candidates.remove(0);
        excluded.push(v);
    }
}
