use serde::{Deserialize, Serialize};

use super::frame::{FocalSet, Frame};
use super::probability::ProbabilityVector;
use crate::error::{Error, Result};

/// Tolerance on the total mass of a constructed mass function.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// Combination is refused once the non-conflicting mass drops below this.
const MIN_NORMALIZER: f64 = 1e-12;

/// A normalized mass function on a frame, stored sparsely as its focal elements.
///
/// Invariants: focal elements are sorted by bitmask, unique, non-empty, carry a
/// strictly positive mass, and the masses sum to 1 within [`MASS_TOLERANCE`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMass", into = "RawMass")]
pub struct MassFunction {
    frame: Frame,
    focal: Vec<(FocalSet, f64)>,
}

impl MassFunction {
    /// Builds a mass function from `(subset, mass)` pairs. Duplicate subsets are
    /// summed and zero masses dropped; the total must be 1 within [`MASS_TOLERANCE`].
    pub fn new<I>(frame: Frame, assignments: I) -> Result<Self>
    where
        I: IntoIterator<Item = (FocalSet, f64)>,
    {
        let focal = canonical_entries(&frame, assignments)?;
        let sum: f64 = focal.iter().map(|e| e.1).sum();
        if (sum - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::SumNotOne { sum });
        }
        Ok(MassFunction { frame, focal })
    }

    /// Like [`MassFunction::new`], but a total within `tolerance` of 1 is rescaled
    /// to exactly 1 instead of rejected. Meant for noisy label files.
    pub fn new_renormalized<I>(frame: Frame, assignments: I, tolerance: f64) -> Result<Self>
    where
        I: IntoIterator<Item = (FocalSet, f64)>,
    {
        let mut focal = canonical_entries(&frame, assignments)?;
        let sum: f64 = focal.iter().map(|e| e.1).sum();
        if !(sum - 1.0).abs().le(&tolerance.max(MASS_TOLERANCE)) {
            return Err(Error::SumNotOne { sum });
        }
        if (sum - 1.0).abs() > MASS_TOLERANCE {
            for entry in &mut focal {
                entry.1 /= sum;
            }
        }
        Ok(MassFunction { frame, focal })
    }

    /// Total ignorance: all mass on the whole frame.
    pub fn vacuous(frame: Frame) -> Self {
        let full = frame.full_set();
        MassFunction {
            frame,
            focal: vec![(full, 1.0)],
        }
    }

    /// A single focal element with mass 1.
    pub fn categorical(frame: Frame, set: FocalSet) -> Result<Self> {
        MassFunction::new(frame, [(set, 1.0)])
    }

    /// Mass function whose focal elements are the singletons, one per probability.
    pub fn bayesian(frame: Frame, probabilities: &[f64]) -> Result<Self> {
        if probabilities.len() != frame.len() {
            return Err(Error::DimensionMismatch {
                expected: frame.len(),
                got: probabilities.len(),
            });
        }
        let entries = probabilities
            .iter()
            .enumerate()
            .map(|(i, &p)| (FocalSet::singleton(i), p))
            .collect::<Vec<_>>();
        MassFunction::new(frame, entries)
    }

    /// Trusted constructor for combination results: merges duplicates, prunes zeros
    /// and rescales when floating-point drift moved the total away from 1.
    fn from_accumulated(frame: Frame, mut entries: Vec<(FocalSet, f64)>) -> Self {
        entries.sort_by_key(|e| e.0);
        let mut focal: Vec<(FocalSet, f64)> = Vec::with_capacity(entries.len());
        for (set, mass) in entries {
            match focal.last_mut() {
                Some(last) if last.0 == set => last.1 += mass,
                _ => focal.push((set, mass)),
            }
        }
        focal.retain(|e| e.1 > 0.0);
        let sum: f64 = focal.iter().map(|e| e.1).sum();
        if (sum - 1.0).abs() > 4.0 * f64::EPSILON {
            for entry in &mut focal {
                entry.1 /= sum;
            }
        }
        MassFunction { frame, focal }
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    /// Focal elements with their masses, sorted by bitmask.
    pub fn focal_elements(&self) -> &[(FocalSet, f64)] {
        &self.focal
    }

    pub fn mass(&self, set: FocalSet) -> f64 {
        self.focal
            .binary_search_by_key(&set, |e| e.0)
            .map(|i| self.focal[i].1)
            .unwrap_or(0.0)
    }

    pub fn is_bayesian(&self) -> bool {
        self.focal.iter().all(|e| e.0.is_singleton())
    }

    pub fn is_vacuous(&self) -> bool {
        self.focal.len() == 1 && self.focal[0].0 == self.frame.full_set()
    }

    /// Pignistic transform: each focal mass is shared equally among its members.
    pub fn betp(&self) -> ProbabilityVector {
        let mut p = vec![0.0; self.frame.len()];
        for &(set, mass) in &self.focal {
            let share = mass / set.len() as f64;
            for i in set.indices() {
                p[i] += share;
            }
        }
        ProbabilityVector::from_raw(self.frame.clone(), p)
    }

    /// Pignistic probability of a subset, i.e. the sum of `betp` over its members.
    pub fn betp_subset(&self, set: FocalSet) -> Result<f64> {
        self.check_query(set)?;
        let p = self.betp();
        Ok(set.indices().map(|i| p.get(i)).sum())
    }

    /// Belief: total mass of the non-empty subsets of `set`.
    pub fn bel(&self, set: FocalSet) -> Result<f64> {
        self.check_query(set)?;
        Ok(self.bel_unchecked(set))
    }

    /// Plausibility: total mass of the focal elements intersecting `set`.
    pub fn pl(&self, set: FocalSet) -> Result<f64> {
        self.check_query(set)?;
        Ok(self.pl_unchecked(set))
    }

    pub(crate) fn bel_unchecked(&self, set: FocalSet) -> f64 {
        self.focal
            .iter()
            .filter(|e| e.0.is_subset_of(set))
            .map(|e| e.1)
            .sum()
    }

    pub(crate) fn pl_unchecked(&self, set: FocalSet) -> f64 {
        self.focal
            .iter()
            .filter(|e| e.0.intersects(set))
            .map(|e| e.1)
            .sum()
    }

    fn check_query(&self, set: FocalSet) -> Result<()> {
        if set.is_empty() {
            return Err(Error::EmptyFocal);
        }
        self.frame.check(set)
    }

    /// Classical discounting with reliability `alpha`: the removed mass moves to
    /// the whole frame.
    ///
    /// Panics if `alpha` is outside `[0, 1]`.
    pub fn discount(&self, alpha: f64) -> MassFunction {
        assert!(
            (0.0..=1.0).contains(&alpha),
            "discount rate {alpha} outside [0, 1]"
        );
        let full = self.frame.full_set();
        let mut focal = Vec::with_capacity(self.focal.len() + 1);
        let mut full_mass = 1.0 - alpha;
        for &(set, mass) in &self.focal {
            if set == full {
                full_mass += alpha * mass;
            } else if alpha * mass > 0.0 {
                focal.push((set, alpha * mass));
            }
        }
        // The whole frame has the largest bitmask, so pushing it last keeps the order.
        if full_mass > 0.0 {
            focal.push((full, full_mass));
        }
        MassFunction {
            frame: self.frame.clone(),
            focal,
        }
    }

    /// Dempster's rule: conjunctive combination followed by normalization.
    pub fn combine_dempster(&self, other: &MassFunction) -> Result<MassFunction> {
        if self.frame != other.frame {
            return Err(Error::FrameMismatch);
        }
        let mut entries = Vec::with_capacity(self.focal.len() * other.focal.len());
        let mut agreeing = 0.0;
        for &(a, ma) in &self.focal {
            for &(b, mb) in &other.focal {
                let c = a.intersection(b);
                if !c.is_empty() {
                    let m = ma * mb;
                    agreeing += m;
                    entries.push((c, m));
                }
            }
        }
        if agreeing <= MIN_NORMALIZER {
            return Err(Error::TotalConflict {
                conflict: 1.0 - agreeing,
            });
        }
        for entry in &mut entries {
            entry.1 /= agreeing;
        }
        Ok(MassFunction::from_accumulated(self.frame.clone(), entries))
    }

    /// Degree of conflict between two sources, `m1 ∩ m2` mass landing on the empty set.
    pub fn conflict_with(&self, other: &MassFunction) -> Result<f64> {
        if self.frame != other.frame {
            return Err(Error::FrameMismatch);
        }
        let mut conflict = 0.0;
        for &(a, ma) in &self.focal {
            for &(b, mb) in &other.focal {
                if !a.intersects(b) {
                    conflict += ma * mb;
                }
            }
        }
        Ok(conflict)
    }
}

fn canonical_entries<I>(frame: &Frame, assignments: I) -> Result<Vec<(FocalSet, f64)>>
where
    I: IntoIterator<Item = (FocalSet, f64)>,
{
    let mut entries = Vec::new();
    for (set, mass) in assignments {
        if !mass.is_finite() || mass < 0.0 {
            return Err(Error::NegativeMass { value: mass });
        }
        frame.check(set)?;
        if set.is_empty() {
            if mass > 0.0 {
                return Err(Error::EmptyFocal);
            }
            continue;
        }
        entries.push((set, mass));
    }
    entries.sort_by_key(|e| e.0);
    let mut focal: Vec<(FocalSet, f64)> = Vec::with_capacity(entries.len());
    for (set, mass) in entries {
        match focal.last_mut() {
            Some(last) if last.0 == set => last.1 += mass,
            _ => focal.push((set, mass)),
        }
    }
    focal.retain(|e| e.1 > 0.0);
    Ok(focal)
}

/// `make_mass`: checked construction from `(subset, mass)` pairs.
pub fn make_mass(frame: &Frame, assignments: &[(FocalSet, f64)]) -> Result<MassFunction> {
    MassFunction::new(frame.clone(), assignments.iter().copied())
}

/// Dempster's rule of combination for two sources.
pub fn dempster_combine(m1: &MassFunction, m2: &MassFunction) -> Result<MassFunction> {
    m1.combine_dempster(m2)
}

/// Averages mass functions focal set by focal set.
///
/// A focal set on which every source agrees keeps that exact value.
pub fn mean_combine(masses: &[MassFunction]) -> Result<MassFunction> {
    let first = masses.first().ok_or(Error::EmptyList)?;
    if masses.iter().any(|m| m.frame != first.frame) {
        return Err(Error::FrameMismatch);
    }
    let n = masses.len() as f64;
    let mut sets: Vec<FocalSet> = masses
        .iter()
        .flat_map(|m| m.focal.iter().map(|e| e.0))
        .collect();
    sets.sort_unstable();
    sets.dedup();
    let focal = sets
        .into_iter()
        .map(|set| {
            let values: Vec<f64> = masses.iter().map(|m| m.mass(set)).collect();
            let mean = if values.iter().all(|&v| v == values[0]) {
                values[0]
            } else {
                values.iter().sum::<f64>() / n
            };
            (set, mean)
        })
        .filter(|e| e.1 > 0.0)
        .collect();
    Ok(MassFunction {
        frame: first.frame.clone(),
        focal,
    })
}

#[derive(Serialize, Deserialize)]
struct RawMass {
    frame: Frame,
    focal: Vec<(Vec<usize>, f64)>,
}

impl From<MassFunction> for RawMass {
    fn from(m: MassFunction) -> Self {
        RawMass {
            focal: m
                .focal
                .iter()
                .map(|(s, v)| (s.indices().collect(), *v))
                .collect(),
            frame: m.frame,
        }
    }
}

impl TryFrom<RawMass> for MassFunction {
    type Error = Error;

    fn try_from(raw: RawMass) -> Result<Self> {
        let entries = raw
            .focal
            .iter()
            .map(|(idx, v)| Ok((raw.frame.subset(idx)?, *v)))
            .collect::<Result<Vec<_>>>()?;
        MassFunction::new(raw.frame, entries)
    }
}
