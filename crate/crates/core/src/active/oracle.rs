use serde::{Deserialize, Serialize};

use crate::belief::MassFunction;
use crate::datasets::RichDataset;
use crate::error::{Error, Result};

/// What the simulated oracle returns when asked for a label.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelMode {
    /// Categorical mass on the ground-truth class.
    #[default]
    Crisp,
    /// The rich label stored with the instance.
    Rich,
}

/// Simulated labeler that reveals each instance at most once.
#[derive(Clone, Debug)]
pub struct Oracle<'a> {
    dataset: &'a RichDataset,
    mode: LabelMode,
    revealed: Vec<bool>,
}

impl<'a> Oracle<'a> {
    pub fn new(dataset: &'a RichDataset, mode: LabelMode) -> Self {
        Oracle {
            dataset,
            mode,
            revealed: vec![false; dataset.len()],
        }
    }

    pub fn is_revealed(&self, index: usize) -> bool {
        self.revealed[index]
    }

    pub fn reveal(&mut self, index: usize) -> Result<MassFunction> {
        if self.revealed[index] {
            return Err(Error::AlreadyLabeled(index));
        }
        let label = oracle_reveal(self.dataset, index, self.mode)?;
        self.revealed[index] = true;
        Ok(label)
    }
}

/// Label of instance `index` under `mode`, without bookkeeping.
pub fn oracle_reveal(dataset: &RichDataset, index: usize, mode: LabelMode) -> Result<MassFunction> {
    match mode {
        LabelMode::Crisp => Ok(dataset.crisp_mass(index)),
        LabelMode::Rich => dataset
            .rich_labels()
            .map(|labels| labels[index].clone())
            .ok_or_else(|| Error::NoRichLabel(dataset.name().to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::belief::{FocalSet, Frame};
    use crate::classifiers::FeatureMatrix;

    fn dataset(rich: bool) -> RichDataset {
        let frame = Frame::indexed(3).unwrap();
        let x = FeatureMatrix::from_rows(&[[0.0], [1.0]]).unwrap();
        let labels = rich.then(|| {
            vec![
                MassFunction::new(
                    frame.clone(),
                    [(FocalSet::singleton(0), 0.7), (frame.full_set(), 0.3)],
                )
                .unwrap(),
                MassFunction::vacuous(frame.clone()),
            ]
        });
        RichDataset::new("toy", frame, vec!["x".into()], x, vec![0, 2], labels).unwrap()
    }

    #[test]
    fn crisp_and_rich_reveal() {
        let crisp = dataset(false);
        let m = oracle_reveal(&crisp, 1, LabelMode::Crisp).unwrap();
        assert_eq!(m.mass(FocalSet::singleton(2)), 1.0);
        assert_eq!(
            oracle_reveal(&crisp, 0, LabelMode::Rich),
            Err(Error::NoRichLabel("toy".into()))
        );

        let rich = dataset(true);
        let m = oracle_reveal(&rich, 0, LabelMode::Rich).unwrap();
        assert_eq!(m, rich.rich_labels().unwrap()[0]);
    }

    #[test]
    fn reveals_once() {
        let ds = dataset(false);
        let mut oracle = Oracle::new(&ds, LabelMode::Crisp);
        oracle.reveal(1).unwrap();
        assert!(oracle.is_revealed(1));
        assert_eq!(oracle.reveal(1), Err(Error::AlreadyLabeled(1)));
    }
}
