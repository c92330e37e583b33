use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported frame. Focal sets are stored as `u32` bitmasks.
pub const MAX_CLASSES: usize = 20;

/// Frame of discernment: the ordered, exhaustive set of class labels.
///
/// Cloning is cheap (the label list is shared).
#[derive(Clone)]
pub struct Frame {
    labels: Arc<[String]>,
}

impl Frame {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() < 2 || labels.len() > MAX_CLASSES {
            return Err(Error::InvalidFrame(format!(
                "expected between 2 and {MAX_CLASSES} classes, got {}",
                labels.len()
            )));
        }
        for (i, label) in labels.iter().enumerate() {
            if label.is_empty() {
                return Err(Error::InvalidFrame("class labels must be non-empty".into()));
            }
            if labels[..i].contains(label) {
                return Err(Error::InvalidFrame(format!(
                    "duplicate class label `{label}`"
                )));
            }
        }
        Ok(Frame {
            labels: labels.into(),
        })
    }

    /// Frame with labels `"0"`, `"1"`, ..., handy for tests and synthetic data.
    pub fn indexed(size: usize) -> Result<Self> {
        Frame::new((0..size).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn full_set(&self) -> FocalSet {
        FocalSet::full(self.len())
    }

    /// Checked construction of a subset from class indices.
    pub fn subset(&self, indices: &[usize]) -> Result<FocalSet> {
        let mut bits = 0u32;
        for &i in indices {
            if i >= self.len() {
                return Err(Error::BadSubset {
                    index: i,
                    frame_size: self.len(),
                });
            }
            bits |= 1 << i;
        }
        Ok(FocalSet(bits))
    }

    pub fn singleton(&self, index: usize) -> Result<FocalSet> {
        self.subset(&[index])
    }

    /// Fails with `BadSubset` if `set` mentions an index outside the frame.
    pub fn check(&self, set: FocalSet) -> Result<()> {
        let outside = set.0 & !self.full_set().0;
        if outside != 0 {
            return Err(Error::BadSubset {
                index: outside.trailing_zeros() as usize,
                frame_size: self.len(),
            });
        }
        Ok(())
    }
}

impl PartialEq for Frame {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.labels, &other.labels) || self.labels == other.labels
    }
}

impl Eq for Frame {}

impl fmt::Debug for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Frame").field(&self.labels).finish()
    }
}

impl Serialize for Frame {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.labels.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Frame {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let labels = Vec::<String>::deserialize(deserializer)?;
        Frame::new(labels).map_err(serde::de::Error::custom)
    }
}

/// A subset of the frame, encoded as a bitmask over class indices.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FocalSet(u32);

impl FocalSet {
    pub const EMPTY: FocalSet = FocalSet(0);

    pub fn full(size: usize) -> Self {
        debug_assert!(size <= MAX_CLASSES);
        FocalSet(((1u64 << size) - 1) as u32)
    }

    pub fn singleton(index: usize) -> Self {
        debug_assert!(index < MAX_CLASSES);
        FocalSet(1 << index)
    }

    pub fn from_bits(bits: u32) -> Self {
        FocalSet(bits)
    }

    /// Unchecked construction; use [`Frame::subset`] when the indices come from outside.
    pub fn from_indices(indices: &[usize]) -> Self {
        FocalSet(indices.iter().fold(0, |acc, &i| acc | (1 << i)))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_singleton(self) -> bool {
        self.0.is_power_of_two()
    }

    pub fn contains(self, index: usize) -> bool {
        index < 32 && self.0 & (1 << index) != 0
    }

    pub fn intersection(self, other: FocalSet) -> FocalSet {
        FocalSet(self.0 & other.0)
    }

    pub fn union(self, other: FocalSet) -> FocalSet {
        FocalSet(self.0 | other.0)
    }

    pub fn intersects(self, other: FocalSet) -> bool {
        self.0 & other.0 != 0
    }

    pub fn is_subset_of(self, other: FocalSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Complement within a frame of `size` classes.
    pub fn complement(self, size: usize) -> FocalSet {
        FocalSet(!self.0 & FocalSet::full(size).0)
    }

    /// Class indices in increasing order.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }
}

impl fmt::Debug for FocalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.indices()).finish()
    }
}
