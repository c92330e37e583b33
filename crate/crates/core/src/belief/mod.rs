//! Mass functions on the power set of a finite frame.

mod frame;
mod mass;
mod probability;
mod random;

pub use frame::{FocalSet, Frame, MAX_CLASSES};
pub use mass::{dempster_combine, make_mass, mean_combine, MassFunction, MASS_TOLERANCE};
pub use probability::{argmax_first, ProbabilityVector};
pub use random::{random_bayesian, random_mass};
