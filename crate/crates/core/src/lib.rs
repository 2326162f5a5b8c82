//! Exact arithmetic, point sets and discrepancy formulas for symmetrized
//! digit-scrambled Hammersley point sets in base `b`.

pub mod acceptance;
pub mod discrepancy;
pub mod error;
pub mod faure;
pub mod formulas;
pub mod perm;
pub mod phi;
pub mod pointset;
pub mod rational;
pub mod search;
pub mod table;

pub use error::Error;
pub use perm::{parse_sigma, Letter, PartialPermutation, Permutation, SigmaPattern};
pub use pointset::{GridPoint, Label, PointSet};
pub use rational::Rational;
