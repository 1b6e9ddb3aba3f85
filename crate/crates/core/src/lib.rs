//! Exact algebra of B-series on unlabelled rooted trees.
//!
//! The crate is organised bottom-up:
//!
//! - [`tree`]: canonical rooted trees, their ordering, enumeration, symmetry and density.
//! - [`forest`]: forests and the forest space of rational linear combinations.
//! - [`pruning`]: subtree embeddings, assignment matrices and the pruning `t \ t'`.
//! - [`bseries`]: truncated coefficient maps, homomorphic evaluation and composition.
//! - [`elementary`]: polynomial vector fields, truncated power series and elementary differentials.
//! - [`verify`]: exact coefficient checks of the composition identities over power series.
//!
//! All arithmetic is over [`Rational`] (arbitrary precision), so every identity is
//! checked as an exact equality.

pub mod bseries;
pub mod elementary;
mod error;
pub mod forest;
pub mod pruning;
pub mod tree;
pub mod verify;

pub use bseries::{compose, BSeries};
pub use elementary::{Polynomial, PolynomialVectorField, SeriesVector, Stump, TruncatedSeries};
pub use error::{Error, ParseError, Result};
pub use forest::{Forest, ForestSum};
pub use pruning::{AssignmentMatrix, Embedding, LabelledTree, PruningSemantics};
pub use tree::Tree;
pub use verify::Report;

/// Exact rational scalar used throughout.
pub type Rational = num_rational::BigRational;

pub(crate) fn rational(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub(crate) fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}
