//! Generators, verifiers and a reduction harness for the hard-instance families behind
//! lower bounds on learning intersections of halfspaces.
//!
//! Two families are provided:
//!
//! * [`pancake`]: smoothed, truncated moment-matching mixtures along a hidden direction
//!   (the statistical-query instance). Each instance is an intersection of degree-2 PTFs.
//! * [`hclwe`]: truncated homogeneous continuous-LWE mixtures (the lattice instance),
//!   realised by blocked degree-`2d` PTFs.
//!
//! [`realize`] turns either family into an explicit set of halfspaces over a Veronese lift and
//! certifies label consistency and margin; [`harness`] provides SQ oracles, learners and the
//! sample-splitting distinguisher.

// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dataset;
pub mod error;
pub mod gaussian;
pub mod harness;
pub mod hclwe;
pub mod hermite;
pub mod interval;
pub mod linalg;
pub mod pancake;
pub mod quadrature;
pub mod realize;

pub use dataset::{DatasetMeta, Family, LabeledDataset, VarianceConvention};
pub use error::{Error, Result};
pub use gaussian::{DiscreteGaussianWeights, TruncatedGaussian1D};
pub use hclwe::HclweParams;
pub use hermite::{DiscreteDist, HermitePoly, MomentPair};
pub use interval::Interval;
pub use pancake::PancakeSpec;
pub use realize::{HalfspaceSet, PtfCollection, RealizationReport, UnivariatePoly};

/// Deterministic random stream used throughout the crate.
pub type Rng = rand_chacha::ChaCha8Rng;

/// Seed a [`Rng`] from a `u64`.
pub fn seeded(seed: u64) -> Rng {
    <Rng as rand::SeedableRng>::seed_from_u64(seed)
}
