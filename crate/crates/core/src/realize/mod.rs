//! Certified realisations of the planted instances as intersections of lifted halfspaces.

pub mod halfspace;
pub mod poly;
pub mod ptf;
pub mod veronese;

pub use halfspace::{ptf_to_halfspace, verify_realization, HalfspaceSet, RealizationReport};
pub use poly::{SignCertificate, UnivariatePoly};
pub use ptf::{interval_ptfs_blocked, interval_ptfs_degree2, PtfCertificate, PtfCollection};
pub use veronese::{lift_dimension, tuple_dimension, veronese_lift, MonomialIndex};

use crate::error::Result;
use crate::hclwe::{support_intervals, HclweParams};
use crate::pancake::PancakeSpec;

/// A certified PTF collection together with its linearisation.
#[derive(Debug, Clone)]
pub struct Realization {
    pub ptfs: PtfCollection,
    pub certificate: PtfCertificate,
    pub halfspaces: HalfspaceSet,
}

/// Degree-2 realisation of a pancake instance with direction `w`.
pub fn realize_pancake(spec: &PancakeSpec, w: &[f64]) -> Result<Realization> {
    let ptfs = interval_ptfs_degree2(&spec.s_a, &spec.s_b)?.with_direction(w)?;
    let certificate = ptfs.certify()?;
    let halfspaces = HalfspaceSet::from_ptfs(&ptfs, 2)?;
    Ok(Realization {
        ptfs,
        certificate,
        halfspaces,
    })
}

/// Degree-`2d` realisation of the labelled hCLWE instance (`p0` plus, `p1` minus).
pub fn realize_hclwe(p0: &HclweParams, p1: &HclweParams, w: &[f64], d: usize) -> Result<Realization> {
    crate::hclwe::cross_class_gap(p0, p1)?;
    let ptfs = interval_ptfs_blocked(&support_intervals(p0)?, &support_intervals(p1)?, d)?
        .with_direction(w)?;
    let certificate = ptfs.certify()?;
    let halfspaces = HalfspaceSet::from_ptfs(&ptfs, 2 * d)?;
    Ok(Realization {
        ptfs,
        certificate,
        halfspaces,
    })
}

/// Margin scale `1 / (N sqrt(k ln N))` against which empirical margins are compared.
pub fn margin_scale(lifted_dim: usize, k: usize) -> f64 {
    let n = lifted_dim as f64;
    1.0 / (n * (k as f64 * n.ln()).sqrt())
}
