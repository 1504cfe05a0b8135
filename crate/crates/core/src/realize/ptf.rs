//! Univariate PTFs that carve a labelled interval layout into an intersection.
//!
//! Given alternating plus/minus intervals on the line, each polynomial is negative on the
//! minus intervals assigned to it and non-negative everywhere else on the layout, so a point
//! of the layout is plus exactly when every polynomial is non-negative.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::{tagged_sorted, Interval, Side};
use crate::linalg::require_unit;

use super::poly::UnivariatePoly;

/// Grid resolution per interval used by [`PtfCollection::certify`].
pub const CERTIFY_GRID: usize = 10_000;

/// A family of univariate polynomials tied to a direction and an interval layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PtfCollection {
    /// Hidden direction; empty until [`PtfCollection::with_direction`] is called.
    pub direction: Vec<f64>,
    pub polys: Vec<UnivariatePoly>,
    /// Maximum polynomial degree.
    pub degree: usize,
    pub plus: Vec<Interval>,
    pub minus: Vec<Interval>,
    /// Indices into `minus` handled by each polynomial.
    pub assignment: Vec<Vec<usize>>,
}

/// Summary of a successful sign certification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PtfCertificate {
    /// Smallest value of any polynomial over any plus interval.
    pub min_plus_value: f64,
    /// Largest value of the assigned polynomial over any minus interval (negative).
    pub max_minus_value: f64,
}

/// Sorted layout with neighbour gaps; fails unless sides alternate.
fn alternating_layout(plus: &[Interval], minus: &[Interval]) -> Result<Vec<(Interval, Side, usize)>> {
    let layout = tagged_sorted(plus, minus);
    for (i, pair) in layout.windows(2).enumerate() {
        if pair[1].0.lo <= pair[0].0.hi {
            return Err(Error::Overlap {
                left: i,
                right: i + 1,
                detail: "interval layout is not disjoint".into(),
            });
        }
        if pair[0].1 == pair[1].1 {
            return Err(Error::Construction(format!(
                "layout positions {i} and {} are both {:?}; plus and minus intervals must alternate",
                i + 1,
                pair[0].1
            )));
        }
    }
    Ok(layout)
}

/// Roots bracketing the minus interval at layout position `pos`: midpoints of the adjacent
/// gaps, with a missing side mirrored from the other.
fn bracket(layout: &[(Interval, Side, usize)], pos: usize) -> Result<(f64, f64)> {
    let iv = layout[pos].0;
    let left = pos.checked_sub(1).map(|p| 0.5 * (layout[p].0.hi + iv.lo));
    let right = layout.get(pos + 1).map(|n| 0.5 * (iv.hi + n.0.lo));
    match (left, right) {
        (Some(l), Some(r)) => Ok((l, r)),
        (Some(l), None) => Ok((l, iv.hi + (iv.lo - l))),
        (None, Some(r)) => Ok((iv.lo - (r - iv.hi), r)),
        (None, None) => Err(Error::Construction(
            "a lone minus interval has no neighbour to place roots against".into(),
        )),
    }
}

fn minus_positions(layout: &[(Interval, Side, usize)]) -> Vec<usize> {
    let mut pos = vec![0; layout.iter().filter(|t| t.1 == Side::Minus).count()];
    for (p, t) in layout.iter().enumerate() {
        if t.1 == Side::Minus {
            pos[t.2] = p;
        }
    }
    pos
}

/// One quadratic per minus interval, negative exactly between the bracketing gap midpoints.
pub fn interval_ptfs_degree2(s_a: &[Interval], s_b: &[Interval]) -> Result<PtfCollection> {
    let layout = alternating_layout(s_a, s_b)?;
    let positions = minus_positions(&layout);
    let mut polys = Vec::with_capacity(s_b.len());
    for &p in &positions {
        let (l, r) = bracket(&layout, p)?;
        polys.push(UnivariatePoly::from_roots(&[l, r]));
    }
    Ok(PtfCollection {
        direction: Vec::new(),
        polys,
        degree: 2,
        plus: s_a.to_vec(),
        minus: s_b.to_vec(),
        assignment: (0..s_b.len()).map(|i| vec![i]).collect(),
    })
}

/// `k = |J^-| / d` polynomials of degree `2d`; polynomial `j` is negative on minus intervals
/// `j d .. (j + 1) d` (in sorted order) and positive on the rest of the layout.
pub fn interval_ptfs_blocked(j_plus: &[Interval], j_minus: &[Interval], d: usize) -> Result<PtfCollection> {
    if d == 0 || !j_minus.len().is_multiple_of(d) {
        return Err(Error::InvalidParameter(format!(
            "block size d = {d} must divide the number of minus intervals ({})",
            j_minus.len()
        )));
    }
    let layout = alternating_layout(j_plus, j_minus)?;
    let positions = minus_positions(&layout);
    // Minus intervals in left-to-right order.
    let mut order: Vec<usize> = (0..j_minus.len()).collect();
    order.sort_by_key(|&i| positions[i]);
    let mut polys = Vec::new();
    let mut assignment = Vec::new();
    for block in order.chunks(d) {
        let mut roots = Vec::with_capacity(2 * d);
        for &i in block {
            let (l, r) = bracket(&layout, positions[i])?;
            roots.push(l);
            roots.push(r);
        }
        polys.push(UnivariatePoly::from_roots(&roots));
        assignment.push(block.to_vec());
    }
    Ok(PtfCollection {
        direction: Vec::new(),
        polys,
        degree: 2 * d,
        plus: j_plus.to_vec(),
        minus: j_minus.to_vec(),
        assignment,
    })
}

impl PtfCollection {
    pub fn with_direction(mut self, w: &[f64]) -> Result<Self> {
        require_unit(w)?;
        self.direction = w.to_vec();
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    /// `+1` iff every polynomial is non-negative at `z`.
    pub fn classify(&self, z: f64) -> i8 {
        if self.polys.iter().all(|p| p.eval(z) >= 0.0) {
            1
        } else {
            -1
        }
    }

    /// Prove both sign properties: every polynomial is strictly positive on every plus
    /// interval, and each minus interval has a polynomial strictly negative on all of it.
    pub fn certify(&self) -> Result<PtfCertificate> {
        let mut min_plus = f64::INFINITY;
        for (i, iv) in self.plus.iter().enumerate() {
            for (j, p) in self.polys.iter().enumerate() {
                match p.certified_sign(iv, CERTIFY_GRID) {
                    Some(c) if c.positive => {
                        min_plus = min_plus.min(c.min_abs);
                    }
                    _ => {
                        return Err(Error::Consistency(format!(
                            "polynomial {j} is not positive on plus interval {i} [{}, {}]",
                            iv.lo, iv.hi
                        )))
                    }
                }
            }
        }
        let mut max_minus = f64::NEG_INFINITY;
        let mut covered = vec![false; self.minus.len()];
        for (j, block) in self.assignment.iter().enumerate() {
            for &i in block {
                let iv = &self.minus[i];
                match self.polys[j].certified_sign(iv, CERTIFY_GRID) {
                    Some(c) if !c.positive => {
                        max_minus = max_minus.max(-c.min_abs);
                        covered[i] = true;
                    }
                    _ => {
                        return Err(Error::Consistency(format!(
                            "polynomial {j} is not negative on its minus interval {i} [{}, {}]",
                            iv.lo, iv.hi
                        )))
                    }
                }
            }
        }
        if let Some(i) = covered.iter().position(|c| !c) {
            return Err(Error::Consistency(format!("minus interval {i} is not covered")));
        }
        Ok(PtfCertificate {
            min_plus_value: min_plus,
            max_minus_value: max_minus,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hclwe::{support_intervals, HclweParams};
    use crate::pancake::build_pancake_spec;

    #[test]
    fn symmetric_quadratic_example() {
        let s_a = [Interval::new(-1.2, -0.8), Interval::new(0.8, 1.2)];
        let s_b = [Interval::new(-0.2, 0.2)];
        let col = interval_ptfs_degree2(&s_a, &s_b).unwrap();
        assert_eq!(col.len(), 1);
        let c = &col.polys[0].coefficients;
        assert!((c[0] + 0.25).abs() < 1e-15 && c[1].abs() < 1e-15 && c[2] == 1.0);
        col.certify().unwrap();
    }

    #[test]
    fn pancake_quadratics_certify() {
        let spec = build_pancake_spec(4, 256, 0.1).unwrap();
        let col = interval_ptfs_degree2(&spec.s_a, &spec.s_b).unwrap();
        assert_eq!(col.len(), spec.s_b.len());
        let cert = col.certify().unwrap();
        assert!(cert.min_plus_value > 0.0 && cert.max_minus_value < 0.0);
    }

    #[test]
    fn mirrored_extreme_roots() {
        // Minus interval on the far left has no left neighbour.
        let s_a = [Interval::new(0.0, 1.0)];
        let s_b = [Interval::new(-3.0, -2.0)];
        let col = interval_ptfs_degree2(&s_a, &s_b).unwrap();
        let p = &col.polys[0];
        assert!(p.eval(-4.0).abs() < 1e-12);
        assert!(p.eval(-1.0).abs() < 1e-12);
        col.certify().unwrap();
    }

    #[test]
    fn non_alternating_rejected() {
        let s_a = [Interval::new(0.0, 1.0), Interval::new(2.0, 3.0)];
        let s_b = [Interval::new(4.0, 5.0)];
        assert!(matches!(
            interval_ptfs_degree2(&s_a, &s_b),
            Err(Error::Construction(_))
        ));
    }

    fn hclwe_layout(n: usize) -> (Vec<Interval>, Vec<Interval>) {
        let (p0, p1) = HclweParams::phase_pair(n, 2.0 * (n as f64).sqrt(), 1.0 / n as f64).unwrap();
        (support_intervals(&p0).unwrap(), support_intervals(&p1).unwrap())
    }

    #[test]
    fn blocked_single_polynomial() {
        let (plus, minus) = hclwe_layout(1);
        let col = interval_ptfs_blocked(&plus, &minus, 3).unwrap();
        assert_eq!(col.len(), 1);
        assert_eq!(col.polys[0].degree(), 6);
        col.certify().unwrap();
        for iv in &minus {
            assert_eq!(col.classify(iv.center()), -1);
        }
        for iv in &plus {
            assert_eq!(col.classify(iv.center()), 1);
        }
    }

    #[test]
    fn blocked_partition() {
        let (plus, minus) = hclwe_layout(4);
        let col = interval_ptfs_blocked(&plus, &minus, 3).unwrap();
        assert_eq!(col.len(), 3);
        let mut seen: Vec<usize> = col.assignment.concat();
        seen.sort();
        assert_eq!(seen, (0..9).collect::<Vec<_>>());
        col.certify().unwrap();
        for p in &col.polys {
            for iv in &plus {
                assert!(p.eval(iv.center()) > 0.0);
            }
        }
        assert!(interval_ptfs_blocked(&plus, &minus, 2).is_err());
    }
}
