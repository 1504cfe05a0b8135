//! The statistical-query hard instance.
//!
//! Along a hidden unit direction `w` the positive class follows `Ã` and the negative class
//! `B̃`: each is a Gauss–Hermite rule shrunk by `sqrt(1 - delta)`, smoothed with Gaussian
//! noise of variance `delta`, and with every component truncated to `mean ± tau`. Orthogonal
//! to `w` both classes are standard Gaussian.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dataset::{DatasetMeta, Family, LabeledDataset};
use crate::error::{invalid, Error, Result};
use crate::gaussian::{std_normal_cdf, std_normal_pdf, TruncatedGaussian1D};
use crate::hermite::{moment_pair, MomentSource};
use crate::interval::{min_gap_sorted, tagged_sorted, Interval};
use crate::linalg::{require_unit, Householder};

pub const DEFAULT_TRUNCATION_CONSTANT: f64 = 0.1;
pub const DEFAULT_REGIME_EXPONENT: f64 = 0.25;

/// One class of the pancake instance: a weighted set of equal-width components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureSide {
    pub means: Vec<f64>,
    pub weights: Vec<f64>,
    /// Component standard deviation (`sqrt(delta)`).
    pub sd: f64,
    /// Truncation half-width (`tau`).
    pub radius: f64,
}

impl MixtureSide {
    pub fn len(&self) -> usize {
        self.means.len()
    }

    pub fn is_empty(&self) -> bool {
        self.means.is_empty()
    }

    pub fn component(&self, i: usize) -> TruncatedGaussian1D {
        TruncatedGaussian1D::from_std(self.means[i], self.sd, self.radius)
            .expect("validated at construction")
    }

    pub fn intervals(&self) -> Vec<Interval> {
        self.means
            .iter()
            .map(|&m| Interval::centered(m, self.radius))
            .collect()
    }

    /// Density of the truncated mixture (`Ã` / `B̃`).
    pub fn truncated_density(&self, z: f64) -> f64 {
        (0..self.len())
            .map(|i| self.weights[i] * self.component(i).density(z))
            .sum()
    }

    /// Density of the untruncated smoothed mixture (`A′` / `B′`).
    pub fn smoothed_density(&self, z: f64) -> f64 {
        self.means
            .iter()
            .zip(&self.weights)
            .map(|(m, w)| w * std_normal_pdf((z - m) / self.sd) / self.sd)
            .sum()
    }

    pub fn truncated_cdf(&self, z: f64) -> f64 {
        (0..self.len())
            .map(|i| self.weights[i] * self.component(i).cdf(z))
            .sum::<f64>()
            .clamp(0.0, 1.0)
    }

    pub fn smoothed_cdf(&self, z: f64) -> f64 {
        self.means
            .iter()
            .zip(&self.weights)
            .map(|(m, w)| w * std_normal_cdf((z - m) / self.sd))
            .sum()
    }

    /// Mass of the smoothed mixture outside `intervals` (assumed disjoint).
    pub fn smoothed_mass_outside(&self, intervals: &[Interval]) -> f64 {
        let inside: f64 = intervals
            .iter()
            .map(|iv| self.smoothed_cdf(iv.hi) - self.smoothed_cdf(iv.lo))
            .sum();
        (1.0 - inside).max(0.0)
    }

    /// `E X^l` under the truncated mixture, from the analytic truncated-normal moments.
    pub fn truncated_moment(&self, l: u32) -> Result<f64> {
        let mut acc = 0.0;
        for i in 0..self.len() {
            acc += self.weights[i] * self.component(i).moment(l)?;
        }
        Ok(acc)
    }

    /// `E X^l` under the smoothed (untruncated) mixture.
    pub fn smoothed_moment(&self, l: u32) -> Result<f64> {
        let mut acc = 0.0;
        for (m, w) in self.means.iter().zip(&self.weights) {
            let g = TruncatedGaussian1D::from_std(*m, self.sd, f64::INFINITY)?;
            acc += w * g.moment(l)?;
        }
        Ok(acc)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut pick = self.len() - 1;
        for (i, w) in self.weights.iter().enumerate() {
            acc += w;
            if u < acc {
                pick = i;
                break;
            }
        }
        self.component(pick).sample(rng)
    }

    /// Integration breakpoints: the edges of every truncation window.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.means
            .iter()
            .flat_map(|m| [m - self.radius, *m, m + self.radius])
            .collect()
    }

    pub fn truncated(&self) -> SideView<'_> {
        SideView {
            side: self,
            smoothed: false,
        }
    }

    pub fn smoothed(&self) -> SideView<'_> {
        SideView {
            side: self,
            smoothed: true,
        }
    }
}

/// Moment view of a [`MixtureSide`], truncated or smoothed.
#[derive(Debug, Clone, Copy)]
pub struct SideView<'a> {
    side: &'a MixtureSide,
    smoothed: bool,
}

impl MomentSource for SideView<'_> {
    fn raw_moment(&self, l: u32) -> Result<f64> {
        if self.smoothed {
            self.side.smoothed_moment(l)
        } else {
            self.side.truncated_moment(l)
        }
    }
}

/// Parameters and interval geometry of one pancake instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PancakeSpec {
    pub k: usize,
    /// Target lifted dimension `N`; only enters through `delta`.
    pub lift_dim: usize,
    pub truncation_constant: f64,
    /// Smoothing variance `1 / (k^2 ln N)`.
    pub delta: f64,
    /// Truncation half-width `c sqrt(delta k ln N) = c / sqrt(k)`.
    pub tau: f64,
    pub a_side: MixtureSide,
    pub b_side: MixtureSide,
    /// Positive-class intervals (one per component of `A`).
    pub s_a: Vec<Interval>,
    /// Negative-class intervals (one per component of `B`).
    pub s_b: Vec<Interval>,
    /// Smallest gap between consecutive intervals of `S_A ∪ S_B`.
    pub min_gap: f64,
}

/// Build the instance for budget `k`, lifted dimension `N` and truncation constant `c`.
///
/// Fails with [`Error::Overlap`] when `c` is too large for the intervals to stay disjoint.
pub fn build_pancake_spec(k: usize, lift_dim: usize, c: f64) -> Result<PancakeSpec> {
    if k < 2 {
        return invalid(format!("k must be at least 2, got {k}"));
    }
    if lift_dim < 16 {
        return invalid(format!("N must be at least 16, got {lift_dim}"));
    }
    if !(c > 0.0) || !c.is_finite() {
        return invalid(format!("truncation constant must be positive, got {c}"));
    }
    let log_n = (lift_dim as f64).ln();
    let kf = k as f64;
    let delta = 1.0 / (kf * kf * log_n);
    let tau = c * (delta * kf * log_n).sqrt();
    let scale = (1.0 - delta).sqrt();
    let pair = moment_pair(k)?;
    let sd = delta.sqrt();
    let side = |d: &crate::hermite::DiscreteDist| MixtureSide {
        means: d.support.iter().map(|x| scale * x).collect(),
        weights: d.weights.clone(),
        sd,
        radius: tau,
    };
    let a_side = side(&pair.a);
    let b_side = side(&pair.b);
    let s_a = a_side.intervals();
    let s_b = b_side.intervals();
    let merged: Vec<Interval> = tagged_sorted(&s_a, &s_b).into_iter().map(|t| t.0).collect();
    let min_gap = min_gap_sorted(&merged).map_err(|e| match e {
        Error::Overlap { left, right, detail } => Error::Overlap {
            left,
            right,
            detail: format!("{detail}; lower the truncation constant below c = {c}"),
        },
        other => other,
    })?;
    Ok(PancakeSpec {
        k,
        lift_dim,
        truncation_constant: c,
        delta,
        tau,
        a_side,
        b_side,
        s_a,
        s_b,
        min_gap,
    })
}

impl PancakeSpec {
    pub fn with_defaults(k: usize, lift_dim: usize) -> Result<Self> {
        build_pancake_spec(k, lift_dim, DEFAULT_TRUNCATION_CONSTANT)
    }

    /// `tau^2 / delta = c^2 k ln N`, the exponent governing truncation effects.
    pub fn tau_sq_over_delta(&self) -> f64 {
        self.tau * self.tau / self.delta
    }

    /// Empirical `c'` with `min_gap = c' / sqrt(k)`.
    pub fn gap_constant(&self) -> f64 {
        self.min_gap * (self.k as f64).sqrt()
    }

    /// Whether `k <= N^gamma`.
    pub fn in_regime(&self, gamma: f64) -> bool {
        (self.k as f64) <= (self.lift_dim as f64).powf(gamma)
    }

    /// Label implied by the w-coordinate, or `None` outside `S_A ∪ S_B`.
    pub fn label_of(&self, z: f64) -> Option<i8> {
        if crate::interval::in_union(&self.s_a, z) {
            Some(1)
        } else if crate::interval::in_union(&self.s_b, z) {
            Some(-1)
        } else {
            None
        }
    }

    /// Conditional CDF of the w-coordinate given the label.
    pub fn conditional_cdf(&self, label: i8, z: f64) -> f64 {
        if label > 0 {
            self.a_side.truncated_cdf(z)
        } else {
            self.b_side.truncated_cdf(z)
        }
    }

    pub fn params(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("k", self.k as f64),
            ("N", self.lift_dim as f64),
            ("c", self.truncation_constant),
            ("delta", self.delta),
            ("tau", self.tau),
        ]
    }
}

/// Draw `m` labelled points in `R^n` with planted direction `w`.
pub fn sample_labeled_sq<R: Rng + ?Sized>(
    spec: &PancakeSpec,
    w: &[f64],
    m: usize,
    rng: &mut R,
) -> Result<LabeledDataset> {
    let h = Householder::mapping_e1_to(w)?;
    let n = w.len();
    let mut points = vec![0.0; n * m];
    let mut labels = Vec::with_capacity(m);
    let mut u = vec![0.0; n];
    for row in points.chunks_exact_mut(n) {
        let positive = rng.random::<bool>();
        let side = if positive { &spec.a_side } else { &spec.b_side };
        u[0] = side.sample(rng);
        for slot in u.iter_mut().skip(1) {
            *slot = StandardNormal.sample(rng);
        }
        h.apply(&u, row);
        labels.push(if positive { 1 } else { -1 });
    }
    let mut meta = DatasetMeta::new(Family::PancakeSq);
    for (k, v) in spec.params() {
        meta.params.insert(k.to_string(), v);
    }
    meta.hidden_direction = Some(w.to_vec());
    require_unit(w)?;
    LabeledDataset::new(n, points, labels, meta)
}
