//! Continuous LWE and (truncated) homogeneous CLWE.
//!
//! A homogeneous CLWE distribution with phase `c` is a mixture of thin Gaussian "pancakes"
//! orthogonal to a hidden direction `w`: component `k` sits at `<w, y> = u (k - c)` with
//! `u = gamma / (gamma^2 + beta^2)`, has `rho`-width `beta / sqrt(beta^2 + gamma^2)` along `w`,
//! and carries weight proportional to `rho_{sqrt(beta^2 + gamma^2)}(k - c)`. Orthogonal to `w`
//! every coordinate is `N(0, 1 / (2 pi))`.
//!
//! The truncated form keeps only the components `|k| <= n` and clips each to radius
//! `alpha = u / 10`. Every clipped component is renormalised to unit mass, so the mixture
//! weights are exactly the normalised discrete Gaussian weights.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::dataset::{DatasetMeta, Family, LabeledDataset};
use crate::error::{invalid, Error, Result};
use crate::gaussian::{
    discrete_gaussian_weights, rho_1d, std_from_width, DiscreteGaussianWeights,
    TruncatedGaussian1D,
};
use crate::hermite::MomentSource;
use crate::interval::{tagged_sorted, Interval, Side};
use crate::linalg::{dot, require_unit, Householder};

/// Number of extra components on each side used when evaluating the untruncated mixture.
pub const TAIL_EXTENSION: usize = 20;

/// Parameters of one truncated hCLWE distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HclweParams {
    pub n: usize,
    pub gamma: f64,
    pub beta: f64,
    pub phase: f64,
    /// Truncation radius `u / 10`.
    pub alpha: f64,
    /// Component spacing `gamma / (gamma^2 + beta^2)`.
    pub spacing: f64,
    /// `rho`-width of each component along `w`.
    pub component_width: f64,
    /// `sqrt(beta^2 + gamma^2)`, the width of the discrete Gaussian over component indices.
    pub index_width: f64,
    pub weights: DiscreteGaussianWeights,
}

impl HclweParams {
    pub fn new(n: usize, gamma: f64, beta: f64, phase: f64) -> Result<Self> {
        if n < 1 {
            return invalid("hCLWE dimension must be at least 1");
        }
        if !(gamma > 0.0) || !gamma.is_finite() {
            return invalid(format!("gamma must be positive, got {gamma}"));
        }
        if !(beta > 0.0) || beta > gamma {
            return invalid(format!("need 0 < beta <= gamma, got beta = {beta}, gamma = {gamma}"));
        }
        if !(0.0..1.0).contains(&phase) {
            return invalid(format!("phase must lie in [0, 1), got {phase}"));
        }
        let norm_sq = gamma * gamma + beta * beta;
        let spacing = gamma / norm_sq;
        let index_width = norm_sq.sqrt();
        Ok(Self {
            n,
            gamma,
            beta,
            phase,
            alpha: spacing / 10.0,
            spacing,
            component_width: beta / index_width,
            index_width,
            weights: discrete_gaussian_weights(index_width, phase, n)?,
        })
    }

    /// `gamma = 2 sqrt(n)`, `beta = 1 / n`.
    pub fn default_schedule(n: usize, phase: f64) -> Result<Self> {
        let nf = n as f64;
        Self::new(n, 2.0 * nf.sqrt(), 1.0 / nf, phase)
    }

    /// The `(c = 0, c = 1/2)` pair used for the labelled instance.
    pub fn phase_pair(n: usize, gamma: f64, beta: f64) -> Result<(Self, Self)> {
        Ok((Self::new(n, gamma, beta, 0.0)?, Self::new(n, gamma, beta, 0.5)?))
    }

    pub fn center(&self, k: i64) -> f64 {
        self.spacing * (k as f64 - self.phase)
    }

    /// Clipped component `k` along `w`.
    pub fn component(&self, k: i64) -> TruncatedGaussian1D {
        TruncatedGaussian1D::new(self.center(k), self.component_width, self.alpha)
            .expect("parameters validated at construction")
    }

    pub fn offsets(&self) -> impl Iterator<Item = i64> {
        let n = self.n as i64;
        -n..=n
    }

    fn shares_geometry(&self, other: &Self) -> bool {
        self.n == other.n && self.gamma == other.gamma && self.beta == other.beta
    }

    /// Density of `<w, y>` under the truncated distribution.
    pub fn projected_density(&self, z: f64) -> f64 {
        // Components are disjoint, so only the nearest one can contribute.
        let k = (z / self.spacing + self.phase).round() as i64;
        if k.unsigned_abs() as usize > self.n {
            return 0.0;
        }
        self.weights.weight(k) * self.component(k).density(z)
    }

    pub fn projected_cdf(&self, z: f64) -> f64 {
        self.offsets()
            .map(|k| self.weights.weight(k) * self.component(k).cdf(z))
            .sum::<f64>()
            .clamp(0.0, 1.0)
    }

    /// Density of `<w, y>` when the clipped components are kept for `|k| <= n + extra`.
    ///
    /// With `extra = 0` this equals [`Self::projected_density`].
    pub fn extended_projected_density(&self, z: f64, extra: usize) -> Result<f64> {
        let range = self.n + extra;
        let k = (z / self.spacing + self.phase).round() as i64;
        if k.unsigned_abs() as usize > range {
            return Ok(0.0);
        }
        let log_norm = log_index_mass(self.index_width, self.phase, range);
        let t = (k as f64 - self.phase) / self.index_width;
        let weight = (-PI * t * t - log_norm).exp();
        Ok(weight * self.component(k).density(z))
    }

    /// Breakpoints (window edges and centres) for integrating projected densities.
    pub fn breakpoints(&self, extra: usize) -> Vec<f64> {
        let r = (self.n + extra) as i64;
        (-r..=r)
            .flat_map(|k| {
                let c = self.center(k);
                [c - self.alpha, c, c + self.alpha]
            })
            .collect()
    }

    /// Unnormalised density of the untruncated distribution restricted to `<w, y> = z`.
    ///
    /// Components with `|k| <= n + TAIL_EXTENSION` are summed; the remainder is far below
    /// machine precision for every parameter set this crate accepts.
    pub fn slice_profile_untruncated(&self, z: f64) -> f64 {
        let r = (self.n + TAIL_EXTENSION) as i64;
        (-r..=r)
            .map(|k| {
                rho_1d(k as f64 - self.phase, self.index_width)
                    * rho_1d(z - self.center(k), self.component_width)
            })
            .sum()
    }

    /// Total mass of [`Self::slice_profile_untruncated`] from the weight sum.
    pub fn slice_normalizer_untruncated(&self) -> f64 {
        let r = (self.n + TAIL_EXTENSION) as i64;
        self.component_width
            * (-r..=r)
                .map(|k| rho_1d(k as f64 - self.phase, self.index_width))
                .sum::<f64>()
    }

    /// Unnormalised truncated profile: raw weights times unit-mass clipped components.
    pub fn slice_profile_truncated(&self, z: f64) -> f64 {
        let k = (z / self.spacing + self.phase).round() as i64;
        if k.unsigned_abs() as usize > self.n {
            return 0.0;
        }
        rho_1d(k as f64 - self.phase, self.index_width) * self.component(k).density(z)
    }

    /// Total mass of [`Self::slice_profile_truncated`]: the raw weight sum.
    pub fn slice_normalizer_truncated(&self) -> f64 {
        self.offsets()
            .map(|k| rho_1d(k as f64 - self.phase, self.index_width))
            .sum()
    }
}

fn log_index_mass(s: f64, c: f64, range: usize) -> f64 {
    let r = range as i64;
    let logs: Vec<f64> = (-r..=r)
        .map(|k| {
            let t = (k as f64 - c) / s;
            -PI * t * t
        })
        .collect();
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + logs.iter().map(|l| (l - max).exp()).sum::<f64>().ln()
}

impl MomentSource for HclweParams {
    fn raw_moment(&self, l: u32) -> Result<f64> {
        let mut acc = 0.0;
        for k in self.offsets() {
            acc += self.weights.weight(k) * self.component(k).moment(l)?;
        }
        Ok(acc)
    }
}

/// Which form of the hCLWE density to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityForm {
    /// Infinite mixture of unclipped components (unnormalised).
    Untruncated,
    /// `2n + 1` clipped components (unnormalised raw weights).
    Truncated,
}

/// Unnormalised hCLWE density at `y` for hidden direction `w`.
pub fn hclwe_density(p: &HclweParams, w: &[f64], y: &[f64], form: DensityForm) -> Result<f64> {
    if w.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: w.len(),
            got: y.len(),
        });
    }
    let z = dot(w, y);
    let perp_sq = (dot(y, y) - z * z).max(0.0);
    let orth = (-PI * perp_sq).exp();
    let along = match form {
        DensityForm::Untruncated => p.slice_profile_untruncated(z),
        DensityForm::Truncated => p.slice_profile_truncated(z),
    };
    Ok(orth * along)
}

/// The `2n + 1` support intervals `u (k - c) ± alpha`, sorted and checked for disjointness.
pub fn support_intervals(p: &HclweParams) -> Result<Vec<Interval>> {
    let out: Vec<Interval> = p
        .offsets()
        .map(|k| Interval::centered(p.center(k), p.alpha))
        .collect();
    for pair in out.windows(2) {
        if pair[1].lo <= pair[0].hi {
            return Err(Error::Consistency(format!(
                "hCLWE support intervals [{}, {}] and [{}, {}] overlap",
                pair[0].lo, pair[0].hi, pair[1].lo, pair[1].hi
            )));
        }
    }
    Ok(out)
}

/// Smallest distance between an interval of `p0` and one of `p1`; must be at least `u / 5`.
pub fn cross_class_gap(p0: &HclweParams, p1: &HclweParams) -> Result<f64> {
    if !p0.shares_geometry(p1) {
        return invalid("phase pair must share n, gamma and beta");
    }
    let merged = tagged_sorted(&support_intervals(p0)?, &support_intervals(p1)?);
    let mut gap = f64::INFINITY;
    for pair in merged.windows(2) {
        let g = pair[1].0.lo - pair[0].0.hi;
        if pair[0].1 != pair[1].1 {
            gap = gap.min(g);
        }
        if g <= 0.0 {
            return Err(Error::Consistency(format!(
                "intervals of the two phases overlap near {}",
                pair[0].0.hi
            )));
        }
    }
    if gap < p0.spacing / 5.0 {
        return Err(Error::Consistency(format!(
            "cross-class gap {gap} is below u/5 = {}",
            p0.spacing / 5.0
        )));
    }
    Ok(gap)
}

/// Plus (`c = 0`) and minus (`c = 1/2`) intervals merged in order, as `J^-`/`J^+` layout.
pub fn labelled_layout(p0: &HclweParams, p1: &HclweParams) -> Result<Vec<(Interval, Side)>> {
    cross_class_gap(p0, p1)?;
    Ok(tagged_sorted(&support_intervals(p0)?, &support_intervals(p1)?)
        .into_iter()
        .map(|(iv, side, _)| (iv, side))
        .collect())
}

fn pick_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    weights.len() - 1
}

/// Draw `m` points (row-major) from the truncated hCLWE distribution with direction `w`.
pub fn hclwe_truncated_sample<R: Rng + ?Sized>(
    p: &HclweParams,
    w: &[f64],
    m: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let h = Householder::mapping_e1_to(w)?;
    let n = w.len();
    let sd = std_from_width(1.0);
    let mut out = vec![0.0; n * m];
    let mut u = vec![0.0; n];
    for row in out.chunks_exact_mut(n) {
        let k = pick_index(&p.weights.weights, rng) as i64 - p.n as i64;
        u[0] = p.component(k).sample(rng);
        for slot in u.iter_mut().skip(1) {
            let g: f64 = StandardNormal.sample(rng);
            *slot = sd * g;
        }
        h.apply(&u, row);
    }
    Ok(out)
}

/// Labelled instance: `+1` from phase 0, `-1` from phase 1/2, fair labels.
pub fn sample_labeled_clwe<R: Rng + ?Sized>(
    p0: &HclweParams,
    p1: &HclweParams,
    w: &[f64],
    m: usize,
    rng: &mut R,
) -> Result<LabeledDataset> {
    if !p0.shares_geometry(p1) {
        return invalid("phase pair must share n, gamma and beta");
    }
    require_unit(w)?;
    let n = w.len();
    let mut points = Vec::with_capacity(n * m);
    let mut labels = Vec::with_capacity(m);
    for _ in 0..m {
        let positive = rng.random::<bool>();
        let p = if positive { p0 } else { p1 };
        points.extend(hclwe_truncated_sample(p, w, 1, rng)?);
        labels.push(if positive { 1 } else { -1 });
    }
    let mut meta = DatasetMeta::new(Family::Hclwe)
        .with_param("hclwe_n", p0.n as f64)
        .with_param("gamma", p0.gamma)
        .with_param("beta", p0.beta)
        .with_param("alpha", p0.alpha);
    meta.hidden_direction = Some(w.to_vec());
    LabeledDataset::new(n, points, labels, meta)
}

/// One CLWE sample: `y ~ N(0, I / 2pi)` and `z = gamma <y, w> + e mod 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClweSample {
    pub y: Vec<f64>,
    pub z: f64,
}

pub fn clwe_sample<R: Rng + ?Sized>(
    w: &[f64],
    gamma: f64,
    beta: f64,
    m: usize,
    rng: &mut R,
) -> Result<Vec<ClweSample>> {
    require_unit(w)?;
    if !(gamma > 0.0) || !(beta > 0.0) {
        return invalid("gamma and beta must be positive");
    }
    let sd = std_from_width(1.0);
    let mut out = Vec::with_capacity(m);
    for _ in 0..m {
        let y: Vec<f64> = (0..w.len())
            .map(|_| {
                let g: f64 = StandardNormal.sample(rng);
                sd * g
            })
            .collect();
        let g: f64 = StandardNormal.sample(rng);
        let e = beta * sd * g;
        let z = (gamma * dot(&y, w) + e).rem_euclid(1.0);
        // rem_euclid can round up to exactly 1.0 for tiny negative inputs.
        let z = if z >= 1.0 { 0.0 } else { z };
        out.push(ClweSample { y, z });
    }
    Ok(out)
}
