//! Gaussian conventions shared by both instance families.
//!
//! Widths follow the lattice convention `rho_s(x) = exp(-pi |x/s|^2)`, i.e. a Gaussian of
//! variance `s^2 / (2 pi)`. [`std_from_width`] and [`width_from_std`] convert to the usual
//! standard-deviation parameterisation.

use std::f64::consts::{PI, SQRT_2};

use rand::Rng;
use serde::{Deserialize, Serialize};
use libm::{erf, erfc};
use statrs::function::erf::erfc_inv;

use crate::error::{invalid, Error, Result};
use crate::quadrature::{integrate, QuadOptions};

/// `1 / sqrt(2 pi)`.
pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Standard deviation of the Gaussian whose density is proportional to `rho_s`.
pub fn std_from_width(s: f64) -> f64 {
    s / (2.0 * PI).sqrt()
}

/// Inverse of [`std_from_width`].
pub fn width_from_std(sigma: f64) -> f64 {
    sigma * (2.0 * PI).sqrt()
}

/// Standard normal density.
pub fn std_normal_pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal CDF.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / SQRT_2)
}

/// `rho_s(x) = exp(-pi |x / s|^2)` for a point of any dimension.
pub fn rho(x: &[f64], s: f64) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return invalid(format!("width must be positive and finite, got {s}"));
    }
    let sq: f64 = x.iter().map(|v| (v / s) * (v / s)).sum();
    Ok((-PI * sq).exp())
}

#[inline]
pub(crate) fn rho_1d(x: f64, s: f64) -> f64 {
    let t = x / s;
    (-PI * t * t).exp()
}

/// Density proportional to `rho_s(x - mean)` restricted to `[mean - radius, mean + radius]`.
///
/// The stored `normalizer` is the mass of the untruncated Gaussian inside the window, so the
/// truncated density is `rho_s(x; mean) / (s * normalizer)` there and zero elsewhere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncatedGaussian1D {
    pub mean: f64,
    pub width: f64,
    pub radius: f64,
    pub normalizer: f64,
}

impl TruncatedGaussian1D {
    /// `radius` may be `f64::INFINITY` for the untruncated Gaussian.
    pub fn new(mean: f64, width: f64, radius: f64) -> Result<Self> {
        if !mean.is_finite() {
            return invalid(format!("mean must be finite, got {mean}"));
        }
        if !(width > 0.0) || !width.is_finite() {
            return invalid(format!("width must be positive and finite, got {width}"));
        }
        if !(radius > 0.0) {
            return invalid(format!("truncation radius must be positive, got {radius}"));
        }
        let r = radius / std_from_width(width);
        let normalizer = if r.is_finite() { erf(r / SQRT_2) } else { 1.0 };
        if !(normalizer > 0.0) {
            return Err(Error::Underflow(format!(
                "truncation window of radius {radius} holds no mass at width {width}"
            )));
        }
        Ok(Self {
            mean,
            width,
            radius,
            normalizer,
        })
    }

    /// Construct from a standard deviation instead of a `rho` width.
    pub fn from_std(mean: f64, sigma: f64, radius: f64) -> Result<Self> {
        Self::new(mean, width_from_std(sigma), radius)
    }

    pub fn std_dev(&self) -> f64 {
        std_from_width(self.width)
    }

    /// Truncation radius in standard deviations.
    pub fn standardized_radius(&self) -> f64 {
        self.radius / self.std_dev()
    }

    pub fn lower(&self) -> f64 {
        self.mean - self.radius
    }

    pub fn upper(&self) -> f64 {
        self.mean + self.radius
    }

    pub fn density(&self, x: f64) -> f64 {
        if (x - self.mean).abs() > self.radius {
            return 0.0;
        }
        rho_1d(x - self.mean, self.width) / (self.width * self.normalizer)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x < self.lower() {
            return 0.0;
        }
        if x >= self.upper() {
            return 1.0;
        }
        let sigma = self.std_dev();
        let r = self.standardized_radius();
        let z = (x - self.mean) / sigma;
        let lo = if r.is_finite() { std_normal_cdf(-r) } else { 0.0 };
        ((std_normal_cdf(z) - lo) / self.normalizer).clamp(0.0, 1.0)
    }

    /// Inverse-CDF draw; the tail on the far side of the median is evaluated with `erfc`
    /// so draws near the window edges keep full relative precision.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let sigma = self.std_dev();
        let r = self.standardized_radius();
        let lower_tail = if r.is_finite() { 0.5 * erfc(r / SQRT_2) } else { 0.0 };
        let mass = self.normalizer;
        let u: f64 = rng.random();
        let p = lower_tail + u * mass;
        let z = if p <= 0.5 {
            -SQRT_2 * erfc_inv(2.0 * p)
        } else {
            let q = lower_tail + (1.0 - u) * mass;
            SQRT_2 * erfc_inv(2.0 * q)
        };
        let z = if r.is_finite() { z.clamp(-r, r) } else { z };
        self.mean + sigma * z
    }

    /// `E[X^l]`, `l <= 64`, via the boundary-term recurrence for truncated-normal moments.
    pub fn moment(&self, l: u32) -> Result<f64> {
        Ok(self.moments(l)?[l as usize])
    }

    /// All raw moments `E[X^0..=X^l]`.
    pub fn moments(&self, l: u32) -> Result<Vec<f64>> {
        if l > 64 {
            return invalid(format!("moment order {l} exceeds 64"));
        }
        let std_moments = self.standardized_moments(l);
        let sigma = self.std_dev();
        let mut out = vec![0.0; l as usize + 1];
        // E (mu + sigma Y)^j = sum_i C(j,i) mu^(j-i) sigma^i E Y^i
        for (j, slot) in out.iter_mut().enumerate() {
            let mut binom = 1.0;
            let mut acc = 0.0;
            for (i, m) in std_moments.iter().enumerate().take(j + 1) {
                acc += binom * self.mean.powi((j - i) as i32) * sigma.powi(i as i32) * m;
                binom = binom * (j - i) as f64 / (i + 1) as f64;
            }
            *slot = acc;
        }
        Ok(out)
    }

    fn standardized_moments(&self, l: u32) -> Vec<f64> {
        let r = self.standardized_radius();
        let z = self.normalizer;
        let mut m = vec![0.0; l as usize + 1];
        m[0] = 1.0;
        // Symmetric window [-r, r]: odd moments vanish and
        // M_j = (j-1) M_{j-2} - (r^{j-1} phi(r) - (-r)^{j-1} phi(-r)) / Z.
        let phi_r = if r.is_finite() { std_normal_pdf(r) } else { 0.0 };
        for j in 2..=l as usize {
            if j % 2 == 1 {
                continue;
            }
            let boundary = if phi_r == 0.0 {
                0.0
            } else {
                2.0 * r.powi(j as i32 - 1) * phi_r / z
            };
            m[j] = (j as f64 - 1.0) * m[j - 2] - boundary;
        }
        m
    }
}

/// Normalised weights proportional to `rho_s(k - c)` for `k = -n..=n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteGaussianWeights {
    pub width: f64,
    pub phase: f64,
    pub range: usize,
    pub weights: Vec<f64>,
}

impl DiscreteGaussianWeights {
    /// Weight of integer offset `k` (`|k| <= range`).
    pub fn weight(&self, k: i64) -> f64 {
        let idx = k + self.range as i64;
        assert!(
            idx >= 0 && (idx as usize) < self.weights.len(),
            "offset {k} outside -{0}..={0}",
            self.range
        );
        self.weights[idx as usize]
    }

    pub fn offsets(&self) -> impl Iterator<Item = i64> + '_ {
        let n = self.range as i64;
        -n..=n
    }
}

/// Weights of the discrete Gaussian over `{-n, ..., n}` with phase `c`, computed in log space.
pub fn discrete_gaussian_weights(s: f64, c: f64, n: usize) -> Result<DiscreteGaussianWeights> {
    if !(s > 0.0) || !s.is_finite() {
        return invalid(format!("width must be positive and finite, got {s}"));
    }
    if !(0.0..1.0).contains(&c) {
        return invalid(format!("phase must lie in [0, 1), got {c}"));
    }
    if n < 1 {
        return invalid("range must be at least 1");
    }
    let ni = n as i64;
    let logs: Vec<f64> = (-ni..=ni)
        .map(|k| {
            let t = (k as f64 - c) / s;
            -PI * t * t
        })
        .collect();
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return Err(Error::Underflow(format!(
            "all discrete Gaussian log-weights are non-finite at width {s}"
        )));
    }
    let sum: f64 = logs.iter().map(|l| (l - max).exp()).sum();
    let log_norm = max + sum.ln();
    let weights: Vec<f64> = logs.iter().map(|l| (l - log_norm).exp()).collect();
    if weights.iter().any(|w| !w.is_finite()) {
        return Err(Error::Underflow(format!(
            "non-finite discrete Gaussian weight at width {s}"
        )));
    }
    Ok(DiscreteGaussianWeights {
        width: s,
        phase: c,
        range: n,
        weights,
    })
}

/// Log of `sum_{l >= from} rho_s(l)` summed until terms stop contributing.
fn log_tail(s: f64, from: i64) -> f64 {
    let log_term = |l: i64| {
        let t = l as f64 / s;
        -PI * t * t
    };
    let first = log_term(from);
    let mut acc = 1.0;
    let mut l = from + 1;
    loop {
        let rel = (log_term(l) - first).exp();
        acc += rel;
        if rel < 1e-18 * acc {
            break;
        }
        l += 1;
    }
    first + acc.ln()
}

/// Fraction of the discrete Gaussian `D_{Z, s}` lying outside `{-n, ..., n}`.
///
/// This is the coupling failure probability when the hCLWE mixture is restricted to its
/// `2n + 1` central components.
pub fn truncation_mass(s: f64, n: usize) -> Result<f64> {
    Ok(log_truncation_mass(s, n)?.exp())
}

/// Natural log of [`truncation_mass`]; stays finite when the mass itself underflows.
pub fn log_truncation_mass(s: f64, n: usize) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return invalid(format!("width must be positive and finite, got {s}"));
    }
    if n < 1 {
        return invalid("range must be at least 1");
    }
    // total = 1 + 2 * sum_{l >= 1}, tails = 2 * sum_{l > n}
    let log_pos = log_tail(s, 1);
    let log_total = (1.0 + 2.0 * log_pos.exp()).ln();
    let log_tails = 2f64.ln() + log_tail(s, n as i64 + 1);
    Ok(log_tails - log_total)
}

/// Unit-variance Gaussian density `G`.
pub fn unit_gaussian_density(x: f64) -> f64 {
    std_normal_pdf(x)
}

/// Integration domain for [`chi2_divergence_1d`].
#[derive(Debug, Clone, Default)]
pub struct IntegrationSpec {
    pub lo: f64,
    pub hi: f64,
    /// Points where the density may jump.
    pub breaks: Vec<f64>,
}

impl IntegrationSpec {
    pub fn real_line() -> Self {
        Self {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
            breaks: Vec::new(),
        }
    }

    pub fn finite(lo: f64, hi: f64, breaks: Vec<f64>) -> Self {
        Self { lo, hi, breaks }
    }
}

/// `chi^2(P, N(0,1)) = int p(x)^2 / G(x) dx - 1`.
pub fn chi2_divergence_1d<F>(p: F, grid: &IntegrationSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let ln_sqrt_2pi = 0.5 * (2.0 * PI).ln();
    let overflow = std::cell::Cell::new(None);
    let integrand = |x: f64| {
        let v = p(x);
        if v <= 0.0 {
            return 0.0;
        }
        let out = (2.0 * v.ln() + 0.5 * x * x + ln_sqrt_2pi).exp();
        if !out.is_finite() && overflow.get().is_none() {
            overflow.set(Some(x));
        }
        out
    };
    let opts = QuadOptions {
        abs_tol: 1e-12,
        rel_tol: 1e-10,
        max_panels: 20_000,
    };
    let est = integrate(integrand, grid.lo, grid.hi, &grid.breaks, opts);
    if let Some(x) = overflow.get() {
        return Err(Error::Overflow(format!(
            "p(x)^2 / G(x) overflows at x = {x}; the density has mass where G is negligible"
        )));
    }
    Ok(est?.value - 1.0)
}

/// Total variation distance `(1/2) sum |p_i - q_i|` between two weight lists.
pub fn tvd_discrete(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return invalid(format!(
            "weight lists differ in length ({} vs {})",
            p.len(),
            q.len()
        ));
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}
