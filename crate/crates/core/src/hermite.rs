//! Probabilists' Hermite polynomials, Gauss–Hermite rules and the moment-matching pair.

use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use crate::error::{invalid, Error, Result};

pub const MAX_DEGREE: usize = 64;

/// `He_k` in the monomial basis (ascending powers).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HermitePoly {
    pub degree: usize,
    pub coefficients: Vec<f64>,
}

impl HermitePoly {
    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }
}

/// Coefficients of `He_k` from `He_{k+1} = x He_k - k He_{k-1}`.
pub fn hermite_poly(k: usize) -> Result<HermitePoly> {
    if k > MAX_DEGREE {
        return invalid(format!("Hermite degree {k} exceeds {MAX_DEGREE}"));
    }
    let mut prev = vec![1.0];
    if k == 0 {
        return Ok(HermitePoly {
            degree: 0,
            coefficients: prev,
        });
    }
    let mut cur = vec![0.0, 1.0];
    for j in 1..k {
        let mut next = vec![0.0; j + 2];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] += c;
        }
        for (i, c) in prev.iter().enumerate() {
            next[i] -= j as f64 * c;
        }
        prev = cur;
        cur = next;
    }
    Ok(HermitePoly {
        degree: k,
        coefficients: cur,
    })
}

/// `(He_k(x), He_{k-1}(x))` by the three-term recurrence; more stable than monomial Horner.
pub fn hermite_eval_pair(k: usize, x: f64) -> (f64, f64) {
    if k == 0 {
        return (1.0, 0.0);
    }
    let mut prev = 1.0;
    let mut cur = x;
    for j in 1..k {
        let next = x * cur - j as f64 * prev;
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// `He_k(x)`.
pub fn hermite_eval(k: usize, x: f64) -> f64 {
    hermite_eval_pair(k, x).0
}

/// Eigen-decomposition of a symmetric tridiagonal matrix by implicit QL with Wilkinson shifts.
///
/// Returns eigenvalues and the first component of each normalised eigenvector.
fn tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(off);
    // Only the first row of the eigenvector matrix is needed for quadrature weights.
    let mut z0 = vec![0.0; n];
    z0[0] = 1.0;
    // Full matrix rows would be needed for eigenvectors; rotations act on columns, so the
    // first row transforms independently.
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::Consistency(
                    "tridiagonal QL iteration did not converge".into(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut early = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let t = z0[i + 1];
                z0[i + 1] = s * z0[i] + c * t;
                z0[i] = c * z0[i] - s * t;
            }
            if early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok((d, z0))
}

/// Real roots of `He_k`, ascending: Jacobi-matrix eigenvalues polished by Newton steps.
pub fn hermite_roots(k: usize) -> Result<Vec<f64>> {
    Ok(precise_rule(k)?.0.iter().map(|x| x.hi()).collect())
}

/// `(He_k(x), He_{k-1}(x))` in double-double arithmetic.
fn hermite_eval_pair_dd(k: usize, x: TwoFloat) -> (TwoFloat, TwoFloat) {
    let mut prev = TwoFloat::from(1.0);
    let mut cur = x;
    if k == 0 {
        return (prev, TwoFloat::from(0.0));
    }
    for j in 1..k {
        let next = x * cur - prev * j as f64;
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// `a / b` to full double-double accuracy (one correction step on the `f64` quotient).
fn dd_div(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let q1 = a.hi() / b.hi();
    let r = a - b * q1;
    let q2 = (r.hi() + r.lo()) / b.hi();
    let q = TwoFloat::new_add(q1, q2);
    let r = a - b * q;
    q + (r.hi() + r.lo()) / b.hi()
}

/// Gauss–Hermite nodes and normalised weights carried in double-double precision.
///
/// The f64 Golub–Welsch nodes are polished by Newton steps in double-double arithmetic and
/// then symmetrised (`x_{k-1-i} = -x_i`), so the rule integrates polynomials of degree
/// `2k - 1` to roughly 30 significant digits; moments near `10^15` stay accurate far below
/// one unit.
fn precise_rule(k: usize) -> Result<(Vec<TwoFloat>, Vec<TwoFloat>)> {
    let (approx, _) = golub_welsch(k)?;
    let mut roots: Vec<TwoFloat> = approx
        .iter()
        .map(|&x0| {
            let mut x = TwoFloat::from(x0);
            for _ in 0..3 {
                let (p, q) = hermite_eval_pair_dd(k, x);
                if q.hi() == 0.0 {
                    break;
                }
                x -= dd_div(p, q * k as f64);
            }
            x
        })
        .collect();
    for i in 0..k / 2 {
        let j = k - 1 - i;
        let mag = (roots[j] - roots[i]) / 2.0;
        roots[i] = -mag;
        roots[j] = mag;
    }
    if k % 2 == 1 {
        roots[k / 2] = TwoFloat::from(0.0);
    }
    let mut fact = TwoFloat::from(1.0);
    for i in 2..=k {
        fact *= i as f64;
    }
    let k2 = (k * k) as f64;
    let mut weights: Vec<TwoFloat> = roots
        .iter()
        .map(|&x| {
            let (_, q) = hermite_eval_pair_dd(k, x);
            dd_div(fact, q * q * k2)
        })
        .collect();
    for i in 0..k / 2 {
        let j = k - 1 - i;
        let avg = (weights[i] + weights[j]) / 2.0;
        weights[i] = avg;
        weights[j] = avg;
    }
    let total = weights.iter().fold(TwoFloat::from(0.0), |a, w| a + *w);
    if (total.hi() - 1.0).abs() > 1e-8 {
        return Err(Error::Consistency(format!(
            "Gauss-Hermite weights for k={k} sum to {}",
            total.hi()
        )));
    }
    for w in weights.iter_mut() {
        *w = dd_div(*w, total);
    }
    Ok((roots, weights))
}

fn golub_welsch(k: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if k == 0 || k > MAX_DEGREE {
        return invalid(format!("Hermite root degree must be in 1..={MAX_DEGREE}, got {k}"));
    }
    let diag = vec![0.0; k];
    let off: Vec<f64> = (1..k).map(|i| (i as f64).sqrt()).collect();
    let (vals, first) = tridiagonal_eigen(&diag, &off)?;
    let mut pairs: Vec<(f64, f64)> = vals
        .into_iter()
        .zip(first.into_iter().map(|v| v * v))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let roots = pairs
        .iter()
        .map(|&(x, _)| {
            // He_k' = k He_{k-1}
            let (p, q) = hermite_eval_pair(k, x);
            if q == 0.0 {
                x
            } else {
                x - p / (k as f64 * q)
            }
        })
        .collect();
    Ok((roots, pairs.into_iter().map(|p| p.1).collect()))
}

/// Finite-support distribution on the real line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDist {
    pub support: Vec<f64>,
    pub weights: Vec<f64>,
    /// Low-order parts of a double-double support (`support[i] + support_lo[i]`); empty when
    /// the support is exactly representable in `f64`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub support_lo: Vec<f64>,
    /// Low-order parts of the weights, as for `support_lo`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub weights_lo: Vec<f64>,
}

impl DiscreteDist {
    pub fn new(support: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if support.len() != weights.len() || support.is_empty() {
            return invalid("support and weights must be non-empty and of equal length");
        }
        if support.windows(2).any(|w| w[1] <= w[0]) {
            return invalid("support must be strictly increasing");
        }
        if weights.iter().any(|w| !(*w > 0.0)) {
            return invalid("weights must be positive");
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return invalid(format!("weights sum to {total}, not 1"));
        }
        Ok(Self {
            support,
            weights,
            support_lo: Vec::new(),
            weights_lo: Vec::new(),
        })
    }

    pub fn point_mass(x: f64) -> Self {
        Self {
            support: vec![x],
            weights: vec![1.0],
            support_lo: Vec::new(),
            weights_lo: Vec::new(),
        }
    }

    fn point_dd(&self, i: usize) -> (TwoFloat, TwoFloat) {
        let x = TwoFloat::new_add(self.support[i], self.support_lo.get(i).copied().unwrap_or(0.0));
        let w = TwoFloat::new_add(self.weights[i], self.weights_lo.get(i).copied().unwrap_or(0.0));
        (x, w)
    }

    /// `E X^l` accumulated in double-double precision.
    pub fn raw_moment_dd(&self, l: u32) -> TwoFloat {
        let mut acc = TwoFloat::from(0.0);
        for i in 0..self.len() {
            let (x, w) = self.point_dd(i);
            let mut p = w;
            for _ in 0..l {
                p *= x;
            }
            acc += p;
        }
        acc
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn raw_moment(&self, l: u32) -> f64 {
        let m = self.raw_moment_dd(l);
        m.hi() + m.lo()
    }
}

/// Gauss–Hermite rule with `k` nodes, normalised to a probability distribution.
///
/// Weights are `k! / (k^2 He_{k-1}(x_i)^2)`; nodes and weights keep double-double residuals
/// so moments can be evaluated far beyond `f64` resolution.
pub fn gauss_hermite_weights(k: usize) -> Result<DiscreteDist> {
    let (roots, weights) = precise_rule(k)?;
    let mut d = DiscreteDist::new(
        roots.iter().map(|x| x.hi()).collect(),
        weights.iter().map(|w| w.hi()).collect(),
    )?;
    d.support_lo = roots.iter().map(|x| x.lo()).collect();
    d.weights_lo = weights.iter().map(|w| w.lo()).collect();
    Ok(d)
}

/// Quadrature weights read off the Jacobi eigenvectors (independent route to
/// [`gauss_hermite_weights`]).
pub fn gauss_hermite_weights_eigen(k: usize) -> Result<Vec<f64>> {
    Ok(golub_welsch(k)?.1)
}

/// The two discrete distributions of the moment-matching construction with geometry summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MomentPair {
    pub k: usize,
    /// `k`-point rule; matches `2k - 1` Gaussian moments.
    pub a: DiscreteDist,
    /// `(k-1)`-point rule; matches `2k - 3` Gaussian moments.
    pub b: DiscreteDist,
    /// Smallest distance between two points of the merged support.
    pub min_gap: f64,
    /// Largest absolute support point.
    pub max_abs: f64,
}

impl MomentPair {
    /// Empirical constant `c` in `min_gap >= c / sqrt(k)`.
    pub fn gap_constant(&self) -> f64 {
        self.min_gap * (self.k as f64).sqrt()
    }

    /// Empirical constant `C` in `max_abs <= C sqrt(k)`.
    pub fn box_constant(&self) -> f64 {
        self.max_abs / (self.k as f64).sqrt()
    }
}

pub fn moment_pair(k: usize) -> Result<MomentPair> {
    if k < 2 {
        return invalid(format!("moment pair needs k >= 2, got {k}"));
    }
    let a = gauss_hermite_weights(k)?;
    let b = gauss_hermite_weights(k - 1)?;
    // Interlacing: a_0 < b_0 < a_1 < ... < b_{k-2} < a_{k-1}.
    let mut merged = Vec::with_capacity(2 * k - 1);
    for i in 0..k {
        merged.push(a.support[i]);
        if i + 1 < k {
            merged.push(b.support[i]);
        }
    }
    if merged.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Consistency(format!(
            "roots of He_{k} and He_{} do not interlace",
            k - 1
        )));
    }
    let min_gap = merged
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    let max_abs = merged.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    Ok(MomentPair {
        k,
        a,
        b,
        min_gap,
        max_abs,
    })
}

/// `E Z^l` for `Z ~ N(0, 1)`: `(l-1)!!` for even `l`, zero for odd `l`.
pub fn gaussian_moment(l: u32) -> f64 {
    if l % 2 == 1 {
        return 0.0;
    }
    if l <= 33 {
        return (1..l).step_by(2).map(|j| j as f64).product();
    }
    // (l-1)!! = l! / (2^{l/2} (l/2)!)
    let half = l / 2;
    let ln_fact = |n: u32| (1..=n).map(|i| (i as f64).ln()).sum::<f64>();
    (ln_fact(l) - half as f64 * 2f64.ln() - ln_fact(half)).exp()
}

/// `E Z^l` in double-double precision (exact through `l = 40`).
pub fn gaussian_moment_dd(l: u32) -> TwoFloat {
    if l % 2 == 1 {
        return TwoFloat::from(0.0);
    }
    (1..l)
        .step_by(2)
        .fold(TwoFloat::from(1.0), |acc, j| acc * j as f64)
}

/// Anything with computable raw moments.
pub trait MomentSource {
    fn raw_moment(&self, l: u32) -> Result<f64>;

    /// `E X^l - E Z^l`; implementors with extra precision should override.
    fn moment_error(&self, l: u32) -> Result<f64> {
        Ok(self.raw_moment(l)? - gaussian_moment(l))
    }
}

impl MomentSource for DiscreteDist {
    fn raw_moment(&self, l: u32) -> Result<f64> {
        Ok(DiscreteDist::raw_moment(self, l))
    }

    fn moment_error(&self, l: u32) -> Result<f64> {
        let diff = self.raw_moment_dd(l) - gaussian_moment_dd(l);
        Ok(diff.hi() + diff.lo())
    }
}

impl MomentSource for crate::gaussian::TruncatedGaussian1D {
    fn raw_moment(&self, l: u32) -> Result<f64> {
        self.moment(l)
    }
}

/// `max_{1 <= l <= l_max} |E X^l - E Z^l|` against the unit Gaussian.
pub fn moment_deviation<D: MomentSource + ?Sized>(d: &D, l_max: u32) -> Result<f64> {
    let mut worst = 0.0f64;
    for l in 1..=l_max {
        worst = worst.max(d.moment_error(l)?.abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_degree_polys() {
        assert_eq!(hermite_poly(0).unwrap().coefficients, vec![1.0]);
        assert_eq!(hermite_poly(2).unwrap().coefficients, vec![-1.0, 0.0, 1.0]);
        assert_eq!(
            hermite_poly(3).unwrap().coefficients,
            vec![0.0, -3.0, 0.0, 1.0]
        );
        assert!(hermite_poly(65).is_err());
    }

    #[test]
    fn recurrence_holds_coefficientwise() {
        for k in 1..30 {
            let a = hermite_poly(k + 1).unwrap().coefficients;
            let b = hermite_poly(k).unwrap().coefficients;
            let c = hermite_poly(k - 1).unwrap().coefficients;
            assert_eq!(*a.last().unwrap(), 1.0);
            for i in 0..a.len() {
                let shifted = if i >= 1 { b[i - 1] } else { 0.0 };
                let lower = c.get(i).copied().unwrap_or(0.0);
                assert_eq!(a[i], shifted - k as f64 * lower);
            }
        }
    }

    #[test]
    fn small_roots() {
        assert_eq!(hermite_roots(1).unwrap(), vec![0.0]);
        let r2 = hermite_roots(2).unwrap();
        assert!((r2[0] + 1.0).abs() < 1e-14 && (r2[1] - 1.0).abs() < 1e-14);
        let r3 = hermite_roots(3).unwrap();
        let s3 = 3f64.sqrt();
        assert!((r3[0] + s3).abs() < 1e-14 && r3[1].abs() < 1e-14 && (r3[2] - s3).abs() < 1e-14);
    }

    #[test]
    fn roots_are_roots() {
        for k in 1..=MAX_DEGREE {
            let roots = hermite_roots(k).unwrap();
            assert_eq!(roots.len(), k);
            for &x in &roots {
                // Scale-aware residual: |He_k(x)| relative to the size of He_k near x.
                let (p, q) = hermite_eval_pair(k, x);
                let scale = (k as f64 * q).abs().max(1.0);
                assert!((p / scale).abs() < 1e-8, "k={k} x={x} He={p}");
            }
        }
    }

    #[test]
    fn weights_small_k() {
        let g2 = gauss_hermite_weights(2).unwrap();
        assert!((g2.weights[0] - 0.5).abs() < 1e-15);
        let g3 = gauss_hermite_weights(3).unwrap();
        assert!((g3.weights[0] - 1.0 / 6.0).abs() < 1e-14);
        assert!((g3.weights[1] - 2.0 / 3.0).abs() < 1e-14);
        assert!((g3.weights[2] - 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn weights_agree_with_eigenvectors() {
        for k in [2usize, 5, 11, 24, 40, 64] {
            let a = gauss_hermite_weights(k).unwrap().weights;
            let b = gauss_hermite_weights_eigen(k).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-10 * x.max(1e-300) + 1e-14, "k={k}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn weights_symmetric() {
        for k in 1..=MAX_DEGREE {
            let g = gauss_hermite_weights(k).unwrap();
            for i in 0..k {
                let j = k - 1 - i;
                assert!((g.support[i] + g.support[j]).abs() < 1e-10);
                assert!((g.weights[i] - g.weights[j]).abs() < 1e-12 * g.weights[i].max(1e-300) + 1e-300);
            }
        }
    }

    #[test]
    fn moment_pair_examples() {
        let p2 = moment_pair(2).unwrap();
        assert_eq!(p2.b.support, vec![0.0]);
        assert!((p2.min_gap - 1.0).abs() < 1e-14);
        let p3 = moment_pair(3).unwrap();
        assert!((p3.min_gap - (3f64.sqrt() - 1.0)).abs() < 1e-13);
        assert!(moment_pair(1).is_err());
    }

    #[test]
    fn interlacing_up_to_64() {
        for k in 2..=MAX_DEGREE {
            let p = moment_pair(k).unwrap();
            assert!(p.max_abs <= 2.0 * (k as f64).sqrt());
            assert!(p.gap_constant() > 0.0);
        }
    }

    #[test]
    fn exactness() {
        for k in 1..=16usize {
            let g = gauss_hermite_weights(k).unwrap();
            for l in 0..=(2 * k - 1) as u32 {
                let err = MomentSource::moment_error(&g, l).unwrap();
                assert!(err.abs() <= 1e-9 * gaussian_moment(l).max(1.0), "k={k} l={l}: {err}");
            }
        }
    }

    #[test]
    fn absolute_deviation_through_2k_minus_1() {
        for k in 2..=16usize {
            let g = gauss_hermite_weights(k).unwrap();
            let dev = moment_deviation(&g, 2 * k as u32 - 1).unwrap();
            assert!(dev < 1e-9, "k={k}: {dev:e}");
        }
    }

    #[test]
    fn deviation_examples() {
        let g = gauss_hermite_weights(4).unwrap();
        assert!(moment_deviation(&g, 7).unwrap() < 1e-10);
        let point = DiscreteDist::point_mass(0.0);
        assert!((moment_deviation(&point, 2).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn double_factorial() {
        assert_eq!(gaussian_moment(0), 1.0);
        assert_eq!(gaussian_moment(4), 3.0);
        assert_eq!(gaussian_moment(7), 0.0);
        assert_eq!(gaussian_moment(10), 945.0);
        let exact_34 = gaussian_moment(32) * 33.0;
        assert!((gaussian_moment(34) - exact_34).abs() < 1e-12 * exact_34);
    }
}
