//! Small dense vector helpers.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Result};

/// Inner product over the common prefix of `a` and `b`.
///
/// Eight independent partial sums let the compiler vectorise the loop; lifted vectors run to
/// tens of thousands of coordinates, where a single serial accumulator dominates run time.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut lanes = [0.0f64; 8];
    let (ca, cb) = (a.chunks_exact(8), b.chunks_exact(8));
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for i in 0..8 {
            lanes[i] += x[i] * y[i];
        }
    }
    let tail: f64 = ra.iter().zip(rb).map(|(x, y)| x * y).sum();
    lanes.iter().sum::<f64>() + tail
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Check `| |w| - 1 | < 1e-12`.
pub fn require_unit(w: &[f64]) -> Result<()> {
    if w.is_empty() {
        return invalid("direction must be non-empty");
    }
    let n = norm(w);
    if !((n - 1.0).abs() < 1e-12) {
        return invalid(format!("direction must be a unit vector, |w| = {n}"));
    }
    Ok(())
}

/// Uniformly random unit vector in `R^n`, renormalised so `| |w| - 1 |` is at rounding level.
pub fn random_unit<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let len = norm(&v);
        if len > 1e-8 {
            let mut w: Vec<f64> = v.iter().map(|x| x / len).collect();
            // A second pass removes the residual from the first division.
            let len2 = norm(&w);
            w.iter_mut().for_each(|x| *x /= len2);
            return w;
        }
    }
}

/// Householder reflection `H = I - 2 v v^T / |v|^2` with `v = e_1 - w`, so `H e_1 = w`.
///
/// Columns `2..n` of `H` form an orthonormal completion of `w`.
#[derive(Debug, Clone)]
pub struct Householder {
    v: Vec<f64>,
    scale: f64,
}

impl Householder {
    pub fn mapping_e1_to(w: &[f64]) -> Result<Self> {
        require_unit(w)?;
        let mut v: Vec<f64> = w.iter().map(|x| -x).collect();
        v[0] += 1.0;
        let vv = dot(&v, &v);
        let scale = if vv < 1e-300 { 0.0 } else { 2.0 / vv };
        Ok(Self { v, scale })
    }

    /// `out = H u`.
    pub fn apply(&self, u: &[f64], out: &mut [f64]) {
        let proj = self.scale * dot(&self.v, u);
        for ((o, x), v) in out.iter_mut().zip(u).zip(&self.v) {
            *o = x - proj * v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn householder_maps_e1() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for n in [1usize, 2, 5, 16] {
            let w = random_unit(n, &mut rng);
            let h = Householder::mapping_e1_to(&w).unwrap();
            let mut e1 = vec![0.0; n];
            e1[0] = 1.0;
            let mut out = vec![0.0; n];
            h.apply(&e1, &mut out);
            for (a, b) in out.iter().zip(&w) {
                assert!((a - b).abs() < 1e-14);
            }
            // Other basis vectors land orthogonal to w with unit length.
            for j in 1..n {
                let mut ej = vec![0.0; n];
                ej[j] = 1.0;
                h.apply(&ej, &mut out);
                assert!(dot(&out, &w).abs() < 1e-14);
                assert!((norm(&out) - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn identity_when_w_is_e1() {
        let h = Householder::mapping_e1_to(&[1.0, 0.0, 0.0]).unwrap();
        let mut out = [0.0; 3];
        h.apply(&[0.3, -1.0, 2.0], &mut out);
        assert_eq!(out, [0.3, -1.0, 2.0]);
    }

    #[test]
    fn non_unit_rejected() {
        assert!(Householder::mapping_e1_to(&[1.0, 1.0]).is_err());
    }
}
