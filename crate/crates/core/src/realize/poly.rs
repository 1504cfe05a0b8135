use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::interval::Interval;

/// Real polynomial in the monomial basis, coefficients in ascending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnivariatePoly {
    pub coefficients: Vec<f64>,
}

impl UnivariatePoly {
    /// Trailing zero coefficients are dropped; the zero polynomial is rejected.
    pub fn new(mut coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.iter().any(|c| !c.is_finite()) {
            return invalid("polynomial coefficients must be finite");
        }
        while coefficients.last() == Some(&0.0) {
            coefficients.pop();
        }
        if coefficients.is_empty() {
            return invalid("zero polynomial");
        }
        Ok(Self { coefficients })
    }

    /// Monic polynomial `prod (z - r)`.
    pub fn from_roots(roots: &[f64]) -> Self {
        let mut c = vec![1.0];
        for &r in roots {
            let mut next = vec![0.0; c.len() + 1];
            for (i, &a) in c.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= r * a;
            }
            c = next;
        }
        Self { coefficients: c }
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn leading(&self) -> f64 {
        *self.coefficients.last().expect("non-empty")
    }

    pub fn eval(&self, z: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, c| acc * z + c)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            coefficients: self.coefficients.iter().map(|c| c * factor).collect(),
        }
    }

    /// Copy scaled to unit Euclidean coefficient norm, together with the removed factor.
    pub fn normalized(&self) -> (Self, f64) {
        let norm = self.coefficients.iter().map(|c| c * c).sum::<f64>().sqrt();
        (self.scaled(1.0 / norm), norm)
    }

    pub fn derivative(&self) -> Option<Self> {
        if self.degree() == 0 {
            return None;
        }
        let c = self
            .coefficients
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| i as f64 * c)
            .collect();
        Some(Self { coefficients: c })
    }

    /// Remainder of division by `d`, with near-zero leading terms (relative to the dividend
    /// scale) cleaned away. `None` when the remainder vanishes.
    fn remainder(&self, d: &Self) -> Option<Self> {
        let mut r = self.coefficients.clone();
        let scale = r.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let dd = d.degree();
        let lead = d.leading();
        while r.len() > dd {
            let q = r[r.len() - 1] / lead;
            let shift = r.len() - 1 - dd;
            for (i, &dc) in d.coefficients.iter().enumerate() {
                r[shift + i] -= q * dc;
            }
            r.pop();
        }
        while let Some(&last) = r.last() {
            if last.abs() <= 8.0 * f64::EPSILON * scale {
                r.pop();
            } else {
                break;
            }
        }
        if r.is_empty() {
            None
        } else {
            Some(Self { coefficients: r })
        }
    }

    /// Sturm sequence `p, p', -rem(p, p'), ...`.
    pub fn sturm_sequence(&self) -> Vec<Self> {
        let mut seq = vec![self.clone()];
        let Some(d) = self.derivative() else {
            return seq;
        };
        seq.push(d);
        loop {
            let n = seq.len();
            match seq[n - 2].remainder(&seq[n - 1]) {
                Some(r) => seq.push(r.scaled(-1.0)),
                None => break,
            }
            if seq.last().map(|p| p.degree()) == Some(0) {
                break;
            }
        }
        seq
    }

    /// Number of distinct real roots in `(a, b]` by Sturm's theorem.
    pub fn count_roots(&self, a: f64, b: f64) -> usize {
        let seq = self.sturm_sequence();
        let changes = |x: f64| {
            let mut count = 0usize;
            let mut prev = 0.0f64;
            for p in &seq {
                let v = p.eval(x);
                if v != 0.0 {
                    if prev != 0.0 && (v > 0.0) != (prev > 0.0) {
                        count += 1;
                    }
                    prev = v;
                }
            }
            count
        };
        changes(a).saturating_sub(changes(b))
    }

    /// Strict sign of the polynomial on the closed interval, certified by a dense grid and
    /// Sturm root isolation; `None` if the polynomial vanishes or changes sign there.
    pub fn certified_sign(&self, iv: &Interval, grid: usize) -> Option<SignCertificate> {
        let at_lo = self.eval(iv.lo);
        if at_lo == 0.0 || self.count_roots(iv.lo, iv.hi) != 0 {
            return None;
        }
        let positive = at_lo > 0.0;
        let mut extreme = at_lo.abs();
        let steps = grid.max(2);
        for i in 0..=steps {
            let z = iv.lo + iv.width() * i as f64 / steps as f64;
            let v = self.eval(z);
            if v == 0.0 || (v > 0.0) != positive {
                return None;
            }
            extreme = extreme.min(v.abs());
        }
        Some(SignCertificate {
            positive,
            min_abs: extreme,
        })
    }
}

/// Outcome of [`UnivariatePoly::certified_sign`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignCertificate {
    pub positive: bool,
    /// Smallest `|p|` seen on the grid.
    pub min_abs: f64,
}
