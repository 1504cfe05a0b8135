//! Globally adaptive Gauss–Kronrod (7/15) integration.
//!
//! Densities in this crate are piecewise smooth with jumps at truncation boundaries, so every
//! entry point accepts explicit breakpoints; the integrand is never evaluated across a jump
//! inside a single panel.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Tolerances and limits for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-12,
            max_panels: 4000,
        }
    }
}

impl QuadOptions {
    pub fn tight() -> Self {
        Self {
            abs_tol: 1e-15,
            rel_tol: 1e-13,
            max_panels: 20_000,
        }
    }
}

/// Integral value with the accumulated Kronrod error estimate.
#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub panels: usize,
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &wk)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let sum = f(center - dx) + f(center + dx);
        kron += wk * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    (kron * half, ((kron - gauss) * half).abs())
}

fn integrate_piece<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    cuts: &[f64],
    opts: QuadOptions,
) -> Result<Estimate> {
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) => {
            let mut pts = Vec::with_capacity(cuts.len() + 2);
            pts.push(lo);
            pts.extend_from_slice(cuts);
            pts.push(hi);
            adapt(f, &pts, opts)
        }
        // x = lo + t / (1 - t), t in [0, 1)
        (true, false) => {
            let g = |t: f64| {
                if t >= 1.0 {
                    return 0.0;
                }
                let v = f(lo + t / (1.0 - t));
                if v == 0.0 {
                    0.0
                } else {
                    v / ((1.0 - t) * (1.0 - t))
                }
            };
            adapt(&g, &[0.0, 1.0], opts)
        }
        // x = hi - t / (1 - t)
        (false, true) => {
            let g = |t: f64| {
                if t >= 1.0 {
                    return 0.0;
                }
                let v = f(hi - t / (1.0 - t));
                if v == 0.0 {
                    0.0
                } else {
                    v / ((1.0 - t) * (1.0 - t))
                }
            };
            adapt(&g, &[0.0, 1.0], opts)
        }
        // x = t / (1 - t^2), t in (-1, 1)
        (false, false) => {
            let g = |t: f64| {
                if t.abs() >= 1.0 {
                    return 0.0;
                }
                let d = 1.0 - t * t;
                let v = f(t / d);
                if v == 0.0 {
                    0.0
                } else {
                    v * (1.0 + t * t) / (d * d)
                }
            };
            adapt(&g, &[-1.0, 0.0, 1.0], opts)
        }
    }
}

fn adapt<F: Fn(f64) -> f64>(f: &F, cuts: &[f64], opts: QuadOptions) -> Result<Estimate> {
    let mut heap = BinaryHeap::new();
    let mut value = 0.0;
    let mut error = 0.0;
    for w in cuts.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let (v, e) = kronrod(f, w[0], w[1]);
        value += v;
        error += e;
        heap.push(Panel {
            a: w[0],
            b: w[1],
            value: v,
            error: e,
        });
    }
    let mut panels = heap.len();
    loop {
        if !value.is_finite() {
            return Err(Error::Overflow(format!(
                "integrand produced a non-finite partial integral ({value})"
            )));
        }
        if error <= opts.abs_tol.max(opts.rel_tol * value.abs()) {
            return Ok(Estimate {
                value,
                error,
                panels,
            });
        }
        if panels >= opts.max_panels {
            return Err(Error::Quadrature(format!(
                "{panels} panels, estimate {value:e} with error {error:e}"
            )));
        }
        let Some(worst) = heap.pop() else {
            return Ok(Estimate {
                value,
                error,
                panels,
            });
        };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Panel can no longer be split in floating point.
            return Err(Error::Quadrature(format!(
                "panel [{:e}, {:e}] exhausted precision, error {error:e}",
                worst.a, worst.b
            )));
        }
        let (v1, e1) = kronrod(f, worst.a, mid);
        let (v2, e2) = kronrod(f, mid, worst.b);
        value += v1 + v2 - worst.value;
        error += e1 + e2 - worst.error;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
        panels += 1;
    }
}

/// Integrate `f` over `[a, b]` (either end may be infinite), splitting at `breaks`.
pub fn integrate<F>(f: F, a: f64, b: f64, breaks: &[f64], opts: QuadOptions) -> Result<Estimate>
where
    F: Fn(f64) -> f64,
{
    if a.is_nan() || b.is_nan() || a > b {
        return Err(Error::InvalidParameter(format!(
            "integration range [{a}, {b}] is not ordered"
        )));
    }
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            panels: 0,
        });
    }
    let mut inner: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|x| x.is_finite() && *x > a && *x < b)
        .collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();

    // Infinite tails are mapped separately so each piece lands on a finite panel.
    let mut pieces: Vec<(f64, f64, &[f64])> = Vec::new();
    if a.is_finite() && b.is_finite() {
        pieces.push((a, b, &inner));
    } else if inner.is_empty() {
        if a.is_finite() || b.is_finite() {
            pieces.push((a, b, &[]));
        } else {
            pieces.push((a, 0.0, &[]));
            pieces.push((0.0, b, &[]));
        }
    } else {
        let first = inner[0];
        let last = inner[inner.len() - 1];
        if a < first {
            pieces.push((a, first, &[]));
        }
        if inner.len() >= 2 {
            pieces.push((first, last, &inner[1..inner.len() - 1]));
        }
        if last < b {
            pieces.push((last, b, &[]));
        }
    }

    let mut total = Estimate {
        value: 0.0,
        error: 0.0,
        panels: 0,
    };
    for (lo, hi, cuts) in pieces {
        if hi <= lo {
            continue;
        }
        let est = integrate_piece(&f, lo, hi, cuts, opts)?;
        total.value += est.value;
        total.error += est.error;
        total.panels += est.panels;
    }
    Ok(total)
}

/// Convenience wrapper returning only the value.
pub fn integrate_value<F>(f: F, a: f64, b: f64, breaks: &[f64]) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    integrate(f, a, b, breaks, QuadOptions::default()).map(|e| e.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let est = integrate(|x| x * x * x + 2.0, 0.0, 2.0, &[], QuadOptions::default()).unwrap();
        assert!((est.value - 8.0).abs() < 1e-13);
    }

    #[test]
    fn gaussian_over_real_line() {
        let v = integrate_value(|x: f64| (-0.5 * x * x).exp(), f64::NEG_INFINITY, f64::INFINITY, &[])
            .unwrap();
        assert!((v - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-11);
    }

    #[test]
    fn jump_is_handled_with_break() {
        let f = |x: f64| if x < 0.3 { 1.0 } else { 2.0 };
        let v = integrate_value(f, 0.0, 1.0, &[0.3]).unwrap();
        assert!((v - 1.7).abs() < 1e-13);
    }

    #[test]
    fn half_line() {
        let v = integrate_value(|x: f64| (-x).exp(), 1.0, f64::INFINITY, &[]).unwrap();
        assert!((v - (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn rejects_reversed_range() {
        assert!(integrate_value(|x| x, 1.0, 0.0, &[]).is_err());
    }
}
