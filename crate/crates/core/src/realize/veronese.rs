//! Veronese lift: all monomials of total degree `<= D` in graded-lexicographic order.
//!
//! Block `j` holds the degree-`j` monomials. It is built from block `j - 1` by multiplying
//! each variable `x_i` into the suffix of monomials whose smallest variable index is `>= i`,
//! which yields graded-lex order (`1, a, b, a^2, ab, b^2` for two variables) without ever
//! materialising exponent vectors.

use crate::error::{invalid, Error, Result};

/// Upper bound on the number of lifted coordinates this crate will allocate.
pub const MAX_LIFT_DIM: usize = 20_000_000;

/// Layout of the degree-`<= D` monomials in `n` variables.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialIndex {
    pub n: usize,
    pub degree: usize,
    /// `block_start[j]`: offset of the first degree-`j` monomial.
    block_start: Vec<usize>,
    /// `suffix_start[j][i]`: offset, within block `j`, of the first monomial whose smallest
    /// variable index is `>= i` (length `n + 1`, last entry = block length).
    suffix_start: Vec<Vec<usize>>,
    /// For each monomial: smallest variable index and its exponent (`u32::MAX` for `1`).
    lead: Vec<(u32, u32)>,
    /// Multinomial coefficient `|a|! / prod a_i!` of each monomial's exponent vector.
    multinomial: Vec<f64>,
}

/// `C(n + D, D)`, or `None` on overflow.
pub fn lift_dimension(n: usize, degree: usize) -> Option<usize> {
    let mut acc: u128 = 1;
    for i in 1..=degree as u128 {
        acc = acc * (n as u128 + i) / i;
        if acc > usize::MAX as u128 {
            return None;
        }
    }
    Some(acc as usize)
}

/// `sum_{j <= D} (n + 1)^j`, the ordered-tuple count; always `>= C(n + D, D)`.
pub fn tuple_dimension(n: usize, degree: usize) -> f64 {
    (0..=degree).map(|j| ((n + 1) as f64).powi(j as i32)).sum()
}

impl MonomialIndex {
    pub fn new(n: usize, degree: usize) -> Result<Self> {
        if n == 0 || degree == 0 {
            return invalid("lift needs at least one variable and degree >= 1");
        }
        let dim = lift_dimension(n, degree)
            .filter(|d| *d <= MAX_LIFT_DIM)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "lift of dimension {n} to degree {degree} exceeds {MAX_LIFT_DIM} coordinates"
                ))
            })?;
        let mut lead = Vec::with_capacity(dim);
        let mut multinomial = Vec::with_capacity(dim);
        let mut block_start = vec![0];
        let mut suffix_start = vec![vec![0; n + 1]];
        suffix_start[0][n] = 1;
        lead.push((u32::MAX, 0));
        multinomial.push(1.0);
        for j in 1..=degree {
            let prev_start = block_start[j - 1];
            let prev_len = lead.len() - prev_start;
            let start = lead.len();
            block_start.push(start);
            let mut suffix = vec![0; n + 1];
            for i in 0..n {
                suffix[i] = lead.len() - start;
                let from = suffix_start[j - 1][i];
                for t in from..prev_len {
                    let (lv, lp) = lead[prev_start + t];
                    let pow = if lv == i as u32 { lp + 1 } else { 1 };
                    lead.push((i as u32, pow));
                    multinomial.push(multinomial[prev_start + t] * j as f64 / pow as f64);
                }
            }
            suffix[n] = lead.len() - start;
            suffix_start.push(suffix);
        }
        debug_assert_eq!(lead.len(), dim);
        Ok(Self {
            n,
            degree,
            block_start,
            suffix_start,
            lead,
            multinomial,
        })
    }

    pub fn len(&self) -> usize {
        self.lead.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lead.is_empty()
    }

    /// Range of indices holding degree-`j` monomials.
    pub fn block(&self, j: usize) -> std::ops::Range<usize> {
        let end = self.block_start.get(j + 1).copied().unwrap_or(self.len());
        self.block_start[j]..end
    }

    pub fn multinomial(&self, idx: usize) -> f64 {
        self.multinomial[idx]
    }

    /// Total degree of monomial `idx`.
    pub fn degree_of(&self, idx: usize) -> usize {
        self.block_start.partition_point(|&s| s <= idx) - 1
    }

    /// Exponent vector of monomial `idx` (for diagnostics; not used on hot paths).
    pub fn exponents(&self, idx: usize) -> Vec<u32> {
        let mut e = vec![0; self.n];
        let mut cur = idx;
        let mut j = self.degree_of(idx);
        while j > 0 {
            let (lv, _) = self.lead[cur];
            e[lv as usize] += 1;
            // Locate the parent in block j - 1.
            let local = cur - self.block_start[j];
            let within_var = local - self.suffix_start[j][lv as usize];
            cur = self.block_start[j - 1] + self.suffix_start[j - 1][lv as usize] + within_var;
            j -= 1;
        }
        e
    }

    /// Write the lift of `x` into `out` (length [`Self::len`]).
    pub fn lift_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(out.len(), self.len());
        out[0] = 1.0;
        for j in 1..=self.degree {
            let prev = self.block_start[j - 1];
            let prev_end = self.block_start[j];
            let mut w = prev_end;
            for (i, &xi) in x.iter().enumerate() {
                let from = prev + self.suffix_start[j - 1][i];
                let (src, dst) = out.split_at_mut(prev_end);
                let len = prev_end - from;
                for (d, s) in dst[w - prev_end..w - prev_end + len]
                    .iter_mut()
                    .zip(&src[from..prev_end])
                {
                    *d = xi * s;
                }
                w += len;
            }
        }
    }

    /// Lift with an overflow guard on `max|x_i|^D`.
    pub fn lift(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        let big = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !big.powi(self.degree as i32).is_finite() {
            return Err(Error::Overflow(format!(
                "|x|_inf = {big} overflows at lift degree {}",
                self.degree
            )));
        }
        let mut out = vec![0.0; self.len()];
        self.lift_into(x, &mut out);
        Ok(out)
    }
}

/// One-shot lift of `x` to degree `degree`.
pub fn veronese_lift(x: &[f64], degree: usize) -> Result<Vec<f64>> {
    MonomialIndex::new(x.len(), degree)?.lift(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_variables_degree_two() {
        let v = veronese_lift(&[2.0, 3.0], 2).unwrap();
        assert_eq!(v, vec![1.0, 2.0, 3.0, 4.0, 6.0, 9.0]);
        let idx = MonomialIndex::new(2, 2).unwrap();
        assert_eq!(idx.exponents(4), vec![1, 1]);
        assert_eq!(idx.multinomial(4), 2.0);
        assert_eq!(idx.multinomial(3), 1.0);
    }

    #[test]
    fn dimensions() {
        assert_eq!(lift_dimension(16, 2), Some(153));
        assert_eq!(lift_dimension(16, 6), Some(74_613));
        for (n, d) in [(1, 1), (3, 4), (16, 2), (8, 3), (16, 6)] {
            let idx = MonomialIndex::new(n, d).unwrap();
            assert_eq!(idx.len(), lift_dimension(n, d).unwrap());
            assert!(tuple_dimension(n, d) >= idx.len() as f64);
        }
    }

    #[test]
    fn zero_lifts_to_constant() {
        let v = veronese_lift(&[0.0; 4], 3).unwrap();
        assert_eq!(v[0], 1.0);
        assert!(v[1..].iter().all(|x| *x == 0.0));
    }

    #[test]
    fn lift_matches_exponents() {
        let x = [0.7, -1.3, 2.1];
        let idx = MonomialIndex::new(3, 4).unwrap();
        let v = idx.lift(&x).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for (i, val) in v.iter().enumerate() {
            let e = idx.exponents(i);
            assert_eq!(e.iter().sum::<u32>() as usize, idx.degree_of(i));
            let want: f64 = e.iter().zip(&x).map(|(p, b)| b.powi(*p as i32)).product();
            assert!((val - want).abs() < 1e-12 * want.abs().max(1.0));
            assert!(seen.insert(e), "duplicate monomial at {i}");
        }
    }

    #[test]
    fn overflow_guard() {
        assert!(veronese_lift(&[1e200, 0.0], 2).is_err());
        assert!(MonomialIndex::new(0, 2).is_err());
        assert!(MonomialIndex::new(1000, 10).is_err());
    }
}
