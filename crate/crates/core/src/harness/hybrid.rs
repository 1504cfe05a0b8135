//! Exhaustive check that swapping one distribution for a `eta`-close one moves any
//! distinguisher's advantage by at most `eta`, on small discrete supports.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::gaussian::tvd_discrete;
use crate::Rng;

/// Largest support for which all `2^s` deterministic distinguishers are enumerated.
pub const MAX_SUPPORT: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferReport {
    /// `TVD(D1, D1')`.
    pub tvd: f64,
    /// `max_A | adv_A(D0, D1) - adv_A(D0, D1') |` over all deterministic `A`.
    pub max_shift: f64,
    pub distinguishers: usize,
}

impl TransferReport {
    pub fn holds(&self) -> bool {
        self.max_shift <= self.tvd + 1e-12
    }
}

/// Mass `p` puts on the set encoded by the bit mask.
fn mass(p: &[f64], mask: u32) -> f64 {
    p.iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, v)| v)
        .sum()
}

/// Enumerate every distinguisher `A = 1[x in S]` on a common support.
pub fn advantage_transfer(d0: &[f64], d1: &[f64], d1p: &[f64]) -> Result<TransferReport> {
    let s = d0.len();
    if s == 0 || s > MAX_SUPPORT {
        return invalid(format!("support size must be in 1..={MAX_SUPPORT}, got {s}"));
    }
    let tvd = tvd_discrete(d1, d1p)?;
    tvd_discrete(d0, d1)?;
    let mut max_shift: f64 = 0.0;
    for mask in 0..(1u32 << s) {
        let a0 = mass(d0, mask);
        let adv = (a0 - mass(d1, mask)).abs();
        let adv_p = (a0 - mass(d1p, mask)).abs();
        max_shift = max_shift.max((adv - adv_p).abs());
    }
    Ok(TransferReport {
        tvd,
        max_shift,
        distinguishers: 1 << s,
    })
}

/// A random probability vector on `s` points (normalised exponentials).
pub fn random_distribution(s: usize, rng: &mut Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..s).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|x| x / total).collect()
}
