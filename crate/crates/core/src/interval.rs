use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Closed interval `[lo, hi]` on the real line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "interval endpoints out of order: [{lo}, {hi}]");
        Self { lo, hi }
    }

    pub fn centered(center: f64, half_width: f64) -> Self {
        Self::new(center - half_width, center + half_width)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Which side of a two-class interval layout an interval belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Plus,
    Minus,
}

/// True if `x` lies in any of `intervals`.
pub fn in_union(intervals: &[Interval], x: f64) -> bool {
    intervals.iter().any(|i| i.contains(x))
}

/// Merge two labelled interval lists into one list sorted by left endpoint.
pub fn tagged_sorted(plus: &[Interval], minus: &[Interval]) -> Vec<(Interval, Side, usize)> {
    let mut all: Vec<_> = plus
        .iter()
        .enumerate()
        .map(|(i, iv)| (*iv, Side::Plus, i))
        .chain(minus.iter().enumerate().map(|(i, iv)| (*iv, Side::Minus, i)))
        .collect();
    all.sort_by(|a, b| a.0.lo.total_cmp(&b.0.lo));
    all
}

/// Smallest gap between consecutive intervals of a sorted, pairwise disjoint list.
///
/// Returns an [`Error::Overlap`] naming the first colliding pair (indices into the sorted list).
pub fn min_gap_sorted(sorted: &[Interval]) -> Result<f64> {
    let mut gap = f64::INFINITY;
    for (i, pair) in sorted.windows(2).enumerate() {
        let g = pair[1].lo - pair[0].hi;
        if g <= 0.0 {
            return Err(Error::Overlap {
                left: i,
                right: i + 1,
                detail: format!(
                    "[{:.6}, {:.6}] meets [{:.6}, {:.6}]",
                    pair[0].lo, pair[0].hi, pair[1].lo, pair[1].hi
                ),
            });
        }
        gap = gap.min(g);
    }
    Ok(gap)
}
