use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::norm;

/// Which generator produced a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    PancakeSq,
    Hclwe,
    Null,
    Custom,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::PancakeSq => "pancake-sq",
            Family::Hclwe => "hclwe",
            Family::Null => "null",
            Family::Custom => "custom",
        }
    }
}

/// Covariance convention for Gaussian coordinates: `I` or `I / (2 pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VarianceConvention {
    Unit,
    OneOverTwoPi,
}

impl VarianceConvention {
    pub fn std_dev(&self) -> f64 {
        match self {
            VarianceConvention::Unit => 1.0,
            VarianceConvention::OneOverTwoPi => 1.0 / (2.0 * std::f64::consts::PI).sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub family: Family,
    pub seed: Option<u64>,
    /// Planted direction; learners must not read it.
    pub hidden_direction: Option<Vec<f64>>,
    pub params: BTreeMap<String, f64>,
}

impl DatasetMeta {
    pub fn new(family: Family) -> Self {
        Self {
            family,
            seed: None,
            hidden_direction: None,
            params: BTreeMap::new(),
        }
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }
}

/// `m` labelled points in `R^dim`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub dim: usize,
    pub points: Vec<f64>,
    pub labels: Vec<i8>,
    pub meta: DatasetMeta,
}

impl LabeledDataset {
    pub fn new(dim: usize, points: Vec<f64>, labels: Vec<i8>, meta: DatasetMeta) -> Result<Self> {
        let ds = Self {
            dim,
            points,
            labels,
            meta,
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn empty(dim: usize, meta: DatasetMeta) -> Self {
        Self {
            dim,
            points: Vec::new(),
            labels: Vec::new(),
            meta,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.points.len() != self.dim * self.labels.len() {
            return Err(Error::DimensionMismatch {
                expected: self.dim * self.labels.len(),
                got: self.points.len(),
            });
        }
        if let Some(i) = self.points.iter().position(|x| !x.is_finite()) {
            return invalid(format!("non-finite coordinate at flat index {i}"));
        }
        if let Some(i) = self.labels.iter().position(|y| *y != 1 && *y != -1) {
            return invalid(format!("label {} at row {i} is not +-1", self.labels[i]));
        }
        if let Some(w) = &self.meta.hidden_direction {
            if w.len() != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    got: w.len(),
                });
            }
            if (norm(w) - 1.0).abs() >= 1e-12 {
                return invalid("hidden direction is not unit norm");
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], i8)> + '_ {
        self.points
            .chunks_exact(self.dim.max(1))
            .zip(self.labels.iter().copied())
    }

    /// Rows `range` as a new dataset with the same metadata.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Self {
        Self {
            dim: self.dim,
            points: self.points[range.start * self.dim..range.end * self.dim].to_vec(),
            labels: self.labels[range].to_vec(),
            meta: self.meta.clone(),
        }
    }

    /// First `at` rows and the remainder.
    pub fn split_at(&self, at: usize) -> (Self, Self) {
        (self.slice(0..at), self.slice(at..self.len()))
    }

    /// Copy with the planted direction removed.
    pub fn without_hidden(&self) -> Self {
        let mut out = self.clone();
        out.meta.hidden_direction = None;
        out
    }

    pub fn positive_fraction(&self) -> f64 {
        if self.is_empty() {
            return 0.0;
        }
        self.labels.iter().filter(|y| **y == 1).count() as f64 / self.len() as f64
    }
}

/// Points `N(0, sigma^2 I_n)` with labels from an independent fair coin.
pub fn sample_null<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    convention: VarianceConvention,
    rng: &mut R,
) -> LabeledDataset {
    let sd = convention.std_dev();
    let mut points = Vec::with_capacity(n * m);
    let mut labels = Vec::with_capacity(m);
    for _ in 0..m {
        labels.push(if rng.random::<bool>() { 1 } else { -1 });
        for _ in 0..n {
            let g: f64 = StandardNormal.sample(rng);
            points.push(sd * g);
        }
    }
    let meta = DatasetMeta::new(Family::Null).with_param(
        "variance",
        match convention {
            VarianceConvention::Unit => 1.0,
            VarianceConvention::OneOverTwoPi => 1.0 / (2.0 * std::f64::consts::PI),
        },
    );
    LabeledDataset {
        dim: n,
        points,
        labels,
        meta,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn empty_null_dataset() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let ds = sample_null(4, 0, VarianceConvention::Unit, &mut rng);
        assert!(ds.is_empty());
        ds.validate().unwrap();
    }

    #[test]
    fn validate_catches_bad_rows() {
        let meta = DatasetMeta::new(Family::Custom);
        assert!(LabeledDataset::new(2, vec![0.0; 3], vec![1, -1], meta.clone()).is_err());
        assert!(LabeledDataset::new(1, vec![0.0, 1.0], vec![1, 0], meta.clone()).is_err());
        assert!(LabeledDataset::new(1, vec![f64::NAN], vec![1], meta.clone()).is_err());
        let mut bad = meta;
        bad.hidden_direction = Some(vec![0.5]);
        assert!(LabeledDataset::new(1, vec![0.0], vec![1], bad).is_err());
    }

    #[test]
    fn null_covariance_and_independence() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let (n, m) = (6, 40_000);
        let ds = sample_null(n, m, VarianceConvention::Unit, &mut rng);
        let tol = 5.0 * (n as f64 / m as f64).sqrt();
        for a in 0..n {
            for b in 0..n {
                let c = ds.iter().map(|(x, _)| x[a] * x[b]).sum::<f64>() / m as f64;
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((c - want).abs() < tol, "cov[{a}][{b}] = {c}");
            }
            let corr = ds.iter().map(|(x, y)| x[a] * y as f64).sum::<f64>() / m as f64;
            assert!(corr.abs() < 4.0 / (m as f64).sqrt());
        }
        assert!((ds.positive_fraction() - 0.5).abs() < 4.0 / (m as f64).sqrt());
    }
}
