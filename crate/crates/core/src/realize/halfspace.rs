use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};
use crate::linalg::{norm, require_unit};

use super::poly::UnivariatePoly;
use super::ptf::PtfCollection;
use super::veronese::{tuple_dimension, MonomialIndex};

/// Rows lifted together before each matrix product in [`verify_realization`].
const VERIFY_BATCH: usize = 64;

/// Weights `v` over the lift with `<v, lift(x)> = p(<x, w>)`, unit-normalised.
///
/// Returns the normalised vector and the factor `s` such that `s <v, lift(x)> = p(<x, w>)`.
pub fn ptf_to_halfspace(p: &UnivariatePoly, w: &[f64], index: &MonomialIndex) -> Result<(Vec<f64>, f64)> {
    if p.degree() > index.degree {
        return Err(Error::InvalidParameter(format!(
            "polynomial of degree {} does not fit a degree-{} lift",
            p.degree(),
            index.degree
        )));
    }
    if w.len() != index.n {
        return Err(Error::DimensionMismatch {
            expected: index.n,
            got: w.len(),
        });
    }
    require_unit(w)?;
    // Monomials of w carry the products w^a; the multinomial turns them into the coefficient
    // of x^a in <x, w>^j.
    let mut v = index.lift(w)?;
    for j in 0..=index.degree {
        let c = p.coefficients.get(j).copied().unwrap_or(0.0);
        for i in index.block(j) {
            v[i] *= c * index.multinomial(i);
        }
    }
    let scale = norm(&v);
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::Overflow(format!("lifted weight norm is {scale}")));
    }
    v.iter_mut().for_each(|x| *x /= scale);
    Ok((v, scale))
}

/// Lifted halfspaces `<v_j, lift(x)> >= 0` whose intersection realises a PTF collection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfspaceSet {
    pub input_dim: usize,
    pub lift_degree: usize,
    /// `C(n + D, D)`.
    pub lifted_dim: usize,
    /// Unit-norm weight vectors; the bias is the coefficient of the constant monomial.
    pub weights: Vec<Vec<f64>>,
    /// Factors removed by normalisation (`p_j(<x, w>) = scale_j <v_j, lift(x)>`).
    pub scales: Vec<f64>,
    /// Empirical per-halfspace margins, filled in by [`HalfspaceSet::record_margins`].
    pub margins: Vec<Option<f64>>,
}

impl HalfspaceSet {
    /// Linearise every polynomial of `col` (which must carry a direction) at degree `degree`.
    pub fn from_ptfs(col: &PtfCollection, degree: usize) -> Result<Self> {
        if col.direction.is_empty() {
            return Err(Error::InvalidParameter(
                "PTF collection has no direction attached".into(),
            ));
        }
        let index = MonomialIndex::new(col.direction.len(), degree)?;
        let mut weights = Vec::with_capacity(col.len());
        let mut scales = Vec::with_capacity(col.len());
        for p in &col.polys {
            let (v, s) = ptf_to_halfspace(p, &col.direction, &index)?;
            weights.push(v);
            scales.push(s);
        }
        Ok(Self {
            input_dim: col.direction.len(),
            lift_degree: degree,
            lifted_dim: index.len(),
            margins: vec![None; weights.len()],
            weights,
            scales,
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// The ordered-tuple lift dimension `sum_j (n + 1)^j`, reported alongside `lifted_dim`.
    pub fn tuple_dim(&self) -> f64 {
        tuple_dimension(self.input_dim, self.lift_degree)
    }

    pub fn index(&self) -> Result<MonomialIndex> {
        MonomialIndex::new(self.input_dim, self.lift_degree)
    }

    /// Weight matrix of shape `(lifted_dim, k)`.
    pub fn matrix(&self) -> Array2<f64> {
        let k = self.len();
        let mut m = Array2::zeros((self.lifted_dim, k));
        for (j, w) in self.weights.iter().enumerate() {
            for (i, v) in w.iter().enumerate() {
                m[[i, j]] = *v;
            }
        }
        m
    }

    pub fn record_margins(&mut self, report: &RealizationReport) {
        self.margins = report.per_halfspace_margin.iter().map(|m| Some(*m)).collect();
    }
}

/// Outcome of checking a dataset against a [`HalfspaceSet`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizationReport {
    pub samples: usize,
    /// Samples with `(y = +1) <=> (all scores >= 0)`.
    pub consistent: usize,
    pub consistency: f64,
    /// `min_samples min_j |<v_j, lift(x)>|` with unit `v_j`.
    pub min_margin: f64,
    /// Same, divided by `|lift(x)|`.
    pub min_normalized_margin: f64,
    /// Per-halfspace `min_samples |<v_j, lift(x)>|`.
    pub per_halfspace_margin: Vec<f64>,
    /// Positive samples rejected by halfspace `j`.
    pub violations: Vec<usize>,
    /// Negative samples accepted by every halfspace.
    pub uncovered_negatives: usize,
    pub lifted_dim: usize,
    pub tuple_dim: f64,
}

impl RealizationReport {
    pub fn is_exact(&self) -> bool {
        self.consistent == self.samples
    }
}

/// Lift every sample, score it against every halfspace (batched matrix products) and tally
/// label consistency and margins.
pub fn verify_realization(ds: &LabeledDataset, hs: &HalfspaceSet) -> Result<RealizationReport> {
    if ds.dim != hs.input_dim {
        return Err(Error::DimensionMismatch {
            expected: hs.input_dim,
            got: ds.dim,
        });
    }
    let index = hs.index()?;
    if index.len() != hs.lifted_dim {
        return Err(Error::DimensionMismatch {
            expected: hs.lifted_dim,
            got: index.len(),
        });
    }
    let k = hs.len();
    let w = hs.matrix();
    let n_lift = index.len();
    let mut report = RealizationReport {
        samples: ds.len(),
        consistent: 0,
        consistency: 0.0,
        min_margin: f64::INFINITY,
        min_normalized_margin: f64::INFINITY,
        per_halfspace_margin: vec![f64::INFINITY; k],
        violations: vec![0; k],
        uncovered_negatives: 0,
        lifted_dim: n_lift,
        tuple_dim: hs.tuple_dim(),
    };
    let mut buf = vec![0.0; VERIFY_BATCH * n_lift];
    let mut lift_norms = [0.0; VERIFY_BATCH];
    let mut start = 0;
    while start < ds.len() {
        let rows = VERIFY_BATCH.min(ds.len() - start);
        for r in 0..rows {
            let row = &mut buf[r * n_lift..(r + 1) * n_lift];
            index.lift_into(ds.point(start + r), row);
            // Taken while the row is still in cache; a second pass after the product is
            // memory-bound.
            lift_norms[r] = norm(row);
        }
        let lifted = ArrayView2::from_shape((rows, n_lift), &buf[..rows * n_lift])
            .expect("buffer sized for the batch");
        let scores = lifted.dot(&w);
        for (r, &lift_norm) in lift_norms.iter().enumerate().take(rows) {
            let y = ds.labels[start + r];
            let row = scores.row(r);
            let mut accepted = true;
            for (j, &s) in row.iter().enumerate() {
                let a = s.abs();
                report.per_halfspace_margin[j] = report.per_halfspace_margin[j].min(a);
                report.min_margin = report.min_margin.min(a);
                report.min_normalized_margin = report.min_normalized_margin.min(a / lift_norm);
                if s < 0.0 {
                    accepted = false;
                    if y > 0 {
                        report.violations[j] += 1;
                    }
                }
            }
            if accepted == (y > 0) {
                report.consistent += 1;
            } else if y < 0 {
                report.uncovered_negatives += 1;
            }
        }
        start += rows;
    }
    report.consistency = if ds.is_empty() {
        1.0
    } else {
        report.consistent as f64 / ds.len() as f64
    };
    Ok(report)
}
