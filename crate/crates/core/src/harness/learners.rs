//! Baseline learners: a margin LP for single halfspaces, a greedy intersection learner over the
//! Veronese lift, and two reference learners (a perfect one that is handed the planted
//! structure, and a constant one).

use std::time::Duration;

use microlp::{ComparisonOp, OptimizationDirection, Problem, SolveOutcome, Variable};

use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};
use crate::interval::{in_union, Interval};
use crate::linalg::{dot, require_unit};
use crate::realize::veronese::{lift_dimension, MonomialIndex, MAX_LIFT_DIM};

/// Margins at or below this are treated as "not separable".
pub const SEPARABLE_MARGIN: f64 = 1e-9;
/// The perceptron stops after `PERCEPTRON_UPDATE_FACTOR * m` mistakes.
pub const PERCEPTRON_UPDATE_FACTOR: usize = 100;
const LP_TIME_LIMIT: Duration = Duration::from_secs(60);

/// A trained binary classifier.
#[derive(Debug, Clone)]
pub enum Hypothesis {
    Constant(i8),
    /// `sign(<w, x> + b)`, ties to `+1`.
    Ltf { w: Vec<f64>, b: f64 },
    /// `+1` iff `<v_j, lift(x)> >= 0` for every `j`; an empty list accepts everything.
    LiftedIntersection {
        index: MonomialIndex,
        weights: Vec<Vec<f64>>,
    },
    /// `+1` iff `<x, w>` falls in one of the `plus` intervals.
    Planted { w: Vec<f64>, plus: Vec<Interval> },
}

impl Hypothesis {
    pub fn kind(&self) -> &'static str {
        match self {
            Hypothesis::Constant(_) => "constant",
            Hypothesis::Ltf { .. } => "ltf",
            Hypothesis::LiftedIntersection { .. } => "lifted-ptf-intersection",
            Hypothesis::Planted { .. } => "oracle-planted",
        }
    }

    pub fn predict(&self, x: &[f64]) -> i8 {
        let positive = match self {
            Hypothesis::Constant(y) => return if *y >= 0 { 1 } else { -1 },
            Hypothesis::Ltf { w, b } => dot(w, x) + b >= 0.0,
            Hypothesis::LiftedIntersection { index, weights } => {
                let mut buf = vec![0.0; index.len()];
                index.lift_into(x, &mut buf);
                weights.iter().all(|v| dot(v, &buf) >= 0.0)
            }
            Hypothesis::Planted { w, plus } => in_union(plus, dot(w, x)),
        };
        // NaN scores compare false and land on -1, so predictions are always defined.
        if positive {
            1
        } else {
            -1
        }
    }

    /// Fraction of `ds` misclassified (0 for an empty dataset).
    pub fn error(&self, ds: &LabeledDataset) -> f64 {
        if ds.is_empty() {
            return 0.0;
        }
        let wrong = match self {
            Hypothesis::LiftedIntersection { index, weights } => {
                let mut buf = vec![0.0; index.len()];
                ds.iter()
                    .filter(|(x, y)| {
                        index.lift_into(x, &mut buf);
                        let pos = weights.iter().all(|v| dot(v, &buf) >= 0.0);
                        (if pos { 1 } else { -1 }) != *y
                    })
                    .count()
            }
            _ => ds.iter().filter(|(x, y)| self.predict(x) != *y).count(),
        };
        wrong as f64 / ds.len() as f64
    }
}

/// A training procedure. Implementations never read `meta.hidden_direction`.
pub trait Learner: Sync {
    fn name(&self) -> &str;
    fn fit(&self, train: &LabeledDataset) -> Result<Hypothesis>;
}

/// Outcome of the hard-margin program.
#[derive(Debug, Clone)]
struct MarginFit {
    weights: Vec<f64>,
    margin: f64,
}

fn lp_error(e: microlp::Error) -> Error {
    Error::LinearProgram(e.to_string())
}

fn solve(problem: &mut Problem) -> Result<Option<microlp::Solution>> {
    problem.set_time_limit(LP_TIME_LIMIT);
    match problem.solve() {
        Ok(SolveOutcome::Solution(s)) => Ok(Some(s)),
        Ok(_) => Ok(None),
        Err(microlp::Error::Infeasible) => Ok(None),
        Err(e) => Err(lp_error(e)),
    }
}

/// `max t` subject to `y_i <v, f_i> >= t`, `|v|_1 <= 1`, `t <= 1`.
///
/// `features` is row-major with `dim` columns; `v` is split into nonnegative parts so the
/// 1-norm constraint stays linear.
fn max_margin(features: &[f64], dim: usize, labels: &[i8]) -> Result<Option<MarginFit>> {
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let pos: Vec<Variable> = (0..dim).map(|_| lp.add_var(0.0, (0.0, 1.0))).collect();
    let neg: Vec<Variable> = (0..dim).map(|_| lp.add_var(0.0, (0.0, 1.0))).collect();
    let t = lp.add_var(1.0, (f64::NEG_INFINITY, 1.0));
    let norm: Vec<(Variable, f64)> = pos.iter().chain(&neg).map(|v| (*v, 1.0)).collect();
    lp.add_constraint(&norm, ComparisonOp::Le, 1.0);
    let mut row = Vec::with_capacity(2 * dim + 1);
    for (f, &y) in features.chunks_exact(dim).zip(labels) {
        row.clear();
        let y = y as f64;
        for j in 0..dim {
            if f[j] != 0.0 {
                row.push((pos[j], y * f[j]));
                row.push((neg[j], -y * f[j]));
            }
        }
        row.push((t, -1.0));
        lp.add_constraint(&row, ComparisonOp::Ge, 0.0);
    }
    Ok(solve(&mut lp)?.map(|s| MarginFit {
        weights: (0..dim)
            .map(|j| s.var_value(pos[j]) - s.var_value(neg[j]))
            .collect(),
        margin: s.var_value(t),
    }))
}

/// Averaged perceptron over `features`, stopping after `PERCEPTRON_UPDATE_FACTOR * m` updates
/// or an epoch without mistakes.
fn averaged_perceptron(features: &[f64], dim: usize, labels: &[i8]) -> Vec<f64> {
    let m = labels.len();
    let cap = PERCEPTRON_UPDATE_FACTOR * m;
    let mut w = vec![0.0; dim];
    let mut sum = vec![0.0; dim];
    let mut updates = 0;
    let mut steps = 0.0f64;
    'outer: loop {
        let mut mistakes = 0;
        for (f, &y) in features.chunks_exact(dim).zip(labels) {
            let y = y as f64;
            if y * dot(&w, f) <= 0.0 {
                w.iter_mut().zip(f).for_each(|(wi, fi)| *wi += y * fi);
                mistakes += 1;
                updates += 1;
            }
            sum.iter_mut().zip(&w).for_each(|(s, wi)| *s += wi);
            steps += 1.0;
            if updates >= cap {
                break 'outer;
            }
        }
        if mistakes == 0 {
            break;
        }
    }
    sum.iter().map(|s| s / steps.max(1.0)).collect()
}

fn training_error(features: &[f64], dim: usize, labels: &[i8], w: &[f64]) -> usize {
    features
        .chunks_exact(dim)
        .zip(labels)
        .filter(|(f, &y)| (if dot(w, f) >= 0.0 { 1 } else { -1 }) != y)
        .count()
}

/// Fit a weight vector over `features` (the constant feature must be present): the
/// hard-margin LP when it separates, otherwise the better of the LP solution and an averaged
/// perceptron. Returns the weights and whether the data were separated with positive margin.
fn fit_linear(features: &[f64], dim: usize, labels: &[i8]) -> Result<(Vec<f64>, bool)> {
    let lp = max_margin(features, dim, labels)?;
    if let Some(fit) = &lp {
        if fit.margin > SEPARABLE_MARGIN {
            return Ok((fit.weights.clone(), true));
        }
    }
    let perceptron = averaged_perceptron(features, dim, labels);
    let best = match lp {
        Some(fit)
            if training_error(features, dim, labels, &fit.weights)
                < training_error(features, dim, labels, &perceptron) =>
        {
            fit.weights
        }
        _ => perceptron,
    };
    Ok((best, false))
}

/// A single halfspace with bias; never fails on well-formed data.
pub fn train_ltf(ds: &LabeledDataset) -> Result<Hypothesis> {
    if ds.is_empty() {
        return Err(Error::InvalidParameter("train_ltf needs at least one sample".into()));
    }
    let dim = ds.dim + 1;
    let mut features = Vec::with_capacity(ds.len() * dim);
    for (x, _) in ds.iter() {
        features.extend_from_slice(x);
        features.push(1.0);
    }
    let (v, _) = fit_linear(&features, dim, &ds.labels)?;
    Ok(Hypothesis::Ltf {
        w: v[..ds.dim].to_vec(),
        b: v[ds.dim],
    })
}

/// `min sum xi` subject to `<v, f_i> >= 1` on positives and `<v, f_j> <= -1 + xi_j` on the
/// given negatives. The constant feature (column 0) keeps the program feasible.
fn one_sided_cut(lifted: &[f64], dim: usize, labels: &[i8], active_neg: &[usize]) -> Result<Option<Vec<f64>>> {
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let v: Vec<Variable> = (0..dim)
        .map(|_| lp.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY)))
        .collect();
    let mut row = Vec::with_capacity(dim + 1);
    for (f, &y) in lifted.chunks_exact(dim).zip(labels) {
        if y > 0 {
            row.clear();
            row.extend(v.iter().zip(f).filter(|(_, c)| **c != 0.0).map(|(var, c)| (*var, *c)));
            lp.add_constraint(&row, ComparisonOp::Ge, 1.0);
        }
    }
    for &i in active_neg {
        let f = &lifted[i * dim..(i + 1) * dim];
        let xi = lp.add_var(1.0, (0.0, f64::INFINITY));
        row.clear();
        row.extend(v.iter().zip(f).filter(|(_, c)| **c != 0.0).map(|(var, c)| (*var, *c)));
        row.push((xi, -1.0));
        lp.add_constraint(&row, ComparisonOp::Le, -1.0);
    }
    Ok(solve(&mut lp)?.map(|s| v.iter().map(|var| s.var_value(*var)).collect()))
}

/// Lifted training data are held in memory: at most this many `f64` entries.
pub const MAX_LIFTED_ENTRIES: usize = 4 * MAX_LIFT_DIM;

/// Whether [`train_lifted_ptf`] accepts `samples` points of dimension `dim` at `degree`.
pub fn lifted_training_fits(samples: usize, dim: usize, degree: usize) -> bool {
    lift_dimension(dim, degree).is_some_and(|d| samples.saturating_mul(d) <= MAX_LIFTED_ENTRIES)
}

/// Greedy intersection of at most `max_halfspaces` halfspaces over the degree-`degree` lift.
///
/// Each round first tries to separate the remaining data outright with the margin LP; failing
/// that it adds the halfspace that keeps every positive and cuts away as many still-accepted
/// negatives as a one-sided hinge LP manages. Rounds stop at zero training error, at the
/// halfspace budget, or when a round removes no negative.
pub fn train_lifted_ptf(ds: &LabeledDataset, degree: usize, max_halfspaces: usize) -> Result<Hypothesis> {
    if ds.is_empty() {
        return Err(Error::InvalidParameter("train_lifted_ptf needs at least one sample".into()));
    }
    if !lifted_training_fits(ds.len(), ds.dim, degree) {
        return Err(Error::InvalidParameter(format!(
            "lifting {} samples of dimension {} to degree {degree} exceeds the memory guard",
            ds.len(),
            ds.dim
        )));
    }
    let index = MonomialIndex::new(ds.dim, degree)?;
    let dim = index.len();
    let mut lifted = vec![0.0; ds.len() * dim];
    for (i, row) in lifted.chunks_exact_mut(dim).enumerate() {
        index.lift_into(ds.point(i), row);
    }
    let mut weights: Vec<Vec<f64>> = Vec::new();
    // Indices of negatives still accepted by every halfspace so far.
    let mut active: Vec<usize> = (0..ds.len()).filter(|&i| ds.labels[i] < 0).collect();
    while weights.len() < max_halfspaces.max(1) && !active.is_empty() {
        // Hard-margin attempt on all positives plus the still-accepted negatives.
        let subset: Vec<usize> = (0..ds.len())
            .filter(|&i| ds.labels[i] > 0)
            .chain(active.iter().copied())
            .collect();
        let mut feats = Vec::with_capacity(subset.len() * dim);
        let mut labs = Vec::with_capacity(subset.len());
        for &i in &subset {
            feats.extend_from_slice(&lifted[i * dim..(i + 1) * dim]);
            labs.push(ds.labels[i]);
        }
        let v = match max_margin(&feats, dim, &labs)? {
            Some(fit) if fit.margin > SEPARABLE_MARGIN => fit.weights,
            _ => match one_sided_cut(&lifted, dim, &ds.labels, &active)? {
                Some(v) => v,
                None => break,
            },
        };
        let before = active.len();
        active.retain(|&i| dot(&v, &lifted[i * dim..(i + 1) * dim]) >= 0.0);
        if active.len() == before {
            break;
        }
        weights.push(v);
    }
    Ok(Hypothesis::LiftedIntersection { index, weights })
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LtfLearner;

impl Learner for LtfLearner {
    fn name(&self) -> &str {
        "ltf"
    }

    fn fit(&self, train: &LabeledDataset) -> Result<Hypothesis> {
        train_ltf(train)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LiftedPtfLearner {
    pub degree: usize,
    pub max_halfspaces: usize,
}

impl Learner for LiftedPtfLearner {
    fn name(&self) -> &str {
        "lifted-ptf"
    }

    fn fit(&self, train: &LabeledDataset) -> Result<Hypothesis> {
        train_lifted_ptf(train, self.degree, self.max_halfspaces)
    }
}

/// Knows the planted direction and positive intervals; ignores the training data.
#[derive(Debug, Clone)]
pub struct OracleLearner {
    pub w: Vec<f64>,
    pub plus: Vec<Interval>,
}

impl OracleLearner {
    pub fn new(w: Vec<f64>, plus: Vec<Interval>) -> Result<Self> {
        require_unit(&w)?;
        Ok(Self { w, plus })
    }
}

impl Learner for OracleLearner {
    fn name(&self) -> &str {
        "oracle"
    }

    fn fit(&self, _train: &LabeledDataset) -> Result<Hypothesis> {
        Ok(Hypothesis::Planted {
            w: self.w.clone(),
            plus: self.plus.clone(),
        })
    }
}

/// Always predicts `label`.
#[derive(Debug, Clone, Copy)]
pub struct ConstantLearner {
    pub label: i8,
}

impl Default for ConstantLearner {
    fn default() -> Self {
        Self { label: 1 }
    }
}

impl Learner for ConstantLearner {
    fn name(&self) -> &str {
        "constant"
    }

    fn fit(&self, _train: &LabeledDataset) -> Result<Hypothesis> {
        Ok(Hypothesis::Constant(self.label))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{sample_null, DatasetMeta, Family, VarianceConvention};
    use crate::linalg::random_unit;
    use crate::pancake::{build_pancake_spec, sample_labeled_sq};
    use rand_distr::{Distribution, StandardNormal};

    fn blobs(m: usize, seed: u64) -> LabeledDataset {
        let mut rng = crate::seeded(seed);
        let mut points = Vec::new();
        let mut labels = Vec::new();
        for i in 0..m {
            let y: i8 = if i % 2 == 0 { 1 } else { -1 };
            for j in 0..3 {
                let g: f64 = StandardNormal.sample(&mut rng);
                points.push(g + if j == 0 { 3.0 * y as f64 } else { 0.0 });
            }
            labels.push(y);
        }
        // Drop the rare points that cross the midplane so the set is separable.
        let keep: Vec<usize> = (0..m)
            .filter(|&i| points[3 * i] * labels[i] as f64 > 0.5)
            .collect();
        let pts = keep.iter().flat_map(|&i| points[3 * i..3 * i + 3].to_vec()).collect();
        let labs = keep.iter().map(|&i| labels[i]).collect();
        LabeledDataset::new(3, pts, labs, DatasetMeta::new(Family::Custom)).unwrap()
    }

    #[test]
    fn separable_blobs() {
        let ds = blobs(400, 1);
        let h = train_ltf(&ds).unwrap();
        assert_eq!(h.kind(), "ltf");
        assert_eq!(h.error(&ds), 0.0);
        // Degree 1 lifted learning reduces to a single separating halfspace.
        let h1 = train_lifted_ptf(&ds, 1, 4).unwrap();
        assert_eq!(h1.error(&ds), 0.0);
        if let Hypothesis::LiftedIntersection { weights, .. } = &h1 {
            assert_eq!(weights.len(), 1);
        }
    }

    #[test]
    fn null_data_is_not_learnable() {
        let mut rng = crate::seeded(2);
        let m = 2000;
        let ds = sample_null(5, m, VarianceConvention::Unit, &mut rng);
        let (train, test) = ds.split_at(m / 2);
        let h = train_ltf(&train).unwrap();
        assert!(h.error(&test) >= 0.5 - 5.0 / (m as f64 / 2.0).sqrt());
        assert!(h.error(&train) >= 0.5 - 5.0 / (m as f64 / 2.0).sqrt());
    }

    #[test]
    fn perceptron_cap_terminates() {
        let f = vec![1.0, 0.0, 1.0, 0.0];
        let w = averaged_perceptron(&f, 2, &[1, -1]);
        assert_eq!(w.len(), 2);
    }

    #[test]
    fn quadratic_pancake_is_learned_at_degree_two() {
        let spec = build_pancake_spec(2, 45, 0.3).unwrap();
        let mut rng = crate::seeded(3);
        let w = random_unit(4, &mut rng);
        let ds = sample_labeled_sq(&spec, &w, 1200, &mut rng).unwrap().without_hidden();
        let (train, test) = ds.split_at(600);
        let h2 = train_lifted_ptf(&train, 2, 2).unwrap();
        assert!(h2.error(&test) < 0.05, "degree 2 error {}", h2.error(&test));
        let h1 = train_lifted_ptf(&train, 1, 2).unwrap();
        assert!(h1.error(&test) > 0.3, "degree 1 error {}", h1.error(&test));
    }

    #[test]
    fn reference_learners() {
        let spec = build_pancake_spec(3, 256, 0.2).unwrap();
        let mut rng = crate::seeded(4);
        let w = random_unit(6, &mut rng);
        let ds = sample_labeled_sq(&spec, &w, 500, &mut rng).unwrap();
        let oracle = OracleLearner::new(w, spec.s_a.clone()).unwrap();
        assert_eq!(oracle.fit(&ds).unwrap().error(&ds), 0.0);
        let c = ConstantLearner::default().fit(&ds).unwrap();
        assert!((c.error(&ds) - (1.0 - ds.positive_fraction())).abs() < 1e-12);
        assert!(OracleLearner::new(vec![1.0, 1.0], vec![]).is_err());
    }

    #[test]
    fn predictions_are_total() {
        let h = Hypothesis::Ltf {
            w: vec![1.0],
            b: 0.0,
        };
        assert_eq!(h.predict(&[f64::NAN]), -1);
        assert_eq!(h.predict(&[0.0]), 1);
        assert!(train_ltf(&LabeledDataset::empty(2, DatasetMeta::new(Family::Custom))).is_err());
    }
}
