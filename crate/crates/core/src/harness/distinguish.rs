//! The sample-splitting distinguisher and advantage estimation.
//!
//! A learner that beats random guessing on the planted distribution turns into a test:
//! train on the first half of the samples, measure the error on the second half, and call the
//! input planted when that error is more than `tau / 2` away from `1/2`.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::dataset::LabeledDataset;
use crate::error::{invalid, Result};
use crate::Rng;

use super::learners::Learner;

/// Minimum number of trials accepted by [`advantage_estimate`].
pub const MIN_TRIALS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Planted,
    Null,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistinguisherVerdict {
    pub verdict: Verdict,
    /// Holdout error of the hypothesis trained on the first half.
    pub error: f64,
    /// `tau / 2`.
    pub threshold: f64,
    pub m: usize,
}

/// `2 exp(-m tau^2 / 9)`: the bound on a wrong verdict per split.
pub fn hoeffding_bound(m: usize, tau: f64) -> f64 {
    2.0 * (-(m as f64) * tau * tau / 9.0).exp()
}

/// `planted` iff `|err - 1/2| > tau / 2`.
pub fn verdict_for(error: f64, tau: f64) -> Verdict {
    if (error - 0.5).abs() > 0.5 * tau {
        Verdict::Planted
    } else {
        Verdict::Null
    }
}

fn check_budget(m: usize, tau: f64) -> Result<()> {
    if m == 0 || !m.is_multiple_of(2) {
        return invalid(format!("distinguisher needs an even, positive sample count, got {m}"));
    }
    let floor = 5.0 / (m as f64).sqrt();
    if !(tau >= floor) || tau > 1.0 {
        return invalid(format!(
            "tau = {tau} must lie in [5/sqrt(m), 1] = [{floor:.6}, 1] for m = {m}"
        ));
    }
    Ok(())
}

/// Train on the first `m/2` samples (with the planted direction stripped), test on the rest.
pub fn distinguish(samples: &LabeledDataset, learner: &dyn Learner, tau: f64) -> Result<DistinguisherVerdict> {
    let m = samples.len();
    check_budget(m, tau)?;
    let (train, test) = samples.without_hidden().split_at(m / 2);
    let h = learner.fit(&train)?;
    let error = h.error(&test);
    Ok(DistinguisherVerdict {
        verdict: verdict_for(error, tau),
        error,
        threshold: 0.5 * tau,
        m,
    })
}

/// Per-trial outcomes and the resulting advantage estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdvantageReport {
    pub trials: usize,
    pub m: usize,
    pub tau: f64,
    pub learner: String,
    /// Fraction of planted inputs called planted.
    pub planted_rate_on_planted: f64,
    /// Fraction of null inputs called planted (the false-planted rate).
    pub planted_rate_on_null: f64,
    /// `|p_planted - p_null|`.
    pub advantage: f64,
    /// 95% normal-approximation half-width for the difference of two binomial rates.
    pub ci_half_width: f64,
    pub planted_errors: Vec<f64>,
    pub null_errors: Vec<f64>,
}

/// Run [`distinguish`] on `trials` fresh planted and null datasets.
///
/// Each trial gets its own seed drawn up front from `rng`, so results are independent of the
/// number of worker threads. Trials run in parallel across the available cores.
pub fn advantage_estimate<P, N>(
    gen_planted: P,
    gen_null: N,
    learner: &dyn Learner,
    tau: f64,
    trials: usize,
    rng: &mut Rng,
) -> Result<AdvantageReport>
where
    P: Fn(&mut Rng) -> Result<LabeledDataset> + Sync,
    N: Fn(&mut Rng) -> Result<LabeledDataset> + Sync,
{
    if trials < MIN_TRIALS {
        return invalid(format!("advantage estimation needs at least {MIN_TRIALS} trials, got {trials}"));
    }
    let seeds: Vec<(u64, u64)> = (0..trials).map(|_| (rng.random(), rng.random())).collect();
    let run = |&(sp, sn): &(u64, u64)| -> Result<(DistinguisherVerdict, DistinguisherVerdict)> {
        let planted = gen_planted(&mut crate::seeded(sp))?;
        let null = gen_null(&mut crate::seeded(sn))?;
        Ok((distinguish(&planted, learner, tau)?, distinguish(&null, learner, tau)?))
    };
    let workers = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(trials);
    let chunk = trials.div_ceil(workers);
    let outcomes: Vec<Result<(DistinguisherVerdict, DistinguisherVerdict)>> = std::thread::scope(|s| {
        let handles: Vec<_> = seeds
            .chunks(chunk)
            .map(|part| s.spawn(move || part.iter().map(run).collect::<Vec<_>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("trial worker panicked"))
            .collect()
    });
    let mut planted_errors = Vec::with_capacity(trials);
    let mut null_errors = Vec::with_capacity(trials);
    let (mut hits_p, mut hits_n) = (0usize, 0usize);
    let mut m = 0;
    for o in outcomes {
        let (p, n) = o?;
        m = p.m;
        hits_p += (p.verdict == Verdict::Planted) as usize;
        hits_n += (n.verdict == Verdict::Planted) as usize;
        planted_errors.push(p.error);
        null_errors.push(n.error);
    }
    let t = trials as f64;
    let pp = hits_p as f64 / t;
    let pn = hits_n as f64 / t;
    Ok(AdvantageReport {
        trials,
        m,
        tau,
        learner: learner.name().to_string(),
        planted_rate_on_planted: pp,
        planted_rate_on_null: pn,
        advantage: (pp - pn).abs(),
        ci_half_width: 1.96 * (pp * (1.0 - pp) / t + pn * (1.0 - pn) / t).sqrt(),
        planted_errors,
        null_errors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{sample_null, VarianceConvention};
    use crate::harness::learners::{ConstantLearner, LtfLearner, OracleLearner};
    use crate::linalg::random_unit;
    use crate::pancake::{build_pancake_spec, sample_labeled_sq};

    #[test]
    fn budget_checks() {
        let mut rng = crate::seeded(1);
        let ds = sample_null(2, 101, VarianceConvention::Unit, &mut rng);
        assert!(distinguish(&ds, &ConstantLearner::default(), 0.9).is_err());
        let ds = sample_null(2, 100, VarianceConvention::Unit, &mut rng);
        assert!(distinguish(&ds, &ConstantLearner::default(), 0.4).is_err());
        assert!(distinguish(&ds, &ConstantLearner::default(), 0.5).is_ok());
    }

    #[test]
    fn threshold_rule() {
        assert_eq!(verdict_for(0.0, 0.05), Verdict::Planted);
        assert_eq!(verdict_for(0.5, 0.05), Verdict::Null);
        assert_eq!(verdict_for(0.524, 0.05), Verdict::Null);
        assert_eq!(verdict_for(0.526, 0.05), Verdict::Planted);
        assert!((hoeffding_bound(10_000, 0.05) - 0.1243).abs() < 1e-3);
    }

    #[test]
    fn oracle_and_constant() {
        let spec = build_pancake_spec(2, 256, 0.2).unwrap();
        let mut rng = crate::seeded(2);
        let w = random_unit(4, &mut rng);
        let ds = sample_labeled_sq(&spec, &w, 2000, &mut rng).unwrap();
        let oracle = OracleLearner::new(w, spec.s_a.clone()).unwrap();
        let v = distinguish(&ds, &oracle, 0.2).unwrap();
        assert_eq!(v.verdict, Verdict::Planted);
        assert_eq!(v.error, 0.0);
        let v = distinguish(&ds, &ConstantLearner::default(), 0.2).unwrap();
        assert_eq!(v.verdict, Verdict::Null);
    }

    #[test]
    fn advantage_is_reproducible() {
        let spec = build_pancake_spec(2, 256, 0.2).unwrap();
        let w = random_unit(3, &mut crate::seeded(3));
        let oracle = OracleLearner::new(w.clone(), spec.s_a.clone()).unwrap();
        let planted = |r: &mut Rng| sample_labeled_sq(&spec, &w, 400, r);
        let null = |r: &mut Rng| Ok(sample_null(3, 400, VarianceConvention::Unit, r));
        let a = advantage_estimate(planted, null, &oracle, 0.25, 30, &mut crate::seeded(9)).unwrap();
        let b = advantage_estimate(planted, null, &oracle, 0.25, 30, &mut crate::seeded(9)).unwrap();
        assert_eq!(a, b);
        assert!(a.advantage >= 0.9);
        let c = advantage_estimate(planted, null, &LtfLearner, 0.25, 30, &mut crate::seeded(9)).unwrap();
        assert!(c.planted_rate_on_null <= 0.2);
        assert!(advantage_estimate(planted, null, &oracle, 0.25, 29, &mut crate::seeded(9)).is_err());
    }
}
