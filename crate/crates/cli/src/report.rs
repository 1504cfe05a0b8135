//! Structured run records: one JSON object per line, plus a plain-text rendering.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use pancakes_core::harness::{AdvantageReport, DistinguisherVerdict};
use pancakes_core::RealizationReport;

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum InstanceSummary {
    PancakeSq {
        k: usize,
        lift_dim: usize,
        delta: f64,
        tau: f64,
        plus_intervals: usize,
        minus_intervals: usize,
        min_gap: f64,
        gap_constant: f64,
        regime_exponent: f64,
        /// Whether `k <= N^regime_exponent`.
        in_regime: bool,
        rule_moment_deviation: f64,
        smoothed_moment_deviation_plus: f64,
        smoothed_moment_deviation_minus: f64,
    },
    Hclwe {
        n: usize,
        gamma: f64,
        beta: f64,
        d: usize,
        spacing: f64,
        alpha: f64,
        cross_class_gap: f64,
        truncation_mass: f64,
        intervals_per_class: usize,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct Certification {
    pub dataset: String,
    pub halfspaces: usize,
    pub lift_degree: usize,
    pub min_plus_value: f64,
    pub max_minus_value: f64,
    pub realization: RealizationReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct DatasetVerdict {
    pub dataset: String,
    pub digest_matches: bool,
    pub verdict: DistinguisherVerdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct Advantage {
    pub hoeffding_bound: f64,
    #[serde(flatten)]
    pub report: AdvantageReport,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "record", rename_all = "kebab-case")]
pub enum Record {
    Config(ExperimentConfig),
    Instance(InstanceSummary),
    Certification(Certification),
    NullCheck { dataset: String, consistency: f64 },
    DatasetVerdict(DatasetVerdict),
    Advantage(Advantage),
}

#[derive(Debug, Default)]
pub struct Report {
    pub records: Vec<Record>,
}

impl Report {
    pub fn push(&mut self, r: Record) {
        self.records.push(r);
    }

    pub fn to_jsonl(&self) -> Result<String> {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r)?);
            out.push('\n');
        }
        Ok(out)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for r in &self.records {
            render_record(&mut s, r);
        }
        s
    }

    /// Write `<stem>.jsonl` and `<stem>.txt` into `dir`.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<()> {
        let jsonl = dir.join(format!("{stem}.jsonl"));
        std::fs::write(&jsonl, self.to_jsonl()?).map_err(|e| CliError::io(&jsonl, e))?;
        let txt = dir.join(format!("{stem}.txt"));
        std::fs::write(&txt, self.render()).map_err(|e| CliError::io(&txt, e))
    }
}

// `write!` into a String cannot fail.
fn render_record(s: &mut String, r: &Record) {
    match r {
        Record::Config(c) => {
            let _ = writeln!(s, "configuration");
            let _ = writeln!(s, "  instance   {:?}", c.instance);
            let _ = writeln!(s, "  m          {}", c.m);
            let _ = writeln!(s, "  seed       {}", c.seed);
            if let (Some(l), Some(tau), Some(trials)) = (&c.learner, c.tau, c.trials) {
                let _ = writeln!(s, "  learner    {:?} (degree {}, <= {} halfspaces)", l.kind, l.degree, l.max_halfspaces);
                let _ = writeln!(s, "  tau        {tau}");
                let _ = writeln!(s, "  trials     {trials}");
            }
        }
        Record::Instance(InstanceSummary::PancakeSq {
            k,
            lift_dim,
            delta,
            tau,
            plus_intervals,
            minus_intervals,
            min_gap,
            gap_constant,
            regime_exponent,
            in_regime,
            rule_moment_deviation,
            smoothed_moment_deviation_plus,
            smoothed_moment_deviation_minus,
        }) => {
            let _ = writeln!(s, "pancake instance: k = {k}, N = {lift_dim}");
            if !in_regime {
                let _ = writeln!(s, "  note: k > N^{regime_exponent}, outside the supported regime");
            }
            let _ = writeln!(s, "  delta {delta:.6e}, truncation radius {tau:.6e}");
            let _ = writeln!(s, "  {plus_intervals} plus / {minus_intervals} minus intervals, min gap {min_gap:.6e} (x sqrt(k) = {gap_constant:.4})");
            let _ = writeln!(s, "  moment deviation: rule {rule_moment_deviation:.3e}, smoothed plus {smoothed_moment_deviation_plus:.3e}, smoothed minus {smoothed_moment_deviation_minus:.3e}");
        }
        Record::Instance(InstanceSummary::Hclwe {
            n,
            gamma,
            beta,
            d,
            spacing,
            alpha,
            cross_class_gap,
            truncation_mass,
            intervals_per_class,
        }) => {
            let _ = writeln!(s, "hCLWE instance: n = {n}, gamma = {gamma}, beta = {beta}, d = {d}");
            let _ = writeln!(s, "  spacing {spacing:.6e}, truncation radius {alpha:.6e}, cross-class gap {cross_class_gap:.6e}");
            let _ = writeln!(s, "  {intervals_per_class} intervals per class, discarded mass {truncation_mass:.3e}");
        }
        Record::Certification(c) => {
            let r = &c.realization;
            let _ = writeln!(s, "certification of {}", c.dataset);
            let _ = writeln!(s, "  {} halfspaces of lift degree {} (lifted dim {})", c.halfspaces, c.lift_degree, r.lifted_dim);
            let _ = writeln!(s, "  PTF certificate: min plus {:.3e}, max minus {:.3e}", c.min_plus_value, c.max_minus_value);
            let _ = writeln!(s, "  consistency {}/{} = {}", r.consistent, r.samples, r.consistency);
            let _ = writeln!(s, "  margin {:.3e} (normalised {:.3e})", r.min_margin, r.min_normalized_margin);
        }
        Record::NullCheck { dataset, consistency } => {
            let _ = writeln!(s, "null dataset {dataset}: consistency with planted halfspaces {consistency:.4}");
        }
        Record::DatasetVerdict(v) => {
            let _ = writeln!(
                s,
                "dataset {}: {:?} (error {:.4}, threshold {:.4}, digest {})",
                v.dataset,
                v.verdict.verdict,
                v.verdict.error,
                v.verdict.threshold,
                if v.digest_matches { "matches" } else { "absent" }
            );
        }
        Record::Advantage(a) => {
            let r = &a.report;
            let _ = writeln!(s, "advantage of {} over {} trials (m = {}, tau = {})", r.learner, r.trials, r.m, r.tau);
            let _ = writeln!(s, "  planted verdicts: {:.3} on planted, {:.3} on null", r.planted_rate_on_planted, r.planted_rate_on_null);
            let _ = writeln!(s, "  advantage {:.3} +- {:.3}", r.advantage, r.ci_half_width);
            let _ = writeln!(s, "  per-trial Hoeffding bound {:.3e}", a.hoeffding_bound);
        }
    }
}
