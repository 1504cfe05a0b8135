use std::path::Path;

use pancakes_core::harness::{advantage_estimate, distinguish, hoeffding_bound};
use pancakes_core::realize::{verify_realization, Realization};
use pancakes_core::{seeded, Family, LabeledDataset};

use crate::config::{ExperimentConfig, InstanceConfig};
use crate::dataset_file::{self, direction_digest, Header};
use crate::error::{CliError, ConfigError, Result};
use crate::instance::{Instance, Seeds};
use crate::report::{Advantage, Certification, DatasetVerdict, Record, Report};

pub const PLANTED_FILE: &str = "planted.pds";
pub const NULL_FILE: &str = "null.pds";

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// Check a realisation of the instance against `planted`.
fn certify(realization: &Realization, planted: &LabeledDataset, name: &str) -> Result<Certification> {
    let report = verify_realization(planted, &realization.halfspaces)?;
    Ok(Certification {
        dataset: name.to_string(),
        halfspaces: realization.halfspaces.len(),
        lift_degree: realization.halfspaces.lift_degree,
        min_plus_value: realization.certificate.min_plus_value,
        max_minus_value: realization.certificate.max_minus_value,
        realization: report,
    })
}

/// Write the planted and null datasets plus a certification report for the planted one.
pub fn generate(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let instance = Instance::build(&cfg.instance)?;
    let dim = cfg.instance.dim();
    let seeds = Seeds::derive(cfg.seed, dim);

    let mut planted = instance.sample_planted(&seeds.w, cfg.m, &mut seeded(seeds.planted))?;
    planted.meta.seed = Some(cfg.seed);
    let mut null = instance.sample_null(dim, cfg.m, &mut seeded(seeds.null));
    null.meta.seed = Some(cfg.seed);

    let mut report = Report::default();
    report.push(Record::Config(cfg.clone()));
    report.push(Record::Instance(instance.summary()?));
    let realization = instance.realize(&seeds.w)?;
    let cert = certify(&realization, &planted, PLANTED_FILE)?;
    let null_consistency = verify_realization(&null, &realization.halfspaces)?.consistency;
    report.push(Record::Certification(cert));
    report.push(Record::NullCheck {
        dataset: NULL_FILE.into(),
        consistency: null_consistency,
    });

    create_dir(&cfg.out)?;
    dataset_file::save(&cfg.out.join(PLANTED_FILE), &planted, cfg.expose_planted)?;
    dataset_file::save(&cfg.out.join(NULL_FILE), &null, cfg.expose_planted)?;
    report.write(&cfg.out, "certification")?;
    Ok(report)
}

fn family_of(cfg: &InstanceConfig) -> Family {
    match cfg {
        InstanceConfig::PancakeSq { .. } => Family::PancakeSq,
        InstanceConfig::Hclwe { .. } => Family::Hclwe,
    }
}

/// Refuse a dataset that was not generated from this configuration's instance family and
/// planted direction.
fn check_dataset(cfg: &ExperimentConfig, path: &Path, header: &Header, w: &[f64]) -> Result<bool> {
    let mismatch = |detail: String| {
        CliError::Config(ConfigError::DatasetMismatch {
            path: path.to_path_buf(),
            detail,
        })
    };
    if header.family != family_of(&cfg.instance) {
        return Err(mismatch(format!(
            "file family {} but configured {}",
            header.family.as_str(),
            family_of(&cfg.instance).as_str()
        )));
    }
    if header.dim != cfg.instance.dim() {
        return Err(mismatch(format!("file dimension {} but --n {}", header.dim, cfg.instance.dim())));
    }
    match &header.hidden_direction_sha256 {
        Some(d) if *d == direction_digest(w) => Ok(true),
        Some(_) => Err(mismatch("planted-direction digest differs (different --seed?)".into())),
        None => Ok(false),
    }
}

/// Score an optional saved dataset, then estimate the learner's distinguishing advantage on
/// fresh planted / null pairs.
pub fn experiment(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let (Some(learner_cfg), Some(tau), Some(trials)) = (&cfg.learner, cfg.tau, cfg.trials) else {
        return Err(pancakes_core::Error::InvalidParameter("experiment needs a learner, tau and trial count".into()).into());
    };
    // Read the dataset first: a bad path should fail before any computation.
    let loaded = match &cfg.data {
        Some(path) => Some((path, dataset_file::load(path)?)),
        None => None,
    };

    let instance = Instance::build(&cfg.instance)?;
    let dim = cfg.instance.dim();
    let seeds = Seeds::derive(cfg.seed, dim);
    let learner = instance.learner(learner_cfg, &seeds.w)?;

    let mut report = Report::default();
    report.push(Record::Config(cfg.clone()));
    report.push(Record::Instance(instance.summary()?));
    let planted = instance.sample_planted(&seeds.w, cfg.m, &mut seeded(seeds.planted))?;
    report.push(Record::Certification(certify(&instance.realize(&seeds.w)?, &planted, "fresh planted sample")?));

    if let Some((path, (header, ds))) = loaded {
        let digest_matches = check_dataset(cfg, path, &header, &seeds.w)?;
        let verdict = distinguish(&ds.without_hidden(), learner.as_ref(), tau)?;
        report.push(Record::DatasetVerdict(DatasetVerdict {
            dataset: path.display().to_string(),
            digest_matches,
            verdict,
        }));
    }

    let m = cfg.m;
    let w = &seeds.w;
    let instance = &instance;
    let advantage = advantage_estimate(
        |rng| instance.sample_planted(w, m, rng),
        |rng| Ok(instance.sample_null(dim, m, rng)),
        learner.as_ref(),
        tau,
        trials,
        &mut seeded(seeds.trials),
    )?;
    report.push(Record::Advantage(Advantage {
        hoeffding_bound: hoeffding_bound(m, tau),
        report: advantage,
    }));

    create_dir(&cfg.out)?;
    report.write(&cfg.out, "report")?;
    Ok(report)
}

/// Header and label balance of a dataset file.
pub fn inspect(path: &Path) -> Result<String> {
    let (header, ds) = dataset_file::load(path)?;
    let mut out = serde_json::to_string_pretty(&header)?;
    out.push_str(&format!(
        "\n{} samples of dimension {}, {:.4} labelled +1\n",
        ds.len(),
        ds.dim,
        ds.positive_fraction()
    ));
    Ok(out)
}
