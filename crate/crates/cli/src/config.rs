//! Command-line flags and their validation into an [`ExperimentConfig`].

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;

use pancakes_core::harness::distinguish::MIN_TRIALS;
use pancakes_core::harness::lifted_training_fits;
use pancakes_core::pancake::{build_pancake_spec, DEFAULT_REGIME_EXPONENT, DEFAULT_TRUNCATION_CONSTANT};
use pancakes_core::realize::lift_dimension;
use pancakes_core::realize::veronese::MAX_LIFT_DIM;

use crate::error::ConfigError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyArg {
    PancakeSq,
    Hclwe,
}

impl FamilyArg {
    fn name(self) -> &'static str {
        match self {
            FamilyArg::PancakeSq => "pancake-sq",
            FamilyArg::Hclwe => "hclwe",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LearnerArg {
    /// Knows the planted direction and label intervals.
    Oracle,
    /// Always predicts +1.
    Constant,
    /// Best single halfspace found by LP / perceptron.
    Ltf,
    /// Greedy intersection of halfspaces over the Veronese lift.
    Lifted,
}

/// Flags describing the instance, shared by every subcommand that builds one.
#[derive(Debug, Clone, Args)]
pub struct InstanceArgs {
    /// Instance family.
    #[arg(long, value_enum)]
    pub family: FamilyArg,

    /// Number of Gauss-Hermite nodes (pancake-sq only).
    #[arg(long)]
    pub k: Option<usize>,

    /// Ambient dimension; for hclwe also the component range {-n, ..., n}.
    #[arg(long)]
    pub n: usize,

    /// Lifted dimension N that sets the pancake thickness (pancake-sq only; default C(n+2, 2)).
    #[arg(long)]
    pub lift_dim: Option<usize>,

    /// Truncation constant c in tau = c / sqrt(k) (pancake-sq only).
    #[arg(long)]
    pub trunc_c: Option<f64>,

    /// Exponent g of the supported regime k <= N^g; reported, never enforced (pancake-sq only).
    #[arg(long)]
    pub regime_exponent: Option<f64>,

    /// Lattice scale gamma (hclwe only; default 2 sqrt(n)).
    #[arg(long)]
    pub gamma: Option<f64>,

    /// Noise width beta (hclwe only; default 1/n).
    #[arg(long)]
    pub beta: Option<f64>,

    /// Components per realising PTF; must divide 2n + 1 (hclwe only; default 1).
    #[arg(long)]
    pub d: Option<usize>,

    /// Samples per dataset.
    #[arg(long)]
    pub m: usize,

    /// Master seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

/// Extra flags of the `experiment` subcommand.
#[derive(Debug, Clone, Args)]
pub struct ExperimentArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,

    /// Learner plugged into the distinguisher.
    #[arg(long, value_enum, default_value_t = LearnerArg::Lifted)]
    pub learner: LearnerArg,

    /// Distinguisher tolerance; must be at least 5 / sqrt(m).
    #[arg(long)]
    pub tau: f64,

    /// Independent planted / null trial pairs.
    #[arg(long, default_value_t = 100)]
    pub trials: usize,

    /// Lift degree of the lifted learner.
    #[arg(long, default_value_t = 2)]
    pub degree: usize,

    /// Halfspace budget of the lifted learner.
    #[arg(long, default_value_t = 16)]
    pub max_halfspaces: usize,

    /// Planted dataset written by `generate`, scored once in addition to the fresh trials.
    #[arg(long)]
    pub data: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum InstanceConfig {
    PancakeSq {
        k: usize,
        n: usize,
        lift_dim: usize,
        trunc_c: f64,
        regime_exponent: f64,
    },
    Hclwe {
        n: usize,
        gamma: f64,
        beta: f64,
        d: usize,
    },
}

impl InstanceConfig {
    pub fn dim(&self) -> usize {
        match self {
            InstanceConfig::PancakeSq { n, .. } | InstanceConfig::Hclwe { n, .. } => *n,
        }
    }

    /// Degree of the certified lifted realisation.
    pub fn realization_degree(&self) -> usize {
        match self {
            InstanceConfig::PancakeSq { .. } => 2,
            InstanceConfig::Hclwe { d, .. } => 2 * d,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LearnerConfig {
    pub kind: LearnerArg,
    pub degree: usize,
    pub max_halfspaces: usize,
}

/// A fully validated run description.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub instance: InstanceConfig,
    pub m: usize,
    pub seed: u64,
    /// Left out of reports so identical runs into different directories match byte for byte.
    #[serde(skip)]
    pub out: PathBuf,
    pub expose_planted: bool,
    pub tau: Option<f64>,
    pub trials: Option<usize>,
    pub learner: Option<LearnerConfig>,
    pub data: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn for_generate(args: &InstanceArgs, expose_planted: bool) -> Result<Self, ConfigError> {
        let cfg = Self {
            instance: instance_config(args)?,
            m: args.m,
            seed: args.seed,
            out: args.out.clone(),
            expose_planted,
            tau: None,
            trials: None,
            learner: None,
            data: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn for_experiment(args: &ExperimentArgs) -> Result<Self, ConfigError> {
        let cfg = Self {
            instance: instance_config(&args.instance)?,
            m: args.instance.m,
            seed: args.instance.seed,
            out: args.instance.out.clone(),
            expose_planted: false,
            tau: Some(args.tau),
            trials: Some(args.trials),
            learner: Some(LearnerConfig {
                kind: args.learner,
                degree: args.degree,
                max_halfspaces: args.max_halfspaces,
            }),
            data: args.data.clone(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Check every consistency rule; constructors call this, and so should anything that
    /// edits a config afterwards.
    pub fn validate(&self) -> Result<(), ConfigError> {
        match self.instance {
            InstanceConfig::PancakeSq {
                k,
                n,
                lift_dim,
                trunc_c,
                regime_exponent,
            } => {
                if k < 2 {
                    return Err(ConfigError::KTooSmall(k));
                }
                if n < 1 {
                    return Err(ConfigError::DimensionTooSmall(n));
                }
                if lift_dim < 16 {
                    return Err(ConfigError::LiftDimTooSmall(lift_dim));
                }
                if !(trunc_c > 0.0 && trunc_c.is_finite()) {
                    return Err(ConfigError::TruncationConstant(trunc_c));
                }
                if !(regime_exponent > 0.0 && regime_exponent.is_finite()) {
                    return Err(ConfigError::RegimeExponent(regime_exponent));
                }
                // Other construction failures surface when the instance is built.
                if let Err(e @ pancakes_core::Error::Overlap { .. }) = build_pancake_spec(k, lift_dim, trunc_c) {
                    return Err(ConfigError::PancakeOverlap(e.to_string()));
                }
            }
            InstanceConfig::Hclwe { n, gamma, beta, d } => {
                if n < 1 {
                    return Err(ConfigError::DimensionTooSmall(n));
                }
                if !(gamma > 0.0 && gamma.is_finite()) {
                    return Err(ConfigError::GammaNotPositive(gamma));
                }
                if !(beta > 0.0 && beta <= gamma) {
                    return Err(ConfigError::BetaOutOfRange { beta, gamma });
                }
                if d == 0 {
                    return Err(ConfigError::BlockSizeZero);
                }
                let count = 2 * n + 1;
                if count % d != 0 {
                    return Err(ConfigError::BlockSizeDoesNotDivide { d, count });
                }
            }
        }
        let dim = self.instance.dim();
        let degree = self.instance.realization_degree();
        if lift_dimension(dim, degree).is_none_or(|len| len > MAX_LIFT_DIM) {
            return Err(ConfigError::LiftTooLarge {
                dim,
                degree,
                limit: MAX_LIFT_DIM,
            });
        }
        if self.m == 0 || !self.m.is_multiple_of(2) {
            return Err(ConfigError::OddSampleCount(self.m));
        }
        if let Some(tau) = self.tau {
            if !(tau > 0.0 && tau <= 1.0) {
                return Err(ConfigError::TauOutOfRange(tau));
            }
            let min = 5.0 / (self.m as f64).sqrt();
            if tau < min {
                return Err(ConfigError::TauTooSmall { tau, m: self.m, min });
            }
        }
        if let Some(trials) = self.trials {
            if trials < MIN_TRIALS {
                return Err(ConfigError::TooFewTrials {
                    trials,
                    min: MIN_TRIALS,
                });
            }
        }
        if let Some(l) = &self.learner {
            if l.kind == LearnerArg::Lifted {
                if l.degree == 0 {
                    return Err(ConfigError::DegreeZero);
                }
                if l.max_halfspaces == 0 {
                    return Err(ConfigError::NoHalfspaces);
                }
                let samples = self.m / 2;
                if !lifted_training_fits(samples, dim, l.degree) {
                    return Err(ConfigError::LearnerTooLarge {
                        samples,
                        dim,
                        degree: l.degree,
                    });
                }
            }
        }
        Ok(())
    }
}

fn instance_config(args: &InstanceArgs) -> Result<InstanceConfig, ConfigError> {
    let family = args.family.name();
    let reject = |present: bool, flag: &'static str| {
        if present {
            Err(ConfigError::UnusedFlag { family, flag })
        } else {
            Ok(())
        }
    };
    match args.family {
        FamilyArg::PancakeSq => {
            reject(args.gamma.is_some(), "gamma")?;
            reject(args.beta.is_some(), "beta")?;
            reject(args.d.is_some(), "d")?;
            let k = args.k.ok_or(ConfigError::MissingFlag { family, flag: "k" })?;
            let lift_dim = match args.lift_dim {
                Some(n) => n,
                None => lift_dimension(args.n, 2).ok_or(ConfigError::LiftTooLarge {
                    dim: args.n,
                    degree: 2,
                    limit: MAX_LIFT_DIM,
                })?,
            };
            Ok(InstanceConfig::PancakeSq {
                k,
                n: args.n,
                lift_dim,
                trunc_c: args.trunc_c.unwrap_or(DEFAULT_TRUNCATION_CONSTANT),
                regime_exponent: args.regime_exponent.unwrap_or(DEFAULT_REGIME_EXPONENT),
            })
        }
        FamilyArg::Hclwe => {
            reject(args.k.is_some(), "k")?;
            reject(args.regime_exponent.is_some(), "regime-exponent")?;
            reject(args.lift_dim.is_some(), "lift-dim")?;
            reject(args.trunc_c.is_some(), "trunc-c")?;
            let nf = args.n as f64;
            Ok(InstanceConfig::Hclwe {
                n: args.n,
                gamma: args.gamma.unwrap_or(2.0 * nf.sqrt()),
                beta: args.beta.unwrap_or(1.0 / nf),
                d: args.d.unwrap_or(1),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pancake(k: usize, n: usize, m: usize) -> InstanceArgs {
        InstanceArgs {
            family: FamilyArg::PancakeSq,
            k: Some(k),
            n,
            lift_dim: None,
            trunc_c: None,
            regime_exponent: None,
            gamma: None,
            beta: None,
            d: None,
            m,
            seed: 1,
            out: PathBuf::from("out"),
        }
    }

    fn hclwe(n: usize, d: usize) -> InstanceArgs {
        InstanceArgs {
            family: FamilyArg::Hclwe,
            k: None,
            d: Some(d),
            ..pancake(2, n, 1000)
        }
    }

    fn experiment(instance: InstanceArgs, tau: f64) -> ExperimentArgs {
        ExperimentArgs {
            instance,
            learner: LearnerArg::Oracle,
            tau,
            trials: 30,
            degree: 2,
            max_halfspaces: 4,
            data: None,
        }
    }

    #[test]
    fn pancake_defaults_fill_in() {
        let cfg = ExperimentConfig::for_generate(&pancake(4, 16, 1000), false).unwrap();
        assert_eq!(
            cfg.instance,
            InstanceConfig::PancakeSq {
                k: 4,
                n: 16,
                lift_dim: 153,
                trunc_c: 0.1,
                regime_exponent: 0.25
            }
        );
    }

    #[test]
    fn divisibility_rule() {
        assert!(ExperimentConfig::for_generate(&hclwe(4, 3), false).is_ok());
        assert_eq!(
            ExperimentConfig::for_generate(&hclwe(4, 2), false).unwrap_err(),
            ConfigError::BlockSizeDoesNotDivide { d: 2, count: 9 }
        );
    }

    #[test]
    fn rejects_each_violation() {
        let mut bad_beta = hclwe(4, 1);
        bad_beta.beta = Some(10.0);
        assert!(matches!(
            ExperimentConfig::for_generate(&bad_beta, false),
            Err(ConfigError::BetaOutOfRange { .. })
        ));
        assert_eq!(
            ExperimentConfig::for_generate(&pancake(1, 16, 100), false).unwrap_err(),
            ConfigError::KTooSmall(1)
        );
        assert_eq!(
            ExperimentConfig::for_generate(&pancake(3, 16, 101), false).unwrap_err(),
            ConfigError::OddSampleCount(101)
        );
        assert!(matches!(
            ExperimentConfig::for_experiment(&experiment(pancake(3, 16, 100), 0.4)),
            Err(ConfigError::TauTooSmall { .. })
        ));
        assert!(ExperimentConfig::for_experiment(&experiment(pancake(3, 16, 100), 0.5)).is_ok());
        let mut few = experiment(pancake(3, 16, 100), 0.5);
        few.trials = 10;
        assert!(matches!(
            ExperimentConfig::for_experiment(&few),
            Err(ConfigError::TooFewTrials { .. })
        ));
        let mut wide = pancake(8, 16, 100);
        wide.trunc_c = Some(5.0);
        assert!(matches!(
            ExperimentConfig::for_generate(&wide, false),
            Err(ConfigError::PancakeOverlap(_))
        ));
        let mut stray = pancake(3, 16, 100);
        stray.gamma = Some(1.0);
        assert_eq!(
            ExperimentConfig::for_generate(&stray, false).unwrap_err(),
            ConfigError::UnusedFlag {
                family: "pancake-sq",
                flag: "gamma"
            }
        );
    }

    #[test]
    fn memory_guards() {
        let mut huge = hclwe(100, 1);
        huge.d = Some(67);
        assert!(matches!(
            ExperimentConfig::for_generate(&huge, false),
            Err(ConfigError::LiftTooLarge { .. })
        ));
        let mut lifted = experiment(pancake(3, 64, 200_000), 0.05);
        lifted.learner = LearnerArg::Lifted;
        lifted.degree = 4;
        assert!(matches!(
            ExperimentConfig::for_experiment(&lifted),
            Err(ConfigError::LearnerTooLarge { .. })
        ));
    }
}
