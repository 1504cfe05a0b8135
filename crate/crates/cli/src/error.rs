use std::path::PathBuf;

use thiserror::Error;

/// A configuration rule that the requested experiment violates.
#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("family {family} requires --{flag}")]
    MissingFlag { family: &'static str, flag: &'static str },

    #[error("--{flag} does not apply to family {family}")]
    UnusedFlag { family: &'static str, flag: &'static str },

    #[error("--k must be at least 2 (got {0})")]
    KTooSmall(usize),

    #[error("--n must be at least 1 (got {0})")]
    DimensionTooSmall(usize),

    #[error("--lift-dim must be at least 16 (got {0})")]
    LiftDimTooSmall(usize),

    #[error("--trunc-c must be positive and finite (got {0})")]
    TruncationConstant(f64),

    #[error("--regime-exponent must be positive and finite (got {0})")]
    RegimeExponent(f64),

    #[error("pancake intervals overlap: {0}")]
    PancakeOverlap(String),

    #[error("--gamma must be positive and finite (got {0})")]
    GammaNotPositive(f64),

    #[error("need 0 < beta <= gamma (got beta = {beta}, gamma = {gamma})")]
    BetaOutOfRange { beta: f64, gamma: f64 },

    #[error("--d must be at least 1")]
    BlockSizeZero,

    #[error("block size d = {d} must divide 2n + 1 = {count}")]
    BlockSizeDoesNotDivide { d: usize, count: usize },

    #[error("--m must be a positive even number, since the distinguisher splits it in half (got {0})")]
    OddSampleCount(usize),

    #[error("tau = {tau} is below 5 / sqrt(m) = {min} for m = {m}")]
    TauTooSmall { tau: f64, m: usize, min: f64 },

    #[error("tau must lie in (0, 1] (got {0})")]
    TauOutOfRange(f64),

    #[error("--trials must be at least {min} (got {trials})")]
    TooFewTrials { trials: usize, min: usize },

    #[error("--degree must be at least 1")]
    DegreeZero,

    #[error("--max-halfspaces must be at least 1")]
    NoHalfspaces,

    #[error("lifting dimension {dim} to degree {degree} exceeds the {limit} coordinate limit")]
    LiftTooLarge { dim: usize, degree: usize, limit: usize },

    #[error("the lifted learner would hold {samples} samples of dimension {dim} at degree {degree}, beyond the memory guard")]
    LearnerTooLarge { samples: usize, dim: usize, degree: usize },

    #[error("dataset {path} does not match the configuration: {detail}")]
    DatasetMismatch { path: PathBuf, detail: String },
}

/// Everything the `pancakes` binary can fail with.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),

    #[error(transparent)]
    Core(#[from] pancakes_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: corrupt dataset file: {detail}")]
    Corrupt { path: PathBuf, detail: String },

    #[error("serialising report: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 2 for configuration and construction failures, 3 for file problems.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Core(_) => 2,
            CliError::Io { .. } | CliError::Corrupt { .. } | CliError::Json(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
