//! Command-line front end: configuration, the dataset file format, and report emission.

pub mod commands;
pub mod config;
pub mod dataset_file;
pub mod error;
pub mod instance;
pub mod report;

use clap::{Parser, Subcommand};

pub use config::{ExperimentArgs, ExperimentConfig, InstanceArgs};
pub use error::{CliError, ConfigError};

#[derive(Debug, Parser)]
#[command(name = "pancakes", version, about = "Generate and attack hard instances for learning intersections of halfspaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write planted and null datasets plus a certification report.
    Generate {
        #[command(flatten)]
        instance: InstanceArgs,

        /// Store the planted direction in the clear (by default only its digest is written).
        #[arg(long)]
        expose_planted: bool,
    },
    /// Estimate a learner's distinguishing advantage and report the instance invariants.
    Experiment(ExperimentArgs),
    /// Print the header of a dataset file.
    Inspect {
        path: std::path::PathBuf,
    },
}

/// Run one parsed command, returning the text to print on success.
pub fn run(cli: Cli) -> error::Result<String> {
    match cli.command {
        Command::Generate {
            instance,
            expose_planted,
        } => {
            let cfg = ExperimentConfig::for_generate(&instance, expose_planted)?;
            Ok(commands::generate(&cfg)?.render())
        }
        Command::Experiment(args) => {
            let cfg = ExperimentConfig::for_experiment(&args)?;
            Ok(commands::experiment(&cfg)?.render())
        }
        Command::Inspect { path } => commands::inspect(&path),
    }
}
