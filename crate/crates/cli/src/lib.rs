// SPDX-License-Identifier: Apache-2.0

//! Reproduction scenarios and single computations behind the `ergodic`
//! command.
//!
//! Every run starts from an [`ExperimentConfig`] (a JSON file, overridden by
//! flags), produces an [`ExperimentReport`], and writes it with
//! [`emit_report`]. Randomness flows from the config seed through
//! [`ergodic_core::SeedStreams`] children labeled by scenario and system
//! index, so reports are identical for identical inputs regardless of
//! thread count.

pub mod compute;
pub mod config;
pub mod emit;
pub mod report;
pub mod scenarios;

use std::io::Write;
use std::path::PathBuf;

use anyhow::Result;
use clap::{Parser, Subcommand};
use ergodic_core::SystemSpec;

pub use compute::{run_compute, Op};
pub use config::{ExperimentConfig, Format, Overrides, Scenario};
pub use emit::emit_report;
pub use report::{ExperimentReport, Outcome, Provenance, Step, Verdict};
pub use scenarios::{run_reproduce_kolmogorov, run_reproduce_letter, run_theorem1_check};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "ergodic",
    version,
    about = "Spectral versus spacial isomorphism, reproduced"
)]
pub struct Cli {
    /// JSON experiment configuration.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Root seed for every random stream.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory; without it the JSON report goes to stdout.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Binary digits of rotation numbers printed in reports [default: 128].
    #[arg(long, global = true, value_name = "N")]
    pub precision_bits: Option<u32>,
    /// `json` writes report.json only; `csv` adds one CSV per data family.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Also report entropies in bits.
    #[arg(long, global = true)]
    pub bits: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Skew map versus rotation × Bernoulli: same spectrum, different towers.
    ReproduceLetter,
    /// Bernoulli shifts: same spectrum, different entropy.
    ReproduceKolmogorov,
    /// Rotations: equal eigenvalue groups and an explicit conjugacy.
    Theorem1,
    /// Run one operation on the configured systems.
    Compute {
        #[arg(value_enum)]
        op: Op,
        /// System as JSON, e.g. '{"kind":"bernoulli","probs":[0.5,0.5]}';
        /// repeatable, replaces the configured systems.
        #[arg(long = "system", value_name = "JSON", value_parser = parse_system)]
        systems: Vec<SystemSpec>,
    },
}

fn parse_system(text: &str) -> Result<SystemSpec, String> {
    serde_json::from_str(text).map_err(|e| e.to_string())
}

impl Cli {
    pub fn scenario(&self) -> Scenario {
        match self.command {
            Command::ReproduceLetter => Scenario::Letter,
            Command::ReproduceKolmogorov => Scenario::Kolmogorov,
            Command::Theorem1 => Scenario::Theorem1,
            Command::Compute { .. } => Scenario::Compute,
        }
    }

    pub fn resolve_config(&self) -> Result<ExperimentConfig> {
        let file = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        let systems = match &self.command {
            Command::Compute { systems, .. } => systems.clone(),
            _ => Vec::new(),
        };
        file.resolve(
            self.scenario(),
            Overrides {
                seed: self.seed,
                out: self.out.clone(),
                precision_bits: self.precision_bits,
                format: self.format,
                bits: self.bits,
                systems,
            },
        )
    }
}

/// Runs the scenario a resolved config names.
pub fn run(command: &Command, config: &ExperimentConfig) -> Result<ExperimentReport> {
    match command {
        Command::ReproduceLetter => run_reproduce_letter(config),
        Command::ReproduceKolmogorov => run_reproduce_kolmogorov(config),
        Command::Theorem1 => run_theorem1_check(config),
        Command::Compute { op, .. } => run_compute(*op, config),
    }
}

/// Parses, runs, writes, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = execute(&cli);
    match &result {
        Ok(ExperimentReport {
            outcome: Outcome::Inconclusive { reason },
            ..
        }) => eprintln!("inconclusive: {reason}"),
        Err(e) => eprintln!("error: {e:#}"),
        Ok(_) => {}
    }
    exit_code(&result)
}

/// 0 for a complete report, 2 for an inconclusive one, 1 for any error.
pub fn exit_code(result: &Result<ExperimentReport>) -> i32 {
    match result {
        Ok(report) if report.is_complete() => EXIT_OK,
        Ok(_) => EXIT_INCONCLUSIVE,
        Err(_) => EXIT_ERROR,
    }
}

fn execute(cli: &Cli) -> Result<ExperimentReport> {
    let config = cli.resolve_config()?;
    let report = run(&cli.command, &config)?;
    match &config.out {
        Some(dir) => {
            for path in emit_report(&report, config.format, config.bits, dir)? {
                eprintln!("wrote {}", path.display());
            }
        }
        None => std::io::stdout()
            .lock()
            .write_all(report.to_json()?.as_bytes())?,
    }
    Ok(report)
}
