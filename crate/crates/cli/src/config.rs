// SPDX-License-Identifier: Apache-2.0

//! Experiment configuration: a JSON document, overridden by command-line
//! flags, with per-scenario default systems.

use std::fmt;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use ergodic_core::entropy::PartitionSpec;
use ergodic_core::mixing::{CorrelationMode, Observable, TestSet};
use ergodic_core::tower::{ResidualProtocol, DEFAULT_BAND};
use ergodic_core::{BernoulliSpec, RotationNumber, SystemSpec};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Letter,
    Kolmogorov,
    Theorem1,
    Compute,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scenario::Letter => "letter",
            Scenario::Kolmogorov => "kolmogorov",
            Scenario::Theorem1 => "theorem1",
            Scenario::Compute => "compute",
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    /// `report.json` plus one CSV per data family.
    #[default]
    Csv,
}

/// Everything a run depends on. Unknown keys are rejected so that a typo
/// cannot silently fall back to a default.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<Scenario>,
    /// Systems under study; empty means the scenario's defaults.
    pub systems: Vec<SystemSpec>,
    /// Basis truncation `B` for intertwiners.
    pub truncation: u32,
    /// Residual-search window `N`.
    pub window: u32,
    /// Window of the reference run that fixes the residual floor.
    pub reference_window: u32,
    pub band: u32,
    /// Multipliers `e^{2πiku}` probed on systems without a symbolic tower.
    pub ks: Vec<i64>,
    pub tower_depth: u32,
    pub samples: usize,
    pub block_length: u32,
    pub conjugacy_points: usize,
    pub seed: u64,
    pub precision_bits: u32,
    /// Also report entropies in bits.
    pub bits: bool,
    pub format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,

    // Parameters of single `compute` operations.
    pub k: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partition: Option<PartitionSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<TestSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<TestSet>,
    /// Lag for `correlation`.
    pub i: u64,
    /// Horizon for `mixing`.
    pub t: u64,
    pub mode: CorrelationMode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observable: Option<Observable>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let protocol = ResidualProtocol::default();
        Self {
            scenario: None,
            systems: Vec::new(),
            truncation: 16,
            window: protocol.truncation,
            reference_window: protocol.reference_truncation,
            band: DEFAULT_BAND,
            ks: protocol.ks,
            tower_depth: 3,
            samples: 100_000,
            block_length: 10,
            conjugacy_points: 10_000,
            seed: 0,
            precision_bits: 128,
            bits: false,
            format: Format::Csv,
            out: None,
            k: 1,
            grid: None,
            partition: None,
            a: None,
            b: None,
            i: 1,
            t: 1000,
            mode: CorrelationMode::Exact,
            observable: None,
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub precision_bits: Option<u32>,
    pub format: Option<Format>,
    pub bits: bool,
    pub systems: Vec<SystemSpec>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    /// Applies `overrides`, fixes the scenario and fills in default systems.
    pub fn resolve(mut self, scenario: Scenario, overrides: Overrides) -> Result<Self> {
        if let Some(s) = self.scenario {
            if s != scenario {
                bail!("config is for scenario {s}, not {scenario}");
            }
        }
        self.scenario = Some(scenario);
        if let Some(seed) = overrides.seed {
            self.seed = seed;
        }
        if let Some(out) = overrides.out {
            self.out = Some(out);
        }
        if let Some(bits) = overrides.precision_bits {
            self.precision_bits = bits;
        }
        if let Some(format) = overrides.format {
            self.format = format;
        }
        self.bits |= overrides.bits;
        if !overrides.systems.is_empty() {
            self.systems = overrides.systems;
        }
        if self.systems.is_empty() {
            self.systems = default_systems(scenario);
        }
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("truncation", self.truncation as u64),
            ("window", self.window as u64),
            ("reference_window", self.reference_window as u64),
            ("band", self.band as u64),
            ("tower_depth", self.tower_depth as u64),
            ("samples", self.samples as u64),
            ("block_length", self.block_length as u64),
            ("conjugacy_points", self.conjugacy_points as u64),
            ("precision_bits", self.precision_bits as u64),
            ("t", self.t),
        ];
        for (name, value) in positive {
            if value == 0 {
                bail!("{name} must be positive");
            }
        }
        if self.precision_bits > 4096 {
            bail!("precision_bits {} exceeds 4096", self.precision_bits);
        }
        if self.reference_window > self.window {
            bail!(
                "reference_window {} exceeds window {}",
                self.reference_window,
                self.window
            );
        }
        if self.grid == Some(0) {
            bail!("grid must be positive");
        }
        if let CorrelationMode::MonteCarlo { samples: 0 } = self.mode {
            bail!("monte-carlo mode needs a positive sample count");
        }
        Ok(())
    }

    pub fn protocol(&self) -> ResidualProtocol {
        ResidualProtocol {
            ks: self.ks.clone(),
            truncation: self.window,
            reference_truncation: self.reference_window,
            band: self.band,
        }
    }

    /// The configuration as echoed in reports: independent of where output
    /// goes and how it is formatted.
    pub fn echo(&self) -> Self {
        Self {
            out: None,
            format: Format::default(),
            ..self.clone()
        }
    }
}

pub fn default_systems(scenario: Scenario) -> Vec<SystemSpec> {
    let gamma = RotationNumber::sqrt2_minus_one();
    match scenario {
        Scenario::Letter => vec![
            SystemSpec::skew(gamma.clone()),
            SystemSpec::product(gamma, BernoulliSpec::fair_coin()),
        ],
        Scenario::Kolmogorov => vec![
            SystemSpec::bernoulli(BernoulliSpec::fair_coin()),
            SystemSpec::bernoulli(BernoulliSpec::uniform(4).expect("four symbols")),
        ],
        Scenario::Theorem1 => vec![
            SystemSpec::rotation(gamma),
            SystemSpec::rotation(RotationNumber::quadratic(2, -1, 2, 1).expect("2 - √2")),
        ],
        Scenario::Compute => vec![SystemSpec::skew(gamma)],
    }
}

/// Short human-readable name used in CSV rows.
pub fn system_label(spec: &SystemSpec) -> String {
    let probs = |s: &BernoulliSpec| {
        s.probs()
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    };
    match spec {
        SystemSpec::Rotation { gamma } => format!("rotation(γ = {gamma})"),
        SystemSpec::Skew { gamma } => format!("skew(γ = {gamma})"),
        SystemSpec::Bernoulli { shift } => format!("bernoulli({})", probs(shift)),
        SystemSpec::Product { gamma, shift } => {
            format!("product(γ = {gamma}; {})", probs(shift))
        }
    }
}
