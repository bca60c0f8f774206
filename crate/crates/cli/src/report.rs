// SPDX-License-Identifier: Apache-2.0

//! The machine-readable record of a run: inputs, every computed step, and
//! the verdicts drawn from them.

use ergodic_core::entropy::{EntropyClassification, EntropyEstimate};
use ergodic_core::koopman::{GroupComparison, SpectrumDescriptor, VerificationReport};
use ergodic_core::mixing::{
    CorrelationMode, CorrelationPoint, MixingVerdict, Observable, TestSet, WeakMixingStatistic,
};
use ergodic_core::tower::{ResidualReport, Tower, TowerComparison};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;

/// How a verdict was established.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Exact,
    MonteCarlo,
    ResidualCertified,
    Spectral,
}

impl From<ergodic_core::tower::Provenance> for Provenance {
    fn from(p: ergodic_core::tower::Provenance) -> Self {
        use ergodic_core::tower::Provenance as P;
        match p {
            P::Exact => Provenance::Exact,
            P::Spectral => Provenance::Spectral,
            P::ResidualCertified => Provenance::ResidualCertified,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntropyMethod {
    Exact,
    MonteCarlo,
    /// Block frequencies along one sampled trajectory.
    PlugIn,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "kebab-case")]
pub enum Step {
    Spectrum {
        system: String,
        descriptor: SpectrumDescriptor,
    },
    Intertwiner {
        source: String,
        target: String,
        truncation: u32,
        point_multiplier: i64,
        entries: usize,
        verification: VerificationReport,
    },
    Tower {
        system: String,
        tower: Tower,
    },
    Residual {
        system: String,
        /// Reference residual `r₀` this run was classified against.
        #[serde(skip_serializing_if = "Option::is_none")]
        floor: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        exists: Option<bool>,
        report: ResidualReport,
    },
    TowerComparison {
        a: String,
        b: String,
        comparison: TowerComparison,
    },
    Entropy {
        system: String,
        partition: String,
        method: EntropyMethod,
        #[serde(skip_serializing_if = "Option::is_none")]
        estimate: Option<EntropyEstimate>,
        #[serde(skip_serializing_if = "Option::is_none")]
        bits: Option<f64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        note: Option<String>,
    },
    Classification {
        a: String,
        b: String,
        classification: EntropyClassification,
    },
    Groups {
        a: String,
        b: String,
        comparison: GroupComparison,
    },
    Conjugacy {
        a: String,
        b: String,
        /// `c(u) = sign·u`.
        sign: i64,
        samples: usize,
        residual: f64,
        threshold: f64,
    },
    Correlation {
        system: String,
        a: TestSet,
        b: TestSet,
        mode: CorrelationMode,
        point: CorrelationPoint,
    },
    Mixing {
        system: String,
        a: TestSet,
        b: TestSet,
        mode: CorrelationMode,
        statistic: WeakMixingStatistic,
        verdict: MixingVerdict,
        spectral_weak_mixing: bool,
    },
    Birkhoff {
        system: String,
        observable: Observable,
        n: u64,
        value: f64,
    },
}

/// A claim together with the steps that support it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub claim: String,
    pub statement: String,
    pub provenance: Provenance,
    pub evidence: Vec<Step>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Outcome {
    Complete,
    /// A step could not be decided; the report holds everything up to it.
    Inconclusive {
        reason: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaValue {
    pub system: String,
    pub bits: u32,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub scenario: String,
    pub version: String,
    pub seed: u64,
    pub inputs: ExperimentConfig,
    pub gammas: Vec<GammaValue>,
    pub steps: Vec<Step>,
    pub verdicts: Vec<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conclusion: Option<String>,
    pub outcome: Outcome,
}

impl ExperimentReport {
    pub fn new(scenario: impl Into<String>, config: &ExperimentConfig) -> Self {
        let gammas = config
            .systems
            .iter()
            .filter_map(|s| {
                s.gamma().map(|g| GammaValue {
                    system: crate::config::system_label(s),
                    bits: config.precision_bits,
                    value: g.value_string(config.precision_bits),
                })
            })
            .collect();
        Self {
            scenario: scenario.into(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: config.seed,
            inputs: config.echo(),
            gammas,
            steps: Vec::new(),
            verdicts: Vec::new(),
            conclusion: None,
            outcome: Outcome::Complete,
        }
    }

    /// Records a step and returns a copy for use as evidence.
    pub fn push(&mut self, step: Step) -> Step {
        self.steps.push(step.clone());
        step
    }

    pub fn verdict(
        &mut self,
        claim: &str,
        statement: impl Into<String>,
        provenance: Provenance,
        evidence: Vec<Step>,
    ) {
        debug_assert!(!evidence.is_empty(), "verdict {claim} without evidence");
        self.verdicts.push(Verdict {
            claim: claim.into(),
            statement: statement.into(),
            provenance,
            evidence,
        });
    }

    pub fn inconclusive(&mut self, reason: impl Into<String>) {
        self.outcome = Outcome::Inconclusive {
            reason: reason.into(),
        };
    }

    pub fn is_complete(&self) -> bool {
        self.outcome == Outcome::Complete
    }

    /// Verdicts whose evidence is missing or not among the recorded steps.
    pub fn unsupported_verdicts(&self) -> Vec<&str> {
        self.verdicts
            .iter()
            .filter(|v| v.evidence.is_empty() || v.evidence.iter().any(|e| !self.steps.contains(e)))
            .map(|v| v.claim.as_str())
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evidence_must_be_recorded() {
        let mut report = ExperimentReport::new("compute", &ExperimentConfig::default());
        let step = Step::Conjugacy {
            a: "a".into(),
            b: "b".into(),
            sign: 1,
            samples: 4,
            residual: 0.0,
            threshold: 1e-12,
        };
        let recorded = report.push(step.clone());
        report.verdict(
            "spacial",
            "identity",
            Provenance::MonteCarlo,
            vec![recorded],
        );
        assert!(report.unsupported_verdicts().is_empty());
        report.steps.clear();
        assert_eq!(report.unsupported_verdicts(), ["spacial"]);
    }

    #[test]
    fn json_round_trip_keeps_floats() {
        let mut report = ExperimentReport::new("compute", &ExperimentConfig::default());
        report.push(Step::Birkhoff {
            system: "rotation".into(),
            observable: Observable::U,
            n: 3,
            value: 0.1 + 0.2,
        });
        report.inconclusive("stopped");
        let back: ExperimentReport = serde_json::from_str(&report.to_json().unwrap()).unwrap();
        assert_eq!(back, report);
    }
}
