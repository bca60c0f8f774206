// SPDX-License-Identifier: Apache-2.0

//! Single operations exposed as `compute <op>`.

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use ergodic_core::entropy::{
    bernoulli_entropy, partition_refine_entropy, EntropyEstimate, PartitionSpec,
};
use ergodic_core::koopman::{point_spectrum_groups_equal, spectrum_of, RELATION_BOUND};
use ergodic_core::mixing::{
    birkhoff_average, correlation, spectral_weak_mixing_check, weak_mixing_statistic,
    MixingVerdict, Observable, TestSet,
};
use ergodic_core::tower::{compute_tower, quasi_eigen_residual_search};
use ergodic_core::{SeedStreams, SystemSpec};
use serde::{Deserialize, Serialize};

use crate::config::{system_label, ExperimentConfig};
use crate::report::{EntropyMethod, ExperimentReport, Step};
use crate::scenarios::{entropy_step, intertwiner_step};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Op {
    /// Spectrum descriptor of each system.
    Spectrum,
    /// Generalized proper-function tower (rotation and skew).
    Tower,
    /// Quasi-eigenfunction residual for multiplier `e^{2πiku}`.
    Residual,
    /// Verified intertwiner between the first two systems.
    Intertwiner,
    /// Eigenvalue-group comparison of the first two rotation numbers.
    Groups,
    /// Exact and sampled entropy of each system.
    Entropy,
    /// `μ(Sⁱ(A) ∩ B)`.
    Correlation,
    /// Weak-mixing statistic up to `t`.
    Mixing,
    /// Birkhoff average of an observable from a sampled start.
    Birkhoff,
}

impl Op {
    pub fn name(self) -> &'static str {
        match self {
            Op::Spectrum => "spectrum",
            Op::Tower => "tower",
            Op::Residual => "residual",
            Op::Intertwiner => "intertwiner",
            Op::Groups => "groups",
            Op::Entropy => "entropy",
            Op::Correlation => "correlation",
            Op::Mixing => "mixing",
            Op::Birkhoff => "birkhoff",
        }
    }
}

fn first_two(config: &ExperimentConfig, op: Op) -> Result<(&SystemSpec, &SystemSpec)> {
    match config.systems.as_slice() {
        [a, b, ..] => Ok((a, b)),
        _ => bail!("compute {} needs two systems", op.name()),
    }
}

fn sets(config: &ExperimentConfig, system: &SystemSpec) -> (TestSet, TestSet) {
    let default = || match system {
        SystemSpec::Bernoulli { .. } => TestSet::Cylinder {
            constraints: ergodic_core::CylinderSet::single(
                0,
                system.shift().expect("shift").label(0),
            ),
        },
        _ => TestSet::Interval { a: 0.0, b: 0.5 },
    };
    let a = config.a.clone().unwrap_or_else(default);
    let b = config.b.clone().unwrap_or_else(|| a.clone());
    (a, b)
}

fn partition_for(config: &ExperimentConfig, system: &SystemSpec) -> (String, PartitionSpec) {
    if let Some(p) = &config.partition {
        return (format!("custom({} cells)", p.len()), p.clone());
    }
    match system {
        SystemSpec::Bernoulli { shift } => ("time-zero".into(), PartitionSpec::time_zero(shift)),
        _ => ("halves".into(), PartitionSpec::halves()),
    }
}

pub fn run_compute(op: Op, config: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new(format!("compute {}", op.name()), config);
    let root = SeedStreams::new(config.seed);
    match op {
        Op::Spectrum => {
            for s in &config.systems {
                report.push(Step::Spectrum {
                    system: system_label(s),
                    descriptor: spectrum_of(s),
                });
            }
        }
        Op::Tower => {
            for s in &config.systems {
                let tower = compute_tower(s, config.tower_depth)
                    .with_context(|| format!("tower of {}", system_label(s)))?;
                report.push(Step::Tower {
                    system: system_label(s),
                    tower,
                });
            }
        }
        Op::Residual => {
            for s in &config.systems {
                let r = quasi_eigen_residual_search(
                    s,
                    config.k,
                    config.window,
                    config.band,
                    config.grid,
                )
                .with_context(|| format!("residual search on {}", system_label(s)))?;
                report.push(Step::Residual {
                    system: system_label(s),
                    floor: None,
                    exists: None,
                    report: r,
                });
            }
        }
        Op::Intertwiner => {
            let (a, b) = first_two(config, op)?;
            report.push(intertwiner_step(a, b, config.truncation)?);
        }
        Op::Groups => {
            let (a, b) = first_two(config, op)?;
            let (Some(ga), Some(gb)) = (a.gamma(), b.gamma()) else {
                bail!("compute groups needs two systems with rotation numbers");
            };
            report.push(Step::Groups {
                a: system_label(a),
                b: system_label(b),
                comparison: point_spectrum_groups_equal(ga, gb, RELATION_BOUND)?,
            });
        }
        Op::Entropy => {
            for (i, s) in config.systems.iter().enumerate() {
                let (name, alpha) = partition_for(config, s);
                alpha.validate_for(s)?;
                if let (SystemSpec::Bernoulli { shift }, None) = (s, &config.partition) {
                    let exact = EntropyEstimate {
                        value: bernoulli_entropy(shift),
                        block_length: config.block_length,
                        samples: 0,
                        stderr: 0.0,
                        exact: true,
                    };
                    report.push(entropy_step(
                        s,
                        &name,
                        EntropyMethod::Exact,
                        Ok(exact),
                        config.bits,
                    )?);
                }
                let streams = root.child(&format!("entropy/{i}"));
                let est = partition_refine_entropy(
                    s,
                    &alpha,
                    config.block_length,
                    config.samples,
                    &streams,
                );
                report.push(entropy_step(
                    s,
                    &name,
                    EntropyMethod::MonteCarlo,
                    est,
                    config.bits,
                )?);
            }
        }
        Op::Correlation => {
            for (n, s) in config.systems.iter().enumerate() {
                let (a, b) = sets(config, s);
                let point = correlation(
                    s,
                    &a,
                    &b,
                    config.i,
                    config.mode,
                    &root.child(&format!("system/{n}")),
                )?;
                report.push(Step::Correlation {
                    system: system_label(s),
                    a,
                    b,
                    mode: config.mode,
                    point,
                });
            }
        }
        Op::Mixing => {
            for (n, s) in config.systems.iter().enumerate() {
                let (a, b) = sets(config, s);
                let statistic = weak_mixing_statistic(
                    s,
                    &a,
                    &b,
                    config.t,
                    config.mode,
                    &root.child(&format!("system/{n}")),
                )?;
                report.push(Step::Mixing {
                    system: system_label(s),
                    a,
                    b,
                    mode: config.mode,
                    verdict: MixingVerdict::from_statistic(&statistic),
                    statistic,
                    spectral_weak_mixing: spectral_weak_mixing_check(&spectrum_of(s)),
                });
            }
        }
        Op::Birkhoff => {
            let steps = config.samples as u64;
            for (n, s) in config.systems.iter().enumerate() {
                let f = match &config.observable {
                    Some(f) => f.clone(),
                    None => Observable::Indicator {
                        set: sets(config, s).0,
                    },
                };
                let reach = match &f {
                    Observable::Symbol { position } => position.unsigned_abs() as usize,
                    _ => 64,
                };
                let mut rng = root.child(&format!("system/{n}")).stream("birkhoff", 0);
                let x0 = s.sample_point(&mut rng, config.samples + reach);
                report.push(Step::Birkhoff {
                    system: system_label(s),
                    value: birkhoff_average(s, &f, &x0, steps)?,
                    observable: f,
                    n: steps,
                });
            }
        }
    }
    Ok(report)
}
