// SPDX-License-Identifier: Apache-2.0

//! The three built-in reproductions.

use anyhow::{bail, ensure, Context, Result};
use ergodic_core::entropy::{
    bernoulli_entropy, block_entropy_rate, coded_trajectory, entropy_classifier, nats_to_bits,
    partition_refine_entropy, EntropyEstimate, PartitionSpec,
};
use ergodic_core::koopman::{
    build_intertwiner, point_spectrum_groups_equal, spectrum_of, verify_intertwiner,
    GroupComparison, RELATION_BOUND,
};
use ergodic_core::systems::rotation_conjugacy_residual;
use ergodic_core::tower::{
    classify_residual, compute_tower, quasi_eigen_residual_search, tower_signature,
    TowerComparison, TowerSignature, TowerVerdict, ACCEPT_RESIDUAL,
};
use ergodic_core::{BernoulliSpec, Error, SeedStreams, SystemSpec};

use crate::config::{system_label, ExperimentConfig};
use crate::report::{EntropyMethod, ExperimentReport, Provenance, Step};

/// Entropies closer than this are treated as equal.
pub const ENTROPY_TOLERANCE: f64 = 1e-9;
/// Largest allowed circle distance between `c(S u)` and `T(c u)`.
pub const CONJUGACY_TOLERANCE: f64 = 1e-12;

fn pair<'a>(
    config: &'a ExperimentConfig,
    scenario: &str,
) -> Result<(&'a SystemSpec, &'a SystemSpec)> {
    match config.systems.as_slice() {
        [a, b] => Ok((a, b)),
        other => bail!(
            "the {scenario} scenario compares two systems, got {}",
            other.len()
        ),
    }
}

pub(crate) fn intertwiner_step(a: &SystemSpec, b: &SystemSpec, truncation: u32) -> Result<Step> {
    let pairing = build_intertwiner(a, b, truncation).with_context(|| {
        format!(
            "building the intertwiner {} → {}",
            system_label(a),
            system_label(b)
        )
    })?;
    let verification = verify_intertwiner(&pairing, truncation)?;
    ensure!(
        verification.passed(),
        "intertwiner {} → {} failed verification with {} mismatches",
        system_label(a),
        system_label(b),
        verification.mismatches
    );
    Ok(Step::Intertwiner {
        source: system_label(a),
        target: system_label(b),
        truncation,
        point_multiplier: pairing.point_multiplier,
        entries: pairing.entries.len(),
        verification,
    })
}

/// Tower signature of one system, recording each residual run. Products
/// carry no symbolic tower, so their `1″ = 1‴` is certified by residuals.
fn signature(
    spec: &SystemSpec,
    config: &ExperimentConfig,
    report: &mut ExperimentReport,
    evidence: &mut Vec<Step>,
) -> Result<Option<TowerSignature>> {
    let protocol = config.protocol();
    let label = system_label(spec);
    if !matches!(spec, SystemSpec::Product { .. }) {
        return Ok(Some(tower_signature(spec, &protocol)?));
    }
    let search = |k, n| quasi_eigen_residual_search(spec, k, n, config.band, config.grid);
    // the constant g = 1 solves k = 0 exactly; anything else means the search is off
    let zero = search(0, config.window)?;
    let ok = zero.residual <= ACCEPT_RESIDUAL;
    evidence.push(report.push(Step::Residual {
        system: label.clone(),
        floor: None,
        exists: Some(ok),
        report: zero.clone(),
    }));
    if !ok {
        report.inconclusive(format!(
            "{label}: k = 0 residual {:e} exceeds {ACCEPT_RESIDUAL:e}",
            zero.residual
        ));
        return Ok(None);
    }
    let mut per_k = Vec::with_capacity(protocol.ks.len());
    for &k in &protocol.ks {
        let reference = search(k, config.reference_window)?;
        let floor = reference.residual;
        evidence.push(report.push(Step::Residual {
            system: label.clone(),
            floor: None,
            exists: None,
            report: reference,
        }));
        let run = search(k, config.window)?;
        match classify_residual(k, floor, run.clone()) {
            Ok(e) => {
                evidence.push(report.push(Step::Residual {
                    system: label.clone(),
                    floor: Some(floor),
                    exists: Some(e.exists),
                    report: run,
                }));
                per_k.push(e);
            }
            Err(Error::Inconclusive(reason)) => {
                evidence.push(report.push(Step::Residual {
                    system: label.clone(),
                    floor: Some(floor),
                    exists: None,
                    report: run,
                }));
                report.inconclusive(format!("{label}: {reason}"));
                return Ok(None);
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(Some(TowerSignature {
        system: spec.kind_name().to_string(),
        second_equals_third: per_k.iter().all(|e| !e.exists),
        provenance: ergodic_core::tower::Provenance::ResidualCertified,
        evidence: per_k,
    }))
}

/// Spectra, a verified intertwiner, then towers: spectrally isomorphic
/// systems whose `1″ = 1‴` status differs are not spacially isomorphic.
pub fn run_reproduce_letter(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let (a, b) = pair(config, "letter")?;
    let mut report = ExperimentReport::new("letter", config);
    let (la, lb) = (system_label(a), system_label(b));

    let spectra = vec![
        report.push(Step::Spectrum {
            system: la.clone(),
            descriptor: spectrum_of(a),
        }),
        report.push(Step::Spectrum {
            system: lb.clone(),
            descriptor: spectrum_of(b),
        }),
    ];
    let inter = report.push(intertwiner_step(a, b, config.truncation)?);
    let mut evidence = spectra;
    evidence.push(inter);
    report.verdict(
        "spectral",
        "spectrally isomorphic",
        Provenance::Exact,
        evidence,
    );

    let mut evidence = Vec::new();
    for s in [a, b] {
        if matches!(s, SystemSpec::Rotation { .. } | SystemSpec::Skew { .. }) {
            let tower = compute_tower(s, config.tower_depth.max(3))?;
            evidence.push(report.push(Step::Tower {
                system: system_label(s),
                tower,
            }));
        }
    }
    let Some(sa) = signature(a, config, &mut report, &mut evidence)? else {
        return Ok(report);
    };
    let Some(sb) = signature(b, config, &mut report, &mut evidence)? else {
        return Ok(report);
    };
    let verdict = if sa.second_equals_third != sb.second_equals_third {
        TowerVerdict::Distinguished
    } else {
        TowerVerdict::NotDistinguished
    };
    let provenance = if [&sa, &sb]
        .iter()
        .any(|s| s.provenance == ergodic_core::tower::Provenance::ResidualCertified)
    {
        Provenance::ResidualCertified
    } else {
        Provenance::Exact
    };
    evidence.push(report.push(Step::TowerComparison {
        a: la,
        b: lb,
        comparison: TowerComparison {
            verdict,
            a: sa,
            b: sb,
        },
    }));
    let (statement, conclusion) = match verdict {
        TowerVerdict::Distinguished => (
            "not spacially isomorphic",
            "spectrally isomorphic, not spacially isomorphic",
        ),
        TowerVerdict::NotDistinguished => (
            "not distinguished by tower",
            "spectrally isomorphic, not distinguished by tower",
        ),
    };
    report.verdict("spacial", statement, provenance, evidence);
    report.conclusion = Some(conclusion.into());
    Ok(report)
}

fn exact_entropy(spec: &BernoulliSpec, n: u32) -> EntropyEstimate {
    EntropyEstimate {
        value: bernoulli_entropy(spec),
        block_length: n,
        samples: 0,
        stderr: 0.0,
        exact: true,
    }
}

pub(crate) fn entropy_step(
    system: &SystemSpec,
    partition: &str,
    method: EntropyMethod,
    estimate: ergodic_core::Result<EntropyEstimate>,
    bits: bool,
) -> Result<Step> {
    let (estimate, note) = match estimate {
        Ok(e) => (Some(e), None),
        Err(Error::Undersampled(why)) => (None, Some(format!("undersampled: {why}"))),
        Err(e) => return Err(e.into()),
    };
    Ok(Step::Entropy {
        system: system_label(system),
        partition: partition.into(),
        method,
        bits: estimate
            .as_ref()
            .filter(|_| bits)
            .map(|e| nats_to_bits(e.value)),
        estimate,
        note,
    })
}

/// Plug-in estimate at the longest block length up to `n` that the
/// trajectory covers.
fn plug_in(trajectory: &[u32], n: u32) -> ergodic_core::Result<EntropyEstimate> {
    let mut last = None;
    for len in (1..=n).rev() {
        match block_entropy_rate(trajectory, len) {
            Err(Error::Undersampled(why)) => last = Some(why),
            other => return other,
        }
    }
    Err(Error::Undersampled(last.unwrap_or_default()))
}

/// Exact and sampled entropies of each Bernoulli shift, then pairwise
/// spectral pairings and entropy classification.
pub fn run_reproduce_kolmogorov(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let shifts = config
        .systems
        .iter()
        .map(|s| match s {
            SystemSpec::Bernoulli { shift } => Ok(shift),
            other => bail!(
                "the kolmogorov scenario takes Bernoulli shifts, got {}",
                other.kind_name()
            ),
        })
        .collect::<Result<Vec<_>>>()?;
    ensure!(
        shifts.len() >= 2,
        "the kolmogorov scenario needs at least two Bernoulli shifts"
    );
    let mut report = ExperimentReport::new("kolmogorov", config);
    let root = SeedStreams::new(config.seed);
    let n = config.block_length;

    let mut spectra = Vec::new();
    let mut exact = Vec::new();
    for (i, (system, shift)) in config.systems.iter().zip(&shifts).enumerate() {
        spectra.push(report.push(Step::Spectrum {
            system: system_label(system),
            descriptor: spectrum_of(system),
        }));
        exact.push(report.push(entropy_step(
            system,
            "time-zero",
            EntropyMethod::Exact,
            Ok(exact_entropy(shift, n)),
            config.bits,
        )?));
        let alpha = PartitionSpec::time_zero(shift);
        let streams = root.child(&format!("entropy/{i}"));
        let sampled = partition_refine_entropy(system, &alpha, n, config.samples, &streams);
        report.push(entropy_step(
            system,
            "time-zero",
            EntropyMethod::MonteCarlo,
            sampled,
            config.bits,
        )?);
        let streams = root.child(&format!("trajectory/{i}"));
        let trajectory = coded_trajectory(system, &alpha, config.samples, &streams)?;
        report.push(entropy_step(
            system,
            "time-zero",
            EntropyMethod::PlugIn,
            plug_in(&trajectory, n),
            config.bits,
        )?);
    }

    for i in 0..shifts.len() {
        for j in i + 1..shifts.len() {
            let (a, b) = (&config.systems[i], &config.systems[j]);
            let (la, lb) = (system_label(a), system_label(b));
            let inter = report.push(intertwiner_step(a, b, config.truncation)?);
            let classification = entropy_classifier(shifts[i], shifts[j], ENTROPY_TOLERANCE)?;
            let spectral = classification.spectral_text();
            let spacial = classification.spacial_text();
            let class = report.push(Step::Classification {
                a: la,
                b: lb,
                classification,
            });
            report.verdict(
                &format!("spectral {i}-{j}"),
                spectral,
                Provenance::Exact,
                vec![spectra[i].clone(), spectra[j].clone(), inter],
            );
            report.verdict(
                &format!("spacial {i}-{j}"),
                spacial,
                Provenance::Exact,
                vec![exact[i].clone(), exact[j].clone(), class],
            );
        }
    }

    let mut values: Vec<f64> = shifts.iter().map(|s| bernoulli_entropy(s)).collect();
    values.sort_by(f64::total_cmp);
    let distinct = 1 + values
        .windows(2)
        .filter(|w| w[1] - w[0] > ENTROPY_TOLERANCE)
        .count();
    report.verdict(
        "entropy values",
        format!(
            "{distinct} distinct entropy values among {} shifts",
            shifts.len()
        ),
        Provenance::Exact,
        exact,
    );
    Ok(report)
}

/// Rotations: equal eigenvalue groups, then an explicit conjugacy.
pub fn run_theorem1_check(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let (a, b) = pair(config, "theorem1")?;
    let (ga, gb) = match (a, b) {
        (SystemSpec::Rotation { gamma: ga }, SystemSpec::Rotation { gamma: gb }) => (ga, gb),
        _ => bail!(
            "the theorem1 scenario compares two rotations, got {} and {}",
            a.kind_name(),
            b.kind_name()
        ),
    };
    let mut report = ExperimentReport::new("theorem1", config);
    let (la, lb) = (system_label(a), system_label(b));
    let comparison = point_spectrum_groups_equal(ga, gb, RELATION_BOUND)?;
    let groups = report.push(Step::Groups {
        a: la.clone(),
        b: lb.clone(),
        comparison: comparison.clone(),
    });
    let GroupComparison::Equal { forward, .. } = comparison else {
        report.verdict(
            "spectral",
            "not spectrally (hence not spacially) isomorphic",
            Provenance::Exact,
            vec![groups],
        );
        report.conclusion = Some("not spacially isomorphic".into());
        return Ok(report);
    };
    report.verdict(
        "spectral",
        "spectrally isomorphic",
        Provenance::Exact,
        vec![groups.clone()],
    );
    if forward.abs() != 1 {
        report.inconclusive(format!(
            "γ′ ≡ {forward}·γ; only u ↦ ±u is tried as a conjugacy"
        ));
        return Ok(report);
    }
    let streams = SeedStreams::new(config.seed).child("theorem1");
    let residual = rotation_conjugacy_residual(ga, gb, forward, config.conjugacy_points, &streams)?;
    let conj = report.push(Step::Conjugacy {
        a: la,
        b: lb,
        sign: forward,
        samples: config.conjugacy_points,
        residual,
        threshold: CONJUGACY_TOLERANCE,
    });
    if residual > CONJUGACY_TOLERANCE {
        report.inconclusive(format!(
            "conjugacy residual {residual:e} exceeds {CONJUGACY_TOLERANCE:e}"
        ));
        return Ok(report);
    }
    let map = if forward == 1 {
        "the identity"
    } else {
        "c(u) = −u mod 1"
    };
    report.verdict(
        "spacial",
        format!("spacially isomorphic via {map}"),
        Provenance::MonteCarlo,
        vec![groups, conj],
    );
    report.conclusion = Some("spectrally and spacially isomorphic".into());
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Overrides, Scenario};

    fn config(scenario: Scenario, systems: Vec<SystemSpec>) -> ExperimentConfig {
        ExperimentConfig {
            systems,
            ..Default::default()
        }
        .resolve(scenario, Overrides::default())
        .unwrap()
    }

    #[test]
    fn plug_in_backs_off_to_a_covered_length() {
        let stream: Vec<u32> = (0..1000).map(|i| (i * 7 % 4) as u32).collect();
        let e = plug_in(&stream, 10).unwrap();
        assert!(e.block_length < 10);
        assert!(matches!(
            plug_in(&stream[..10], 3),
            Err(Error::Undersampled(_))
        ));
    }

    #[test]
    fn rotations_only_for_theorem1() {
        let cfg = config(
            Scenario::Theorem1,
            crate::config::default_systems(Scenario::Letter),
        );
        assert!(run_theorem1_check(&cfg).is_err());
    }

    #[test]
    fn kolmogorov_refuses_circle_systems() {
        let cfg = config(
            Scenario::Kolmogorov,
            crate::config::default_systems(Scenario::Letter),
        );
        assert!(run_reproduce_kolmogorov(&cfg).is_err());
    }
}
