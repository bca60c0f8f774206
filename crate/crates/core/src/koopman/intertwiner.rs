// SPDX-License-Identifier: Apache-2.0

//! Explicit unitary intertwiners between spectrally isomorphic systems.
//!
//! The map is assembled from the orbit structure: proper functions go to
//! proper functions with the same eigenvalue, and the `n`-th source chain is
//! laid onto the `n`-th target chain position by position. Both sides are
//! taken in their normalized frames, where chains shift without phases, so
//! the raw-frame image of a source index `s` paired with `t` is
//! `conj(n_A(s)) · n_B(t) · t`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::basis::{koopman_apply, normalizer, BasisIndex};
use super::orbits::{
    chain_kind, chain_label_at, chain_member, in_truncation, orbit_decompose, point_frequency,
    point_index, Orbit,
};
use super::spectrum::{point_spectrum_groups_equal, spectrum_of, GroupComparison};
use crate::error::{Error, Result};
use crate::number::{QuadraticElement, RotationNumber};
use crate::phase::Phase;
use crate::systems::SystemSpec;

/// `W(source) = conj(source_phase) · target_phase · target`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairEntry {
    pub source: BasisIndex,
    pub target: BasisIndex,
    pub source_phase: Phase,
    pub target_phase: Phase,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntertwinerPairing {
    pub source: SystemSpec,
    pub target: SystemSpec,
    pub truncation: u32,
    /// `a` with `γ_target ≡ a·γ_source`; eigenvalue index `k` maps to `a·k`.
    pub point_multiplier: i64,
    pub entries: Vec<PairEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checked: usize,
    /// Entries whose image leaves the truncation; the commutation relation
    /// involves an index the pairing does not cover.
    pub boundary: usize,
    pub mismatches: usize,
    pub max_phase_residual: f64,
    pub exact: bool,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.mismatches == 0
    }
}

fn point_multiplier(a: &SystemSpec, b: &SystemSpec) -> Result<i64> {
    match (a.gamma(), b.gamma()) {
        (None, None) => Ok(1),
        (Some(ga), Some(gb)) if ga.repr() == gb.repr() => Ok(1),
        (Some(ga), Some(gb)) => match point_spectrum_groups_equal(ga, gb, 64)? {
            GroupComparison::Equal { forward, .. } if forward.abs() == 1 => Ok(forward),
            other => Err(Error::IncompatibleSpectra(format!(
                "eigenvalue groups of γ = {ga} and γ = {gb} differ: {other:?}"
            ))),
        },
        _ => unreachable!("descriptors were compared first"),
    }
}

/// Builds the pairing of the basis of `a` truncated at `b` with the basis of
/// `b_sys`. Fails unless the two spectra agree.
pub fn build_intertwiner(a: &SystemSpec, b_sys: &SystemSpec, b: u32) -> Result<IntertwinerPairing> {
    let (da, db) = (spectrum_of(a), spectrum_of(b_sys));
    if da.lebesgue != db.lebesgue
        || da.point.generators.len() != db.point.generators.len()
        || da.point.simple != db.point.simple
    {
        return Err(Error::IncompatibleSpectra(format!(
            "{} has {:?}, {} has {:?}",
            a.kind_name(),
            da.tag,
            b_sys.kind_name(),
            db.tag
        )));
    }
    let mult = point_multiplier(a, b_sys)?;
    let target_kind = chain_kind(b_sys);
    let mut entries = Vec::new();
    let mut chains = 0u64;
    for orbit in orbit_decompose(a, b)? {
        match orbit {
            Orbit::Fixed { index, k } => {
                let target = point_index(b_sys, mult * k).ok_or_else(|| {
                    Error::IncompatibleSpectra(format!("no eigenfunction for index {}", mult * k))
                })?;
                entries.push(PairEntry {
                    source: index,
                    target,
                    source_phase: Phase::ONE,
                    target_phase: Phase::ONE,
                });
            }
            Orbit::Chain {
                first_position,
                members,
                ..
            } => {
                let kind = target_kind.ok_or_else(|| {
                    Error::IncompatibleSpectra("target has no Lebesgue component".into())
                })?;
                let label = chain_label_at(kind, chains);
                chains += 1;
                for (offset, &source) in members.iter().enumerate() {
                    let target = chain_member(label, first_position + offset as i64);
                    entries.push(PairEntry {
                        source,
                        target,
                        source_phase: normalizer(source),
                        target_phase: normalizer(target),
                    });
                }
            }
        }
    }
    Ok(IntertwinerPairing {
        source: a.clone(),
        target: b_sys.clone(),
        truncation: b,
        point_multiplier: mult,
        entries,
    })
}

fn exponent(phase: &Phase, gamma: Option<&RotationNumber>) -> QuadraticElement {
    match gamma {
        Some(g) => phase.angle(g),
        None => phase
            .rational_angle()
            .expect("systems without a rotation carry rational phases"),
    }
}

/// Checks `W U_A = U_B W` on every paired index inside `truncation` whose
/// Koopman image is also paired. Phases are compared as exact elements of
/// `ℚ(√d)` modulo 1.
pub fn verify_intertwiner(p: &IntertwinerPairing, truncation: u32) -> Result<VerificationReport> {
    let by_source: HashMap<BasisIndex, &PairEntry> =
        p.entries.iter().map(|e| (e.source, e)).collect();
    let (ga, gb) = (p.source.gamma(), p.target.gamma());
    let mut report = VerificationReport {
        checked: 0,
        boundary: 0,
        mismatches: 0,
        max_phase_residual: 0.0,
        exact: true,
    };
    for e in &p.entries {
        if !in_truncation(e.source, truncation as i64) {
            continue;
        }
        let (phi, image) = koopman_apply(&p.source, e.source)?;
        let Some(next) = by_source.get(&image) else {
            report.boundary += 1;
            continue;
        };
        report.checked += 1;
        // W U_A s = φ · conj(n_A(s')) n_B(t') t'
        let lhs = exponent(&(phi * next.source_phase.conj()), ga)
            .checked_add(&exponent(&next.target_phase, gb));
        // U_B W s = conj(n_A(s)) n_B(t) ψ t''
        let (psi, target_image) = koopman_apply(&p.target, e.target)?;
        let rhs = exponent(&e.source_phase.conj(), ga)
            .checked_add(&exponent(&(e.target_phase * psi), gb));
        let diff = match (lhs, rhs) {
            (Some(l), Some(r)) => l.checked_sub(&r),
            _ => None,
        };
        let Some(diff) = diff else {
            return Err(Error::NonExact(
                "source and target phases live in different quadratic fields".into(),
            ));
        };
        let residual = diff.distance_to_integer();
        report.max_phase_residual = report.max_phase_residual.max(residual);
        if target_image != next.target || !diff.fract().is_zero() {
            report.mismatches += 1;
        }
    }
    Ok(report)
}

/// Eigenvalue index of a fixed entry, for reporting.
pub fn entry_frequency(e: &PairEntry) -> Option<(i64, i64)> {
    Some((point_frequency(e.source)?, point_frequency(e.target)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::BernoulliSpec;

    #[test]
    fn skew_to_product_commutes_exactly() {
        let g = RotationNumber::sqrt2_minus_one();
        let a = SystemSpec::skew(g.clone());
        let b = SystemSpec::product(g, BernoulliSpec::fair_coin());
        let p = build_intertwiner(&a, &b, 8).unwrap();
        let report = verify_intertwiner(&p, 8).unwrap();
        assert!(report.passed(), "{report:?}");
        assert!(report.checked > 0);
        assert_eq!(report.max_phase_residual, 0.0);
    }

    #[test]
    fn self_pairing_is_the_identity() {
        let a = SystemSpec::skew(RotationNumber::sqrt2_minus_one());
        let p = build_intertwiner(&a, &a, 5).unwrap();
        assert!(p.entries.iter().all(|e| e.source == e.target));
    }

    #[test]
    fn conjugate_rotation_numbers_flip_eigenvalues() {
        let a = SystemSpec::skew(RotationNumber::sqrt2_minus_one());
        let b = SystemSpec::skew(RotationNumber::quadratic(2, -1, 2, 1).unwrap());
        let p = build_intertwiner(&a, &b, 6).unwrap();
        assert_eq!(p.point_multiplier, -1);
        assert_eq!(
            p.entries
                .iter()
                .filter_map(entry_frequency)
                .find(|f| f.0 == 3),
            Some((3, -3))
        );
        assert!(verify_intertwiner(&p, 6).unwrap().passed());
    }

    #[test]
    fn mismatched_spectra_are_refused() {
        let g = RotationNumber::sqrt2_minus_one();
        let skew = SystemSpec::skew(g.clone());
        let shift = SystemSpec::bernoulli(BernoulliSpec::fair_coin());
        assert!(matches!(
            build_intertwiner(&skew, &shift, 4),
            Err(Error::IncompatibleSpectra(_))
        ));
        let doubled = SystemSpec::skew(g.scaled(2).unwrap());
        assert!(build_intertwiner(&skew, &doubled, 4).is_err());
    }

    #[test]
    fn swapped_targets_are_caught() {
        let g = RotationNumber::sqrt2_minus_one();
        let a = SystemSpec::skew(g.clone());
        let b = SystemSpec::product(g, BernoulliSpec::fair_coin());
        let mut p = build_intertwiner(&a, &b, 6).unwrap();
        let n = p.entries.len();
        let (i, j) = (n / 2, n / 2 + 1);
        let ti = p.entries[i].target;
        p.entries[i].target = p.entries[j].target;
        p.entries[j].target = ti;
        assert!(verify_intertwiner(&p, 6).unwrap().mismatches > 0);
    }
}
