// SPDX-License-Identifier: Apache-2.0

//! Spectral invariants read off the orbit structure.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::basis::{koopman_apply, normalizing_phase, FourierMode};
use super::orbits::{orbit_decompose, Orbit};
use crate::error::{Error, Result};
use crate::number::{QuadraticElement, RotationNumber};
use crate::phase::Phase;
use crate::systems::SystemSpec;

/// A spectral multiplicity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Multiplicity {
    Finite(u64),
    CountablyInfinite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumTag {
    PurePoint,
    PureContinuous,
    Mixed,
}

/// The eigenvalue group `{e^{2πi(a_1γ_1 + … + a_nγ_n)}}` and the
/// multiplicity of the eigenvalue 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointPart {
    pub generators: Vec<RotationNumber>,
    pub simple: bool,
    pub unit_multiplicity: Multiplicity,
}

/// Search bound for integer relations among generators.
pub const RELATION_BOUND: i64 = 64;

impl PointPart {
    /// Only the eigenvalue 1, simple.
    pub fn trivial() -> Self {
        Self {
            generators: Vec::new(),
            simple: true,
            unit_multiplicity: Multiplicity::Finite(1),
        }
    }

    /// The point part of a product of independent rotations. A nontrivial
    /// integer relation among the generators (searched up to
    /// [`RELATION_BOUND`]) makes 1 an eigenvalue of infinite multiplicity.
    pub fn from_generators(generators: Vec<RotationNumber>) -> Self {
        let related = generators.iter().enumerate().any(|(i, a)| {
            generators[i + 1..]
                .iter()
                .any(|b| has_relation(a, b, RELATION_BOUND))
        });
        Self {
            generators,
            simple: !related,
            unit_multiplicity: if related {
                Multiplicity::CountablyInfinite
            } else {
                Multiplicity::Finite(1)
            },
        }
    }

    /// Point part of the direct product of two systems.
    pub fn merge(&self, other: &PointPart) -> Self {
        let mut gens = self.generators.clone();
        gens.extend(other.generators.iter().cloned());
        let merged = Self::from_generators(gens);
        if self.simple && other.simple {
            merged
        } else {
            Self {
                simple: false,
                unit_multiplicity: Multiplicity::CountablyInfinite,
                ..merged
            }
        }
    }

    /// Whether `e^{2πix}` lies in the group, searching coefficients up to
    /// `bound`.
    pub fn contains(&self, x: &QuadraticElement, bound: i64) -> bool {
        fn search(gens: &[RotationNumber], x: &QuadraticElement, bound: i64) -> bool {
            match gens {
                [] => x.is_integer(),
                [g] => solve_multiple(g.element(), x, bound).is_some(),
                [g, rest @ ..] => (-bound..=bound).any(|a| {
                    x.checked_sub(&g.element().mul_int(a))
                        .is_some_and(|r| search(rest, &r, bound))
                }),
            }
        }
        search(&self.generators, x, bound)
    }
}

/// Integer `a` with `|a| ≤ bound` and `a·from ≡ to (mod 1)`, solved exactly.
fn solve_multiple(from: &QuadraticElement, to: &QuadraticElement, bound: i64) -> Option<i64> {
    let a: BigRational = if from.is_rational() {
        if !to.is_rational() {
            return None;
        }
        // rational generator: fall back to a scan
        return (-bound..=bound).find(|&a| {
            from.mul_int(a)
                .checked_sub(to)
                .is_some_and(|d| d.is_integer())
        });
    } else if to.is_rational() {
        BigRational::from_integer(BigInt::from(0))
    } else {
        if from.radicand() != to.radicand() {
            return None;
        }
        to.surd_part() / from.surd_part()
    };
    if !a.is_integer() || a.abs() > BigRational::from_integer(bound.into()) {
        return None;
    }
    let a = a.to_integer().to_i64()?;
    from.mul_int(a)
        .checked_sub(to)
        .filter(QuadraticElement::is_integer)
        .map(|_| a)
}

fn has_relation(a: &RotationNumber, b: &RotationNumber, bound: i64) -> bool {
    (-bound..=bound).any(|i| {
        (-bound..=bound).any(|j| {
            (i != 0 || j != 0)
                && a.element()
                    .mul_int(i)
                    .checked_add(&b.element().mul_int(j))
                    .is_some_and(|s| s.is_integer())
        })
    })
}

/// Point part plus Lebesgue multiplicity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumDescriptor {
    pub point: PointPart,
    pub lebesgue: Multiplicity,
    pub tag: SpectrumTag,
}

impl SpectrumDescriptor {
    pub fn new(point: PointPart, lebesgue: Multiplicity) -> Self {
        let tag = if lebesgue == Multiplicity::Finite(0) {
            SpectrumTag::PurePoint
        } else if point.generators.is_empty() && point.simple {
            SpectrumTag::PureContinuous
        } else {
            SpectrumTag::Mixed
        };
        Self {
            point,
            lebesgue,
            tag,
        }
    }

    /// Ergodicity is simplicity of the eigenvalue 1.
    pub fn is_ergodic(&self) -> bool {
        self.point.simple && self.point.unit_multiplicity == Multiplicity::Finite(1)
    }

    /// Weak mixing: 1 is the only eigenvalue and it is simple.
    pub fn is_weak_mixing(&self) -> bool {
        self.is_ergodic() && self.point.generators.is_empty()
    }
}

/// Spectrum of a named system.
pub fn spectrum_of(spec: &SystemSpec) -> SpectrumDescriptor {
    match spec {
        SystemSpec::Rotation { gamma } => SpectrumDescriptor::new(
            PointPart::from_generators(vec![gamma.clone()]),
            Multiplicity::Finite(0),
        ),
        SystemSpec::Skew { gamma } | SystemSpec::Product { gamma, .. } => SpectrumDescriptor::new(
            PointPart::from_generators(vec![gamma.clone()]),
            Multiplicity::CountablyInfinite,
        ),
        SystemSpec::Bernoulli { .. } => {
            SpectrumDescriptor::new(PointPart::trivial(), Multiplicity::CountablyInfinite)
        }
    }
}

/// Outcome of comparing `{e^{2πikγ_1}}` with `{e^{2πikγ_2}}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "verdict")]
pub enum GroupComparison {
    /// `γ_2 ≡ forward·γ_1` and `γ_1 ≡ backward·γ_2` (mod 1).
    Equal {
        forward: i64,
        backward: i64,
    },
    NotEqualWithinBound {
        bound: i64,
    },
}

impl GroupComparison {
    pub fn is_equal(&self) -> bool {
        matches!(self, GroupComparison::Equal { .. })
    }
}

/// Decides equality of the two eigenvalue groups. Each inclusion is an
/// integer relation `γ_2 ≡ a·γ_1`, solved exactly for `|a| ≤ bound`.
pub fn point_spectrum_groups_equal(
    g1: &RotationNumber,
    g2: &RotationNumber,
    bound: i64,
) -> Result<GroupComparison> {
    for g in [g1, g2] {
        if !g.is_exact() {
            return Err(Error::NonExact(format!(
                "rotation number {g} is a decimal; group membership needs a quadratic surd"
            )));
        }
    }
    let forward = solve_multiple(g1.element(), g2.element(), bound);
    let backward = solve_multiple(g2.element(), g1.element(), bound);
    Ok(match (forward, backward) {
        (Some(forward), Some(backward)) => GroupComparison::Equal { forward, backward },
        _ => GroupComparison::NotEqualWithinBound { bound },
    })
}

/// Proper functions of the skew map inside a truncation, with a certificate
/// that the remaining rows contribute none.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProperModes {
    /// `g_{k,0}` with eigenvalue `e^{2πikγ}`.
    pub modes: Vec<(FourierMode, Phase)>,
    pub rows: Vec<RowCertificate>,
}

/// Row `m ≠ 0` splits into `|m|` chains on which the operator acts as a
/// translation by `m`. A translation without fixed points moves every
/// nonempty finite support, so no finite combination in the row is proper.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowCertificate {
    pub m: i64,
    pub chains: usize,
    pub free: bool,
}

pub fn proper_modes_of_skew(b: u32, gamma: &RotationNumber) -> Result<ProperModes> {
    let spec = SystemSpec::skew(gamma.clone());
    let mut modes = Vec::new();
    let mut rows: Vec<RowCertificate> = Vec::new();
    for orbit in orbit_decompose(&spec, b)? {
        match orbit {
            Orbit::Fixed { index, k } => {
                let (phase, image) = koopman_apply(&spec, index)?;
                debug_assert_eq!(image, index);
                modes.push((FourierMode::new(k, 0), phase));
            }
            Orbit::Chain { label, members, .. } => {
                let super::orbits::ChainLabel::Skew { m, r } = label else {
                    unreachable!("skew chains carry skew labels")
                };
                // normalizable along the chain and never mapped to itself
                let free = normalizing_phase(r, m).is_ok()
                    && members
                        .iter()
                        .all(|&idx| koopman_apply(&spec, idx).is_ok_and(|(_, image)| image != idx));
                match rows.iter_mut().find(|row| row.m == m) {
                    Some(row) => {
                        row.chains += 1;
                        row.free &= free;
                    }
                    None => rows.push(RowCertificate { m, chains: 1, free }),
                }
            }
        }
    }
    rows.sort_by_key(|r| r.m);
    Ok(ProperModes { modes, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::BernoulliSpec;

    fn q(p: i64, qq: i64, d: i64, r: i64) -> RotationNumber {
        RotationNumber::quadratic(p, qq, d, r).unwrap()
    }

    #[test]
    fn descriptors_of_the_four_systems() {
        let g = RotationNumber::sqrt2_minus_one();
        let fair = BernoulliSpec::fair_coin();
        assert_eq!(
            spectrum_of(&SystemSpec::rotation(g.clone())).tag,
            SpectrumTag::PurePoint
        );
        assert_eq!(
            spectrum_of(&SystemSpec::skew(g.clone())).tag,
            SpectrumTag::Mixed
        );
        let b = spectrum_of(&SystemSpec::bernoulli(fair.clone()));
        assert_eq!(b.tag, SpectrumTag::PureContinuous);
        assert_eq!(b.lebesgue, Multiplicity::CountablyInfinite);
        assert!(b.is_weak_mixing());
        assert_eq!(
            spectrum_of(&SystemSpec::product(g.clone(), fair)),
            spectrum_of(&SystemSpec::skew(g))
        );
    }

    #[test]
    fn duplicated_generators_break_ergodicity() {
        let g = RotationNumber::sqrt2_minus_one();
        let p = PointPart::from_generators(vec![g.clone()]);
        assert!(SpectrumDescriptor::new(p.clone(), Multiplicity::Finite(0)).is_ergodic());
        let doubled = p.merge(&p);
        assert!(!SpectrumDescriptor::new(doubled, Multiplicity::Finite(0)).is_ergodic());
        let mut twice = PointPart::trivial();
        twice.unit_multiplicity = Multiplicity::Finite(2);
        assert!(!SpectrumDescriptor::new(twice, Multiplicity::CountablyInfinite).is_ergodic());
        let independent = p.merge(&PointPart::from_generators(vec![q(0, 1, 3, 1)]));
        assert!(independent.simple);
    }

    #[test]
    fn group_equality_examples() {
        let a = RotationNumber::sqrt2_minus_one();
        let b = q(2, -1, 2, 1);
        assert_eq!(
            point_spectrum_groups_equal(&a, &b, 64).unwrap(),
            GroupComparison::Equal {
                forward: -1,
                backward: -1
            }
        );
        assert_eq!(
            point_spectrum_groups_equal(&a, &a.scaled(2).unwrap(), 64).unwrap(),
            GroupComparison::NotEqualWithinBound { bound: 64 }
        );
        assert!(!point_spectrum_groups_equal(&a, &q(0, 1, 3, 1), 64)
            .unwrap()
            .is_equal());
        let dec = RotationNumber::decimal("0.25").unwrap();
        assert!(matches!(
            point_spectrum_groups_equal(&a, &dec, 64),
            Err(Error::NonExact(_))
        ));
    }

    #[test]
    fn group_membership() {
        let g = RotationNumber::sqrt2_minus_one();
        let p = PointPart::from_generators(vec![g.clone()]);
        assert!(p.contains(&g.multiple_mod_one(-7), 64));
        assert!(p.contains(&QuadraticElement::integer(3), 64));
        assert!(!p.contains(&q(0, 1, 3, 1).element().clone(), 64));
    }

    #[test]
    fn only_row_zero_is_proper() {
        let proper = proper_modes_of_skew(4, &RotationNumber::sqrt2_minus_one()).unwrap();
        assert_eq!(proper.modes.len(), 9);
        assert!(proper
            .modes
            .iter()
            .all(|(mode, ph)| *ph == Phase::gamma_multiple(mode.k)));
        assert_eq!(proper.rows.len(), 8);
        for row in &proper.rows {
            assert!(row.free);
            assert_eq!(row.chains, row.m.unsigned_abs() as usize);
        }
    }
}
