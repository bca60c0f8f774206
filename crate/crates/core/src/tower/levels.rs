// SPDX-License-Identifier: Apache-2.0

//! The generalized proper-function tower on character groups.
//!
//! `F′` collects the unimodular `g` with `g∘S = f·g` for some `f ∈ F`. For a
//! character `χ` the multiplier is forced: `f = χ∘S / χ`, the quotient. A
//! character therefore enters the next level exactly when its quotient lies
//! in the current one, and the tower reduces to lattice arithmetic.

use serde::{Deserialize, Serialize};

use super::lattice::Lattice2;
use crate::error::{Error, Result};
use crate::number::RotationNumber;
use crate::phase::Phase;
use crate::systems::SystemSpec;

/// Systems whose characters map to constants times characters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum CharacterDynamics {
    /// `u ↦ u + γ`; characters `(k, 0)`.
    Rotation { gamma: RotationNumber },
    /// `(u, v) ↦ (u + γ, v + u + β)` with `β = drift`. The drift arises when
    /// the skew map is conjugated by a coordinate change.
    Skew { gamma: RotationNumber, drift: Phase },
}

impl CharacterDynamics {
    pub fn from_spec(spec: &SystemSpec) -> Result<Self> {
        match spec {
            SystemSpec::Rotation { gamma } => Ok(Self::Rotation {
                gamma: gamma.clone(),
            }),
            SystemSpec::Skew { gamma } => Ok(Self::Skew {
                gamma: gamma.clone(),
                drift: Phase::ONE,
            }),
            other => Err(Error::Unsupported {
                kind: other.kind_name(),
                what: "tower levels need a character-lattice structure".into(),
            }),
        }
    }

    /// The full character group.
    pub fn characters(&self) -> Lattice2 {
        match self {
            Self::Rotation { .. } => Lattice2::FIRST_AXIS,
            Self::Skew { .. } => Lattice2::FULL,
        }
    }

    /// `χ∘S / χ` for `χ = (k, m)`.
    pub fn quotient(&self, (k, m): (i64, i64)) -> Quotient {
        match self {
            Self::Rotation { .. } => Quotient {
                phase: Phase::gamma_multiple(k),
                character: (0, 0),
            },
            Self::Skew { drift, .. } => {
                let drift_part = Phase::new(drift.turn() * m, drift.gamma_coefficient() * m);
                Quotient {
                    phase: Phase::gamma_multiple(k) * drift_part,
                    character: (m, 0),
                }
            }
        }
    }
}

/// A constant phase times a character.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quotient {
    pub phase: Phase,
    pub character: (i64, i64),
}

impl Quotient {
    /// Pointwise product.
    pub fn times(&self, other: &Quotient) -> Quotient {
        Quotient {
            phase: self.phase * other.phase,
            character: (
                self.character.0 + other.character.0,
                self.character.1 + other.character.1,
            ),
        }
    }
}

/// One level of the tower: a character subgroup, optionally with all
/// unimodular constants adjoined.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerLevel {
    pub depth: u32,
    pub characters: Lattice2,
    pub with_constants: bool,
}

impl TowerLevel {
    /// The set `{1}` the tower starts from.
    pub fn initial() -> Self {
        Self {
            depth: 0,
            characters: Lattice2::TRIVIAL,
            with_constants: false,
        }
    }

    pub fn contains_character(&self, chi: (i64, i64)) -> bool {
        self.characters.contains(chi)
    }

    /// Whether `phase · χ` lies in the level.
    pub fn contains(&self, q: &Quotient) -> bool {
        self.characters.contains(q.character) && (self.with_constants || q.phase.is_one())
    }

    pub fn is_subset_of(&self, other: &TowerLevel) -> bool {
        self.characters.is_subgroup_of(&other.characters)
            && (!self.with_constants || other.with_constants)
    }

    pub fn same_set(&self, other: &TowerLevel) -> bool {
        self.characters == other.characters && self.with_constants == other.with_constants
    }
}

/// `F ↦ F′`.
pub fn tower_step(level: &TowerLevel, dynamics: &CharacterDynamics) -> Result<TowerLevel> {
    let a = level.characters.first_axis_step();
    let characters = match dynamics {
        // every rotation character has the trivial character as quotient
        CharacterDynamics::Rotation { .. } if level.with_constants => Lattice2::FIRST_AXIS,
        CharacterDynamics::Skew { .. } if level.with_constants => {
            Lattice2::from_generators([(1, 0), (0, a)])
        }
        // without constants the quotient phase must be exactly 1, which an
        // irrational rotation only allows for the zero character
        _ if a == 0 => Lattice2::TRIVIAL,
        _ => {
            return Err(Error::Unsupported {
                kind: "tower",
                what: "a constant-free level other than {1}".into(),
            })
        }
    };
    Ok(TowerLevel {
        depth: level.depth + 1,
        characters,
        with_constants: true,
    })
}

/// Levels `1′, 1″, …` up to `max_depth` primes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tower {
    pub levels: Vec<TowerLevel>,
    /// Least `n` with level `n` equal to level `n + 1`, if seen.
    pub stabilization_depth: Option<u32>,
}

impl Tower {
    /// Level with `depth` primes.
    pub fn level(&self, depth: u32) -> Option<&TowerLevel> {
        self.levels.get(depth.checked_sub(1)? as usize)
    }

    /// Whether `1″ = 1‴`.
    pub fn second_equals_third(&self) -> Option<bool> {
        Some(self.level(2)?.same_set(self.level(3)?))
    }
}

pub fn compute_tower_for(dynamics: &CharacterDynamics, max_depth: u32) -> Result<Tower> {
    if max_depth < 1 {
        return Err(Error::InvalidArgument("maxDepth must be at least 1".into()));
    }
    let mut levels = Vec::with_capacity(max_depth as usize);
    let mut current = TowerLevel::initial();
    for _ in 0..max_depth {
        current = tower_step(&current, dynamics)?;
        levels.push(current.clone());
    }
    let stabilization_depth = levels
        .windows(2)
        .find(|w| w[0].same_set(&w[1]))
        .map(|w| w[0].depth);
    Ok(Tower {
        levels,
        stabilization_depth,
    })
}

pub fn compute_tower(spec: &SystemSpec, max_depth: u32) -> Result<Tower> {
    compute_tower_for(&CharacterDynamics::from_spec(spec)?, max_depth)
}

/// Quotient of a character claimed to lie in `level`.
pub fn quotient_homomorphism(
    dynamics: &CharacterDynamics,
    level: &TowerLevel,
    chi: (i64, i64),
) -> Result<Quotient> {
    if !level.contains_character(chi) {
        return Err(Error::NotInLevel(chi.0, chi.1, level.depth));
    }
    Ok(dynamics.quotient(chi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn skew() -> CharacterDynamics {
        CharacterDynamics::from_spec(&SystemSpec::skew(RotationNumber::sqrt2_minus_one())).unwrap()
    }

    #[test]
    fn skew_tower_levels() {
        let t = compute_tower_for(&skew(), 4).unwrap();
        let lattices: Vec<_> = t.levels.iter().map(|l| l.characters).collect();
        assert_eq!(
            lattices,
            vec![
                Lattice2::TRIVIAL,
                Lattice2::FIRST_AXIS,
                Lattice2::FULL,
                Lattice2::FULL
            ]
        );
        assert!(t.levels.iter().all(|l| l.with_constants));
        assert_eq!(t.stabilization_depth, Some(3));
        assert_eq!(t.second_equals_third(), Some(false));
    }

    #[test]
    fn rotation_tower_stabilizes_at_the_proper_functions() {
        let rot = SystemSpec::rotation(RotationNumber::sqrt2_minus_one());
        let t = compute_tower(&rot, 3).unwrap();
        assert_eq!(t.levels[1].characters, Lattice2::FIRST_AXIS);
        assert_eq!(t.second_equals_third(), Some(true));
        assert_eq!(t.stabilization_depth, Some(2));
    }

    #[test]
    fn quotient_examples() {
        let d = skew();
        let full = TowerLevel {
            depth: 3,
            characters: Lattice2::FULL,
            with_constants: true,
        };
        let q = quotient_homomorphism(&d, &full, (0, 1)).unwrap();
        assert_eq!(
            q,
            Quotient {
                phase: Phase::ONE,
                character: (1, 0)
            }
        );
        let q = quotient_homomorphism(&d, &full, (0, 0)).unwrap();
        assert!(q.phase.is_one() && q.character == (0, 0));
        let second = TowerLevel {
            depth: 2,
            characters: Lattice2::FIRST_AXIS,
            with_constants: true,
        };
        assert_eq!(
            quotient_homomorphism(&d, &second, (0, 1)),
            Err(Error::NotInLevel(0, 1, 2))
        );
    }

    #[test]
    fn unsupported_systems() {
        let shift = SystemSpec::bernoulli(crate::systems::BernoulliSpec::fair_coin());
        assert!(matches!(
            compute_tower(&shift, 3),
            Err(Error::Unsupported { .. })
        ));
        assert!(compute_tower_for(&skew(), 0).is_err());
    }
}
