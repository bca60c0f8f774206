// SPDX-License-Identifier: Apache-2.0

use ergodic_core::tower::*;
use ergodic_core::{BernoulliSpec, Phase, RotationNumber, SystemSpec};
use proptest::prelude::*;

const WINDOW: i64 = 16;

fn gamma() -> RotationNumber {
    RotationNumber::sqrt2_minus_one()
}

fn dynamics() -> impl Strategy<Value = CharacterDynamics> {
    let rotation = Just(CharacterDynamics::Rotation { gamma: gamma() });
    let skew = (-12i64..12, 1i64..13, -6i64..6, 1i64..7).prop_map(|(tn, td, gn, gd)| {
        CharacterDynamics::Skew {
            gamma: gamma(),
            drift: Phase::rational_turn(tn, td) * Phase::gamma_fraction(gn, gd),
        }
    });
    prop_oneof![rotation, skew]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn levels_are_nested(d in dynamics()) {
        let tower = compute_tower_for(&d, 5).unwrap();
        for pair in tower.levels.windows(2) {
            prop_assert!(pair[0].is_subset_of(&pair[1]));
            for k in -WINDOW..=WINDOW {
                for m in -WINDOW..=WINDOW {
                    if pair[0].contains_character((k, m)) {
                        prop_assert!(pair[1].contains_character((k, m)), "({k},{m})");
                    }
                }
            }
        }
    }

    /// Moving the circle coordinate, `(u, v) ↦ (u + c, v)`, turns the skew map
    /// into `(u, v) ↦ (u + γ, v + u − c)`; the tower must not notice.
    #[test]
    fn towers_survive_a_coordinate_change(num in -20i64..20, den in 1i64..21) {
        let plain = compute_tower_for(
            &CharacterDynamics::Skew { gamma: gamma(), drift: Phase::ONE },
            4,
        ).unwrap();
        let moved = compute_tower_for(
            &CharacterDynamics::Skew { gamma: gamma(), drift: Phase::rational_turn(-num, den) },
            4,
        ).unwrap();
        for (a, b) in plain.levels.iter().zip(&moved.levels) {
            prop_assert!(a.same_set(b));
        }
        prop_assert_eq!(plain.stabilization_depth, moved.stabilization_depth);
    }
}

#[test]
fn quotient_map_is_a_homomorphism() {
    let samples = [
        CharacterDynamics::Rotation { gamma: gamma() },
        CharacterDynamics::Skew {
            gamma: gamma(),
            drift: Phase::ONE,
        },
        CharacterDynamics::Skew {
            gamma: gamma(),
            drift: Phase::rational_turn(3, 7) * Phase::gamma_fraction(-1, 2),
        },
    ];
    for d in samples {
        let top = compute_tower_for(&d, 3).unwrap().levels[2].clone();
        for k1 in -WINDOW..=WINDOW {
            for m1 in -WINDOW..=WINDOW {
                let q1 = quotient_homomorphism(&d, &top, (k1, m1));
                for k2 in -WINDOW..=WINDOW {
                    for m2 in -WINDOW..=WINDOW {
                        let (Ok(q1), Ok(q2)) = (&q1, quotient_homomorphism(&d, &top, (k2, m2)))
                        else {
                            continue;
                        };
                        let q12 = quotient_homomorphism(&d, &top, (k1 + k2, m1 + m2)).unwrap();
                        assert_eq!(q12, q1.times(&q2), "{d:?}: ({k1},{m1}) + ({k2},{m2})");
                    }
                }
            }
        }
    }
}

#[test]
fn residual_floor_does_not_drop_as_the_window_grows() {
    let product = SystemSpec::product(gamma(), BernoulliSpec::fair_coin());
    for k in [1, -1, 2, -2] {
        let mut last = 0.0;
        for n in [4, 8, 16] {
            let r = quasi_eigen_residual_search(&product, k, n, DEFAULT_BAND, None)
                .unwrap()
                .residual;
            assert!(r >= last - 1e-9, "k={k} N={n}: {r} < {last}");
            last = r;
        }
    }
}

#[test]
fn unsupported_systems_are_refused() {
    let bern = SystemSpec::bernoulli(BernoulliSpec::fair_coin());
    assert!(compute_tower(&bern, 3).is_err());
    assert!(quasi_eigen_residual_search(&bern, 1, 4, DEFAULT_BAND, None).is_err());
    let rot = SystemSpec::rotation(gamma());
    assert!(quasi_eigen_residual_search(&rot, 1, 4, DEFAULT_BAND, None).is_err());
}
