// SPDX-License-Identifier: Apache-2.0

use ergodic_core::mixing::TestSet;
use ergodic_core::rng::MeanAcc;
use ergodic_core::systems::cylinder_measure;
use ergodic_core::{BernoulliSpec, CylinderSet, RotationNumber, SeedStreams, SystemSpec};
use proptest::prelude::*;

const HALF_WIDTH: usize = 6;

fn systems() -> Vec<SystemSpec> {
    let gamma = RotationNumber::sqrt2_minus_one();
    let biased = BernoulliSpec::new(vec![0.5, 0.3, 0.2], None).unwrap();
    vec![
        SystemSpec::rotation(gamma.clone()),
        SystemSpec::skew(gamma.clone()),
        SystemSpec::bernoulli(biased.clone()),
        SystemSpec::product(gamma, biased),
    ]
}

fn arc() -> impl Strategy<Value = (f64, f64)> {
    (0.0..0.9f64, 0.05..1.0f64).prop_map(|(a, w)| (a, (a + w).min(1.0)))
}

fn cylinder() -> impl Strategy<Value = CylinderSet> {
    prop::collection::btree_map(-3i64..=3, 0i64..3, 1..=3)
        .prop_map(|m| CylinderSet::new(m.into_iter().collect()).unwrap())
}

fn test_set(system: &SystemSpec) -> BoxedStrategy<TestSet> {
    match system {
        SystemSpec::Rotation { .. } => arc().prop_map(|(a, b)| TestSet::Interval { a, b }).boxed(),
        SystemSpec::Skew { .. } => (arc(), arc())
            .prop_map(|(u, v)| TestSet::Rectangle {
                u: [u.0, u.1],
                v: [v.0, v.1],
            })
            .boxed(),
        SystemSpec::Bernoulli { .. } => cylinder()
            .prop_map(|constraints| TestSet::Cylinder { constraints })
            .boxed(),
        SystemSpec::Product { .. } => (arc(), cylinder())
            .prop_map(|((a, b), constraints)| TestSet::Product { a, b, constraints })
            .boxed(),
    }
}

/// Estimates `μ(S⁻¹A)` as the fraction of sampled `x` with `Sx ∈ A`.
fn preimage_measure(system: &SystemSpec, set: &TestSet, samples: usize, seed: u64) -> MeanAcc {
    let parts = SeedStreams::new(seed).chunked("preimage", samples, |rng, count| {
        let mut acc = MeanAcc::default();
        for _ in 0..count {
            let x = system.sample_point(rng, HALF_WIDTH);
            let y = system.step(&x).unwrap();
            acc.push(f64::from(u8::from(set.contains(system, &y).unwrap())));
        }
        acc
    });
    MeanAcc::merged(&parts)
}

fn check_preservation(system: &SystemSpec, set: &TestSet, seed: u64) -> Result<(), TestCaseError> {
    let exact = set.measure(system).unwrap();
    let est = preimage_measure(system, set, 100_000, seed);
    // a set of measure 0 or 1 gives stderr 0; allow one sample of slack
    let tol = 4.0 * est.stderr() + 1e-5;
    prop_assert!(
        (est.mean() - exact).abs() <= tol,
        "{}: μ(S⁻¹A) ≈ {} vs μ(A) = {} (tol {tol})",
        system.kind_name(),
        est.mean(),
        exact
    );
    Ok(())
}

macro_rules! preservation_case {
    ($name:ident, $idx:expr) => {
        proptest! {
            #![proptest_config(ProptestConfig::with_cases(20))]
            #[test]
            fn $name(set in test_set(&systems()[$idx]), seed in any::<u64>()) {
                check_preservation(&systems()[$idx], &set, seed)?;
            }
        }
    };
}

preservation_case!(rotation_preserves_measure, 0);
preservation_case!(skew_preserves_measure, 1);
preservation_case!(bernoulli_preserves_measure, 2);
preservation_case!(product_preserves_measure, 3);

#[test]
fn forward_and_inverse_are_exact_inverses() {
    let streams = SeedStreams::new(7);
    for system in systems() {
        let mut rng = streams.stream(system.kind_name(), 0);
        for _ in 0..10_000 {
            let x = system.sample_point(&mut rng, 4);
            let there = system.step(&x).unwrap();
            assert_eq!(system.step_back(&there).unwrap(), x);
            let back = system.step_back(&x).unwrap();
            assert_eq!(system.step(&back).unwrap(), x);
        }
    }
}

#[test]
fn sampling_is_reproducible() {
    for system in systems() {
        let draw = || {
            let mut rng = SeedStreams::new(99).stream("points", 3);
            (0..100)
                .map(|_| system.sample_point(&mut rng, 5))
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(), draw());
    }
}

proptest! {
    #[test]
    fn cylinder_measure_is_stationary(c in cylinder(), offset in -1000i64..1000) {
        let spec = BernoulliSpec::new(vec![0.5, 0.3, 0.2], None).unwrap();
        let moved = c.shifted(offset);
        prop_assert_eq!(cylinder_measure(&spec, &c).unwrap(), cylinder_measure(&spec, &moved).unwrap());
    }

    #[test]
    fn power_matches_iteration(n in -40i64..40, seed in any::<u64>()) {
        for system in systems() {
            let mut rng = SeedStreams::new(seed).stream("power", 0);
            let x = system.sample_point(&mut rng, 45);
            let mut y = x.clone();
            for _ in 0..n.unsigned_abs() {
                y = if n > 0 { system.step(&y).unwrap() } else { system.step_back(&y).unwrap() };
            }
            prop_assert_eq!(system.power(&x, n).unwrap(), y);
        }
    }
}
