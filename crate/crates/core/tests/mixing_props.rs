// SPDX-License-Identifier: Apache-2.0

use ergodic_core::koopman::spectrum_of;
use ergodic_core::mixing::*;
use ergodic_core::{
    BernoulliSpec, CylinderSet, RotationNumber, SeedStreams, SystemPoint, SystemSpec,
};
use proptest::prelude::*;

const SAMPLES: usize = 20_000;

fn gamma() -> RotationNumber {
    RotationNumber::sqrt2_minus_one()
}

fn biased() -> BernoulliSpec {
    BernoulliSpec::new(vec![0.6, 0.4], None).unwrap()
}

fn arc() -> impl Strategy<Value = (f64, f64)> {
    (0.0..0.9f64, 0.05..1.0f64).prop_map(|(a, w)| (a, (a + w).min(1.0)))
}

fn cylinder() -> impl Strategy<Value = CylinderSet> {
    prop::collection::btree_map(-2i64..=2, prop::sample::select(vec![-1i64, 1]), 1..=3)
        .prop_map(|m| CylinderSet::new(m.into_iter().collect()).unwrap())
}

fn set_for(system: &SystemSpec) -> BoxedStrategy<TestSet> {
    match system {
        SystemSpec::Rotation { .. } | SystemSpec::Skew { .. } => {
            arc().prop_map(|(a, b)| TestSet::Interval { a, b }).boxed()
        }
        SystemSpec::Bernoulli { .. } => cylinder()
            .prop_map(|constraints| TestSet::Cylinder { constraints })
            .boxed(),
        SystemSpec::Product { .. } => prop_oneof![
            arc().prop_map(|(a, b)| TestSet::Interval { a, b }),
            cylinder().prop_map(|constraints| TestSet::Cylinder { constraints }),
            (arc(), cylinder()).prop_map(|((a, b), constraints)| TestSet::Product {
                a,
                b,
                constraints
            }),
        ]
        .boxed(),
    }
}

fn check_cross_validation(
    system: &SystemSpec,
    a: &TestSet,
    b: &TestSet,
    i: u64,
    seed: u64,
) -> Result<(), TestCaseError> {
    let streams = SeedStreams::new(seed);
    let exact = correlation(system, a, b, i, CorrelationMode::Exact, &streams).unwrap();
    let mc = correlation(
        system,
        a,
        b,
        i,
        CorrelationMode::MonteCarlo { samples: SAMPLES },
        &streams,
    )
    .unwrap();
    // 4σ, plus a few samples' worth for cells near probability 0 or 1
    let tol = 4.0 * mc.stderr + 3.0 / SAMPLES as f64;
    prop_assert!(
        (exact.value - mc.value).abs() <= tol,
        "{} i={i}: exact {} vs sampled {} ± {}",
        system.kind_name(),
        exact.value,
        mc.value,
        mc.stderr
    );
    let cap = a.measure(system).unwrap().min(b.measure(system).unwrap());
    prop_assert!(exact.value >= 0.0 && exact.value <= cap + 1e-12);
    prop_assert!(mc.value <= cap + 4.0 * mc.stderr + 3.0 / SAMPLES as f64);
    Ok(())
}

macro_rules! cross_validation_case {
    ($name:ident, $system:expr) => {
        proptest! {
            #![proptest_config(ProptestConfig::with_cases(50))]
            #[test]
            fn $name(
                (a, b) in (set_for(&$system), set_for(&$system)),
                i in 0u64..40,
                seed in any::<u64>(),
            ) {
                check_cross_validation(&$system, &a, &b, i, seed)?;
            }
        }
    };
}

cross_validation_case!(
    rotation_exact_matches_sampling,
    SystemSpec::rotation(gamma())
);
cross_validation_case!(skew_exact_matches_sampling, SystemSpec::skew(gamma()));
cross_validation_case!(
    bernoulli_exact_matches_sampling,
    SystemSpec::bernoulli(biased())
);
cross_validation_case!(
    product_exact_matches_sampling,
    SystemSpec::product(gamma(), biased())
);

proptest! {
    /// Symmetric once the moved supports no longer overlap (independence), and
    /// trivially at `i = 0`.
    #[test]
    fn bernoulli_correlations_are_symmetric(a in cylinder(), b in cylinder(), extra in 0u64..6) {
        let system = SystemSpec::bernoulli(biased());
        let i = if extra == 0 { 0 } else { 4 + extra };
        let (a, b) = (TestSet::Cylinder { constraints: a }, TestSet::Cylinder { constraints: b });
        let s = SeedStreams::new(0);
        let ab = correlation(&system, &a, &b, i, CorrelationMode::Exact, &s).unwrap();
        let ba = correlation(&system, &b, &a, i, CorrelationMode::Exact, &s).unwrap();
        prop_assert!((ab.value - ba.value).abs() <= 1e-15);
    }

    #[test]
    fn bernoulli_statistic_does_not_grow(c in cylinder()) {
        let system = SystemSpec::bernoulli(biased());
        let set = TestSet::Cylinder { constraints: c };
        let s = SeedStreams::new(0);
        let mut last = f64::INFINITY;
        for t in [11, 20, 50, 100, 500, 1000] {
            let w = weak_mixing_statistic(&system, &set, &set, t, CorrelationMode::Exact, &s).unwrap();
            prop_assert!(w.value <= last + 1e-15, "t={t}: {} > {last}", w.value);
            last = w.value;
        }
    }
}

#[test]
fn overlapping_supports_break_symmetry() {
    let system = SystemSpec::bernoulli(BernoulliSpec::fair_coin());
    let a = TestSet::Cylinder {
        constraints: CylinderSet::new(vec![(0, 1), (1, 1)]).unwrap(),
    };
    let b = TestSet::Cylinder {
        constraints: CylinderSet::new(vec![(0, 1), (1, -1)]).unwrap(),
    };
    let s = SeedStreams::new(0);
    let ab = correlation(&system, &a, &b, 1, CorrelationMode::Exact, &s).unwrap();
    let ba = correlation(&system, &b, &a, 1, CorrelationMode::Exact, &s).unwrap();
    // w₋₁ = w₀ = 1 and w₀ = 1, w₁ = −1 versus w₋₁ = 1, w₀ = −1 and w₀ = 1
    assert_eq!((ab.value, ba.value), (0.125, 0.0));
}

#[test]
fn statistics_match_spectral_verdicts() {
    let s = SeedStreams::new(0);
    let t = 10_000;
    let coin = TestSet::Cylinder {
        constraints: CylinderSet::single(0, 1),
    };
    let half = TestSet::Interval { a: 0.0, b: 0.5 };
    let bern = SystemSpec::bernoulli(BernoulliSpec::fair_coin());
    let wb = weak_mixing_statistic(&bern, &coin, &coin, t, CorrelationMode::Exact, &s).unwrap();
    assert!(wb.value < 0.01);
    let skew = SystemSpec::skew(gamma());
    let ws = weak_mixing_statistic(&skew, &half, &half, t, CorrelationMode::Exact, &s).unwrap();
    assert!(ws.value > 0.05);
    assert_eq!(
        MixingVerdict::from_statistic(&wb)
            .agrees_with(spectral_weak_mixing_check(&spectrum_of(&bern))),
        Some(true)
    );
    assert_eq!(
        MixingVerdict::from_statistic(&ws)
            .agrees_with(spectral_weak_mixing_check(&spectrum_of(&skew))),
        Some(true)
    );
}

#[test]
fn birkhoff_averages_equidistribute() {
    let rot = SystemSpec::rotation(gamma());
    let f = Observable::Indicator {
        set: TestSet::Interval { a: 0.0, b: 0.5 },
    };
    for x0 in [0.0, 0.3, 0.77] {
        let x = SystemPoint::Circle(ergodic_core::Angle::from_f64(x0));
        let avg = birkhoff_average(&rot, &f, &x, 1_000_000).unwrap();
        assert!((avg - 0.5).abs() <= 0.01, "x0={x0}: {avg}");
    }
    let signs = BernoulliSpec::new(vec![0.5, 0.5], Some(vec![-1, 1])).unwrap();
    let bern = SystemSpec::bernoulli(signs);
    let n = 100_000u64;
    let mut rng = SeedStreams::new(4).stream("birkhoff", 0);
    let x = bern.sample_point(&mut rng, n as usize);
    let avg = birkhoff_average(&bern, &Observable::Symbol { position: 0 }, &x, n).unwrap();
    assert!(avg.abs() <= 3.0 / (n as f64).sqrt(), "{avg}");
}

#[test]
fn spectral_checks_on_hand_built_descriptors() {
    use ergodic_core::koopman::{Multiplicity, PointPart, SpectrumDescriptor};
    let double_one = SpectrumDescriptor::new(
        PointPart {
            generators: Vec::new(),
            simple: false,
            unit_multiplicity: Multiplicity::Finite(2),
        },
        Multiplicity::CountablyInfinite,
    );
    assert!(!spectral_ergodicity_check(&double_one));
    let rot = PointPart::from_generators(vec![gamma()]);
    let two_rotations = SpectrumDescriptor::new(rot.merge(&rot), Multiplicity::Finite(0));
    assert!(!spectral_ergodicity_check(&two_rotations));
}
