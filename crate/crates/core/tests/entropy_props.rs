// SPDX-License-Identifier: Apache-2.0

use ergodic_core::entropy::*;
use ergodic_core::{BernoulliSpec, RotationNumber, SeedStreams, SystemSpec};
use proptest::prelude::*;

fn probabilities() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01..1.0f64, 2..8).prop_map(|w| {
        let total: f64 = w.iter().sum();
        w.into_iter().map(|x| x / total).collect()
    })
}

fn spec(p: Vec<f64>) -> BernoulliSpec {
    BernoulliSpec::new(p, None).unwrap()
}

proptest! {
    #[test]
    fn entropy_lies_between_zero_and_log_alphabet(p in probabilities()) {
        let n = p.len() as f64;
        let h = bernoulli_entropy(&spec(p));
        prop_assert!(h >= 0.0);
        prop_assert!(h <= n.ln() + 1e-12);
    }

    #[test]
    fn only_uniform_attains_the_maximum(n in 2usize..10, bump in 0.01..0.2f64) {
        let uniform = BernoulliSpec::uniform(n).unwrap();
        prop_assert!((bernoulli_entropy(&uniform) - (n as f64).ln()).abs() < 1e-12);
        let mut p = vec![1.0 / n as f64; n];
        let d = bump / n as f64;
        p[0] += d;
        p[1] -= d;
        prop_assert!(bernoulli_entropy(&spec(p)) < (n as f64).ln() - 1e-6);
    }

    #[test]
    fn entropy_ignores_symbol_order(p in probabilities(), seed in any::<u64>()) {
        let mut q = p.clone();
        let mut rng = SeedStreams::new(seed).stream("perm", 0);
        use rand::seq::SliceRandom;
        q.shuffle(&mut rng);
        let (a, b) = (bernoulli_entropy(&spec(p)), bernoulli_entropy(&spec(q)));
        prop_assert!((a - b).abs() <= 4.0 * f64::EPSILON * a.max(1.0));
    }

    #[test]
    fn block_entropy_matches_symbol_entropy(p in prop::collection::vec(0.01..1.0f64, 2..5), n in 1u32..=12) {
        let total: f64 = p.iter().sum();
        let s = spec(p.into_iter().map(|x| x / total).collect());
        let h = bernoulli_entropy(&s);
        let block = analytic_block_entropy(&s, n).unwrap();
        prop_assert!(block.exact);
        prop_assert!((block.value - h).abs() <= 4.0 * f64::EPSILON * h.max(1.0), "{} vs {h}", block.value);
    }

    /// Relabeling the alphabet of a stream leaves every block count, hence
    /// every estimate, unchanged.
    #[test]
    fn recoding_a_stream_changes_nothing(seed in any::<u64>(), n in 1u32..=4) {
        let s = BernoulliSpec::uniform(3).unwrap();
        let mut rng = SeedStreams::new(seed).stream("stream", 0);
        let stream: Vec<u8> = (0..20_000).map(|_| s.sample_index(&mut rng)).collect();
        let recoded: Vec<char> = stream.iter().map(|&x| ['z', 'a', 'q'][x as usize]).collect();
        prop_assert_eq!(block_entropy_rate(&stream, n).unwrap(), block_entropy_rate(&recoded, n).unwrap());
    }
}

#[test]
fn binary_block_entropy_at_long_blocks() {
    let s = spec(vec![0.9, 0.1]);
    let h = bernoulli_entropy(&s);
    for n in [20, 40, 60] {
        let v = analytic_block_entropy(&s, n).unwrap().value;
        assert!((v - h).abs() <= 4.0 * f64::EPSILON, "n={n}: {v} vs {h}");
    }
}

#[test]
fn sampled_estimates_settle_on_the_exact_value() {
    let cases = [
        (spec(vec![0.9, 0.1]), 8),
        (spec(vec![0.5, 0.25, 0.125, 0.125]), 6),
        (BernoulliSpec::fair_coin(), 10),
    ];
    for (s, n) in cases {
        let exact = bernoulli_entropy(&s);
        let system = SystemSpec::bernoulli(s.clone());
        let alpha = PartitionSpec::time_zero(&s);
        for samples in [1_000, 10_000, 100_000] {
            let est = partition_refine_entropy(&system, &alpha, n, samples, &SeedStreams::new(3))
                .unwrap();
            assert!(
                (est.value - exact).abs() <= 3.0 * est.stderr + 1e-12,
                "{:?} n={n} samples={samples}: {} ± {} vs {exact}",
                s.probs(),
                est.value,
                est.stderr
            );
        }
    }
}

#[test]
fn biased_coin_within_two_percent() {
    let s = spec(vec![0.9, 0.1]);
    let exact = -(0.9f64 * 0.9f64.ln() + 0.1 * 0.1f64.ln());
    let est = partition_refine_entropy(
        &SystemSpec::bernoulli(s.clone()),
        &PartitionSpec::time_zero(&s),
        8,
        200_000,
        &SeedStreams::new(11),
    )
    .unwrap();
    assert!((est.value - exact).abs() <= 0.02 * exact);
}

#[test]
fn sampled_trajectories_agree_with_the_itinerary_estimate() {
    let s = spec(vec![0.7, 0.3]);
    let system = SystemSpec::bernoulli(s.clone());
    let alpha = PartitionSpec::time_zero(&s);
    let streams = SeedStreams::new(5);
    let n = 6;
    let refined = partition_refine_entropy(&system, &alpha, n, 200_000, &streams).unwrap();
    let trajectory = coded_trajectory(&system, &alpha, 400_000, &streams).unwrap();
    let plug_in = block_entropy_rate(&trajectory, n).unwrap();
    let tol = 3.0 * (refined.stderr.powi(2) + plug_in.stderr.powi(2)).sqrt();
    assert!(
        (refined.value - plug_in.value).abs() <= tol,
        "{refined:?} vs {plug_in:?}"
    );
}

/// `H_n` of the halves partition refined by `n` rotation steps: the cells are
/// the arcs cut by the points `−jγ` and `1/2 − jγ`, `j < n`.
fn rotation_block_entropy(gamma: f64, n: u32) -> f64 {
    let mut cuts: Vec<f64> = (0..n)
        .flat_map(|j| {
            let t = -(j as f64) * gamma;
            [t.rem_euclid(1.0), (t + 0.5).rem_euclid(1.0)]
        })
        .collect();
    cuts.sort_by(f64::total_cmp);
    let mut h = 0.0;
    for (i, &c) in cuts.iter().enumerate() {
        let next = cuts.get(i + 1).copied().unwrap_or(cuts[0] + 1.0);
        let len = next - c;
        if len > 0.0 {
            h -= len * len.ln();
        }
    }
    h / n as f64
}

#[test]
fn rotation_entropy_decays() {
    let gamma = RotationNumber::sqrt2_minus_one();
    let system = SystemSpec::rotation(gamma.clone());
    let mut last = f64::INFINITY;
    for n in [1, 2, 4, 8, 16, 32] {
        let oracle = rotation_block_entropy(gamma.value_f64(), n);
        assert!(oracle < last && oracle <= (2.0 * n as f64).ln() / n as f64 + 1e-12);
        last = oracle;
        let est = partition_refine_entropy(
            &system,
            &PartitionSpec::halves(),
            n,
            50_000,
            &SeedStreams::new(n as u64),
        )
        .unwrap();
        assert!(
            (est.value - oracle).abs() <= 3.0 * est.stderr + 1e-9,
            "n={n}: {} ± {} vs {oracle}",
            est.value,
            est.stderr
        );
    }
}

#[test]
fn classifier_separates_every_biased_coin() {
    let fair = BernoulliSpec::fair_coin();
    for i in 1..50 {
        let p = i as f64 / 100.0;
        let c = entropy_classifier(&fair, &spec(vec![p, 1.0 - p]), 1e-9).unwrap();
        assert_eq!(c.spacial, SpacialVerdict::NotSpaciallyIsomorphic, "p = {p}");
        assert!(c.spectrally_isomorphic);
    }
    let c = entropy_classifier(&fair, &spec(vec![0.5, 0.5]), 1e-9).unwrap();
    assert_eq!(c.spacial, SpacialVerdict::SpaciallyIsomorphic);
    assert!(entropy_classifier(&fair, &fair, 0.0).is_err());
}
