// SPDX-License-Identifier: Apache-2.0

//! Fixtures shared by the benchmarks.

use ergodic_core::{BernoulliSpec, RotationNumber, SystemSpec};

pub fn skew() -> SystemSpec {
    SystemSpec::skew(RotationNumber::sqrt2_minus_one())
}

pub fn product() -> SystemSpec {
    SystemSpec::product(
        RotationNumber::sqrt2_minus_one(),
        BernoulliSpec::fair_coin(),
    )
}

pub fn biased_coin() -> SystemSpec {
    SystemSpec::bernoulli(BernoulliSpec::new(vec![0.9, 0.1], None).expect("valid probabilities"))
}
