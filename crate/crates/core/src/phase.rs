// SPDX-License-Identifier: Apache-2.0

//! Symbolic unimodular constants `e^{2πi(t + cγ)}`.

use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::number::{QuadraticElement, RotationNumber};

/// `e^{2πi(turn + gamma·γ)}` with rational `turn ∈ [0, 1)` and rational
/// `gamma`, relative to the rotation number of the system it belongs to.
///
/// Because `γ` is irrational, two phases are equal as complex numbers exactly
/// when both coordinates agree, so equality here is structural.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "PhaseDoc", from = "PhaseDoc")]
pub struct Phase {
    turn: Ratio<i64>,
    gamma: Ratio<i64>,
}

#[derive(Serialize, Deserialize)]
struct PhaseDoc {
    turn: [i64; 2],
    gamma: [i64; 2],
}

impl From<Phase> for PhaseDoc {
    fn from(p: Phase) -> Self {
        PhaseDoc {
            turn: [*p.turn.numer(), *p.turn.denom()],
            gamma: [*p.gamma.numer(), *p.gamma.denom()],
        }
    }
}

impl From<PhaseDoc> for Phase {
    fn from(d: PhaseDoc) -> Self {
        Phase::new(
            Ratio::new(d.turn[0], d.turn[1]),
            Ratio::new(d.gamma[0], d.gamma[1]),
        )
    }
}

fn reduce_turn(t: Ratio<i64>) -> Ratio<i64> {
    t - t.floor()
}

impl Phase {
    pub const ONE: Phase = Phase {
        turn: Ratio::new_raw(0, 1),
        gamma: Ratio::new_raw(0, 1),
    };

    pub fn new(turn: Ratio<i64>, gamma: Ratio<i64>) -> Self {
        Phase {
            turn: reduce_turn(turn),
            gamma,
        }
    }

    /// `e^{2πicγ}`.
    pub fn gamma_multiple(c: i64) -> Self {
        Phase::new(Ratio::zero(), Ratio::from_integer(c))
    }

    /// `e^{2πi(num/den)γ}`.
    pub fn gamma_fraction(num: i64, den: i64) -> Self {
        Phase::new(Ratio::zero(), Ratio::new(num, den))
    }

    /// `e^{2πi·num/den}`.
    pub fn rational_turn(num: i64, den: i64) -> Self {
        Phase::new(Ratio::new(num, den), Ratio::zero())
    }

    pub fn turn(&self) -> Ratio<i64> {
        self.turn
    }

    pub fn gamma_coefficient(&self) -> Ratio<i64> {
        self.gamma
    }

    pub fn is_one(&self) -> bool {
        self.turn.is_zero() && self.gamma.is_zero()
    }

    pub fn conj(&self) -> Self {
        Phase::new(-self.turn, -self.gamma)
    }

    /// The exponent `turn + gamma·γ` reduced mod 1, as an exact field element.
    pub fn angle(&self, gamma: &RotationNumber) -> QuadraticElement {
        let turn = BigRational::new((*self.turn.numer()).into(), (*self.turn.denom()).into());
        let coeff = BigRational::new((*self.gamma.numer()).into(), (*self.gamma.denom()).into());
        gamma
            .element()
            .mul_rational(&coeff)
            .checked_add(&QuadraticElement::rational(turn))
            .expect("rational shift stays in the field")
            .fract()
    }

    /// Angle when the phase carries no `γ` component.
    pub fn rational_angle(&self) -> Option<QuadraticElement> {
        self.gamma.is_zero().then(|| {
            QuadraticElement::rational(BigRational::new(
                (*self.turn.numer()).into(),
                (*self.turn.denom()).into(),
            ))
        })
    }

    pub fn to_complex(&self, gamma: f64) -> Complex64 {
        let t = (*self.turn.numer() as f64 / *self.turn.denom() as f64)
            + gamma * (*self.gamma.numer() as f64 / *self.gamma.denom() as f64);
        Complex64::from_polar(1.0, std::f64::consts::TAU * t)
    }
}

impl Default for Phase {
    fn default() -> Self {
        Phase::ONE
    }
}

impl Mul for Phase {
    type Output = Phase;

    fn mul(self, rhs: Phase) -> Phase {
        Phase::new(self.turn + rhs.turn, self.gamma + rhs.gamma)
    }
}

impl fmt::Debug for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.turn.is_zero(), self.gamma.is_zero()) {
            (true, true) => write!(f, "1"),
            (false, true) => write!(f, "e^(2πi·{})", self.turn),
            (true, false) if self.gamma.is_one() => write!(f, "e^(2πiγ)"),
            (true, false) => write!(f, "e^(2πi·{}γ)", self.gamma),
            (false, false) => write!(f, "e^(2πi·({} + {}γ))", self.turn, self.gamma),
        }
    }
}
