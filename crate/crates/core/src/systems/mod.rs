// SPDX-License-Identifier: Apache-2.0

//! The four measure-preserving systems: the circle rotation, the skew map
//! `S(u,v) = (u+γ, v+u)` on the torus, the Bernoulli shift `R`, and the
//! product `T(u,w) = (u+γ, R(w))`.

pub mod bernoulli;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

pub use bernoulli::{cylinder_measure, BernoulliSpec, CylinderSet, SymbolWindow};

use crate::error::{Error, Result};
use crate::number::{Angle, RotationNumber};

/// Which system, with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SystemSpec {
    Rotation {
        gamma: RotationNumber,
    },
    Skew {
        gamma: RotationNumber,
    },
    Bernoulli {
        #[serde(flatten)]
        shift: BernoulliSpec,
    },
    Product {
        gamma: RotationNumber,
        #[serde(flatten)]
        shift: BernoulliSpec,
    },
}

impl SystemSpec {
    pub fn rotation(gamma: RotationNumber) -> Self {
        SystemSpec::Rotation { gamma }
    }

    pub fn skew(gamma: RotationNumber) -> Self {
        SystemSpec::Skew { gamma }
    }

    pub fn bernoulli(shift: BernoulliSpec) -> Self {
        SystemSpec::Bernoulli { shift }
    }

    pub fn product(gamma: RotationNumber, shift: BernoulliSpec) -> Self {
        SystemSpec::Product { gamma, shift }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            SystemSpec::Rotation { .. } => "rotation",
            SystemSpec::Skew { .. } => "skew",
            SystemSpec::Bernoulli { .. } => "bernoulli",
            SystemSpec::Product { .. } => "product",
        }
    }

    pub fn gamma(&self) -> Option<&RotationNumber> {
        match self {
            SystemSpec::Rotation { gamma }
            | SystemSpec::Skew { gamma }
            | SystemSpec::Product { gamma, .. } => Some(gamma),
            SystemSpec::Bernoulli { .. } => None,
        }
    }

    pub fn shift(&self) -> Option<&BernoulliSpec> {
        match self {
            SystemSpec::Bernoulli { shift } | SystemSpec::Product { shift, .. } => Some(shift),
            _ => None,
        }
    }

    /// Advances `point` by `S^n` for any integer `n`.
    ///
    /// Rotation and skew use closed forms; on the fixed-point grid these agree
    /// bit-for-bit with iterating the one-step map.
    pub fn power(&self, point: &SystemPoint, n: i64) -> Result<SystemPoint> {
        match (self, point) {
            (SystemSpec::Rotation { gamma }, SystemPoint::Circle(u)) => {
                Ok(SystemPoint::Circle(*u + gamma.angle().times(n)))
            }
            (SystemSpec::Skew { gamma }, SystemPoint::Torus(p)) => {
                Ok(SystemPoint::Torus(skew_power(*p, gamma.angle(), n)))
            }
            (SystemSpec::Bernoulli { .. }, SystemPoint::Sequence(w)) => {
                Ok(SystemPoint::Sequence(w.shift_by(n)))
            }
            (SystemSpec::Product { gamma, .. }, SystemPoint::Product(u, w)) => Ok(
                SystemPoint::Product(*u + gamma.angle().times(n), w.shift_by(n)),
            ),
            _ => Err(self.mismatch(point)),
        }
    }

    pub fn step(&self, point: &SystemPoint) -> Result<SystemPoint> {
        self.power(point, 1)
    }

    pub fn step_back(&self, point: &SystemPoint) -> Result<SystemPoint> {
        self.power(point, -1)
    }

    fn mismatch(&self, point: &SystemPoint) -> Error {
        Error::InvalidArgument(format!(
            "{} point given to a {} system",
            point.kind_name(),
            self.kind_name()
        ))
    }

    /// Draws a point from the invariant measure. Sequence coordinates
    /// `-half_width..=half_width` are sampled i.i.d.
    pub fn sample_point<R: RngCore + ?Sized>(&self, rng: &mut R, half_width: usize) -> SystemPoint {
        match self {
            SystemSpec::Rotation { .. } => SystemPoint::Circle(Angle(rng.next_u64())),
            SystemSpec::Skew { .. } => SystemPoint::Torus(TorusPoint {
                u: Angle(rng.next_u64()),
                v: Angle(rng.next_u64()),
            }),
            SystemSpec::Bernoulli { shift } => {
                SystemPoint::Sequence(sample_window(shift, rng, half_width))
            }
            SystemSpec::Product { shift, .. } => {
                let u = Angle(rng.next_u64());
                SystemPoint::Product(u, sample_window(shift, rng, half_width))
            }
        }
    }
}

fn sample_window<R: RngCore + ?Sized>(
    spec: &BernoulliSpec,
    rng: &mut R,
    half_width: usize,
) -> SymbolWindow {
    let len = 2 * half_width + 1;
    let symbols = (0..len).map(|_| spec.sample_index(rng)).collect();
    SymbolWindow::new(-(half_width as i64), symbols).expect("nonempty window")
}

/// Samples only the listed coordinates of a Bernoulli sequence (positions
/// sorted and deduplicated by the caller). Distributionally identical to
/// restricting a full window.
pub fn sample_coordinates<R: Rng + ?Sized>(
    spec: &BernoulliSpec,
    rng: &mut R,
    positions: &[i64],
) -> Vec<(i64, u8)> {
    positions
        .iter()
        .map(|&p| (p, spec.sample_index(rng)))
        .collect()
}

/// A point of `[0,1)²`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TorusPoint {
    pub u: Angle,
    pub v: Angle,
}

impl TorusPoint {
    pub fn from_f64(u: f64, v: f64) -> Self {
        Self {
            u: Angle::from_f64(u),
            v: Angle::from_f64(v),
        }
    }

    pub fn to_f64(self) -> (f64, f64) {
        (self.u.to_f64(), self.v.to_f64())
    }
}

/// A point of one of the four phase spaces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SystemPoint {
    Circle(Angle),
    Torus(TorusPoint),
    Sequence(SymbolWindow),
    Product(Angle, SymbolWindow),
}

impl SystemPoint {
    pub fn kind_name(&self) -> &'static str {
        match self {
            SystemPoint::Circle(_) => "circle",
            SystemPoint::Torus(_) => "torus",
            SystemPoint::Sequence(_) => "sequence",
            SystemPoint::Product(..) => "product",
        }
    }

    /// The first (circle) coordinate, when the space has one.
    pub fn u(&self) -> Option<Angle> {
        match self {
            SystemPoint::Circle(u) | SystemPoint::Product(u, _) => Some(*u),
            SystemPoint::Torus(p) => Some(p.u),
            SystemPoint::Sequence(_) => None,
        }
    }

    pub fn window(&self) -> Option<&SymbolWindow> {
        match self {
            SystemPoint::Sequence(w) | SystemPoint::Product(_, w) => Some(w),
            _ => None,
        }
    }

    /// `S` applied in place, avoiding window copies on long trajectories.
    pub fn advance(&mut self, spec: &SystemSpec) -> Result<()> {
        match (spec, &mut *self) {
            (SystemSpec::Rotation { gamma }, SystemPoint::Circle(u)) => {
                *u = rotation_step(*u, gamma.angle())
            }
            (SystemSpec::Skew { gamma }, SystemPoint::Torus(p)) => {
                *p = skew_step(*p, gamma.angle())
            }
            (SystemSpec::Bernoulli { .. }, SystemPoint::Sequence(w)) => w.shift_in_place(1),
            (SystemSpec::Product { gamma, .. }, SystemPoint::Product(u, w)) => {
                *u = rotation_step(*u, gamma.angle());
                w.shift_in_place(1);
            }
            _ => return Err(spec.mismatch(self)),
        }
        Ok(())
    }
}

/// `u ↦ u + γ mod 1`.
pub fn rotation_step(u: Angle, gamma: Angle) -> Angle {
    u + gamma
}

pub fn rotation_step_back(u: Angle, gamma: Angle) -> Angle {
    u - gamma
}

/// `S(u,v) = (u + γ, v + u) mod 1`.
pub fn skew_step(p: TorusPoint, gamma: Angle) -> TorusPoint {
    TorusPoint {
        u: p.u + gamma,
        v: p.v + p.u,
    }
}

/// `S⁻¹(u,v) = (u − γ, v − (u − γ))`.
pub fn skew_step_back(p: TorusPoint, gamma: Angle) -> TorusPoint {
    let u = p.u - gamma;
    TorusPoint { u, v: p.v - u }
}

/// `Sⁿ(u,v) = (u + nγ, v + n·u + n(n−1)/2·γ)`.
pub fn skew_power(p: TorusPoint, gamma: Angle, n: i64) -> TorusPoint {
    let n128 = n as i128;
    let tri = (n128 * (n128 - 1) / 2) as i64;
    TorusPoint {
        u: p.u + gamma.times(n),
        v: p.v + p.u.times(n) + gamma.times(tri),
    }
}

/// `R(…w₋₁, w₀, w₁…) = (…w₀, w₁, w₂…)`.
pub fn shift_step(w: &SymbolWindow) -> SymbolWindow {
    w.shift()
}

pub fn shift_step_back(w: &SymbolWindow) -> SymbolWindow {
    w.shift_by(-1)
}

/// `T(u, w) = (u + γ, R(w))`.
pub fn product_step(u: Angle, w: &SymbolWindow, gamma: Angle) -> (Angle, SymbolWindow) {
    (rotation_step(u, gamma), shift_step(w))
}

pub fn product_step_back(u: Angle, w: &SymbolWindow, gamma: Angle) -> (Angle, SymbolWindow) {
    (rotation_step_back(u, gamma), shift_step_back(w))
}

/// Largest circle distance between `c(S u)` and `T(c u)` over `samples`
/// sampled `u`, where `S`, `T` rotate by `gamma_s`, `gamma_t` and
/// `c(u) = sign·u`. Only `sign = ±1` gives a bijection of the circle.
pub fn rotation_conjugacy_residual(
    gamma_s: &RotationNumber,
    gamma_t: &RotationNumber,
    sign: i64,
    samples: usize,
    streams: &crate::rng::SeedStreams,
) -> Result<f64> {
    if sign.abs() != 1 {
        return Err(Error::InvalidArgument(format!(
            "u ↦ {sign}·u is not a bijection of the circle"
        )));
    }
    let (gs, gt) = (gamma_s.angle(), gamma_t.angle());
    let c = |u: Angle| u.times(sign);
    let mut rng = streams.stream("conjugacy", 0);
    Ok((0..samples)
        .map(|_| {
            let u = Angle(rng.next_u64());
            c(rotation_step(u, gs)).circular_distance(rotation_step(c(u), gt))
        })
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedStreams;

    fn gamma() -> RotationNumber {
        RotationNumber::sqrt2_minus_one()
    }

    #[test]
    fn rotation_from_zero_lands_on_gamma() {
        let g = gamma();
        let u = rotation_step(Angle::ZERO, g.angle());
        assert!((u.to_f64() - 0.414_213_562_373_095_05).abs() < 1e-15);
        assert_eq!(rotation_step_back(u, g.angle()), Angle::ZERO);
    }

    #[test]
    fn skew_examples() {
        let g = gamma();
        let p = skew_step(TorusPoint::default(), g.angle());
        assert_eq!(p.u, g.angle());
        assert_eq!(p.v, Angle::ZERO);

        let q = skew_step(TorusPoint::from_f64(0.5, 0.25), g.angle());
        let (u, v) = q.to_f64();
        assert!((u - (0.5 + 2f64.sqrt() - 1.0)).abs() < 1e-12);
        assert!((v - 0.75).abs() < 1e-15);
    }

    #[test]
    fn skew_power_matches_iteration() {
        let g = gamma().angle();
        let start = TorusPoint::from_f64(0.123, 0.987);
        let mut p = start;
        for n in 1..=50 {
            p = skew_step(p, g);
            assert_eq!(skew_power(start, g, n), p);
        }
        let mut q = start;
        for n in 1..=50 {
            q = skew_step_back(q, g);
            assert_eq!(skew_power(start, g, -n), q);
        }
    }

    #[test]
    fn product_step_is_componentwise() {
        let g = gamma();
        let w = SymbolWindow::new(0, vec![1, 1]).unwrap();
        let (u, r) = product_step(Angle::ZERO, &w, g.angle());
        assert_eq!(u, g.angle());
        assert_eq!(r, w.shift());
        let (u0, w0) = product_step_back(u, &r, g.angle());
        assert_eq!((u0, w0), (Angle::ZERO, w));
    }

    #[test]
    fn k_fold_rotation_is_exact_multiple() {
        let g = gamma();
        let spec = SystemSpec::rotation(g.clone());
        let mut p = SystemPoint::Circle(Angle::ZERO);
        for _ in 0..1000 {
            p.advance(&spec).unwrap();
        }
        let exact = g.multiple_mod_one(1000).to_f64();
        assert!((p.u().unwrap().to_f64() - exact).abs() < 1e-15);
    }

    #[test]
    fn system_spec_json() {
        let doc = r#"{"kind":"skew","gamma":{"quadratic":[-1,1,2,1]}}"#;
        let spec: SystemSpec = serde_json::from_str(doc).unwrap();
        assert_eq!(spec, SystemSpec::skew(gamma()));
        let doc = r#"{"kind":"product","gamma":{"quadratic":[-1,1,2,1]},"probs":[0.5,0.5]}"#;
        let spec: SystemSpec = serde_json::from_str(doc).unwrap();
        assert_eq!(spec.shift().unwrap().symbols(), &[-1, 1]);
        let back: SystemSpec =
            serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
        assert!(
            serde_json::from_str::<SystemSpec>(r#"{"kind":"bernoulli","probs":[0.2,0.2]}"#)
                .is_err()
        );
        assert!(serde_json::from_str::<SystemSpec>(r#"{"kind":"rotation"}"#).is_err());
    }

    #[test]
    fn sampling_is_reproducible() {
        let spec = SystemSpec::product(gamma(), BernoulliSpec::fair_coin());
        let s = SeedStreams::new(3);
        let a = spec.sample_point(&mut s.stream("p", 0), 4);
        let b = spec.sample_point(&mut s.stream("p", 0), 4);
        assert_eq!(a, b);
        assert_eq!(a.window().unwrap().span(), (-4, 4));
    }

    #[test]
    fn mismatched_points_are_rejected() {
        let spec = SystemSpec::rotation(gamma());
        let p = SystemPoint::Torus(TorusPoint::default());
        assert!(spec.step(&p).is_err());
    }
}
