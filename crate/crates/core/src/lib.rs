// SPDX-License-Identifier: Apache-2.0

//! Computational ergodic theory workbench.
//!
//! The crate implements four concrete measure-preserving systems (circle
//! rotation, the torus skew map, Bernoulli shifts and the rotation × shift
//! product) together with:
//!
//! - [`koopman`]: the exact action of the Koopman operator on Fourier and
//!   cylinder-character bases, orbit (chain) decompositions, spectrum
//!   descriptors, and an explicitly verified spectral intertwiner;
//! - [`tower`]: the tower of generalized proper functions on character
//!   lattices, plus a truncated least-squares search for quasi-eigenfunctions
//!   where no exact lattice description exists;
//! - [`entropy`]: Kolmogorov–Sinai entropy values and estimators;
//! - [`mixing`]: Birkhoff averages, correlations and the weak-mixing statistic.
//!
//! Phases and rotation numbers are exact (quadratic irrationals); circle
//! coordinates are 64-bit fixed point.

pub mod entropy;
pub mod error;
pub mod koopman;
pub mod mixing;
pub mod number;
pub mod phase;
pub mod rng;
pub mod systems;
pub mod tower;

pub use error::{Error, Result};
pub use number::{Angle, AngleArc, GammaRepr, QuadraticElement, RotationNumber};
pub use phase::Phase;
pub use rng::SeedStreams;
pub use systems::{BernoulliSpec, CylinderSet, SymbolWindow, SystemPoint, SystemSpec, TorusPoint};
