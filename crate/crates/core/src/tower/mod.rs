// SPDX-License-Identifier: Apache-2.0

//! Generalized proper-function towers and the residual certificate for
//! systems whose tower cannot be computed symbolically.

mod distinguish;
mod lattice;
mod levels;
mod residual;

pub use distinguish::{
    classify_residual, tower_signature, towers_distinguish, Provenance, ResidualEvidence,
    ResidualProtocol, TowerComparison, TowerSignature, TowerVerdict, ACCEPT_RESIDUAL,
};
pub use lattice::Lattice2;
pub use levels::{
    compute_tower, compute_tower_for, quotient_homomorphism, tower_step, CharacterDynamics,
    Quotient, Tower, TowerLevel,
};
pub use residual::{
    default_grid, quasi_eigen_residual_search, Block, BlockResidual, ResidualReport, DEFAULT_BAND,
};
