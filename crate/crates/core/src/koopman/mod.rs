// SPDX-License-Identifier: Apache-2.0

//! Koopman operators on explicit orthonormal bases.

mod basis;
mod intertwiner;
mod orbits;
mod spectrum;

pub use basis::{
    eval_sequence_basis, koopman_apply, koopman_apply_inverse, koopman_apply_normalized,
    koopman_apply_product, koopman_apply_skew, koopman_apply_skew_inverse, normalizer,
    normalizing_phase, skew_chain_coordinates, zigzag_rank, zigzag_unrank, BasisIndex,
    CharacterPattern, FourierMode, Frame, PhasedMode, ProductBasisIndex, Tail,
};
pub use intertwiner::{
    build_intertwiner, entry_frequency, verify_intertwiner, IntertwinerPairing, PairEntry,
    VerificationReport,
};
pub use orbits::{
    chain_kind, chain_label_at, chain_label_rank, chain_member, chain_position, in_truncation,
    orbit_decompose, point_frequency, point_index, ChainKind, ChainLabel, Orbit,
};
pub use spectrum::{
    point_spectrum_groups_equal, proper_modes_of_skew, spectrum_of, GroupComparison, Multiplicity,
    PointPart, ProperModes, RowCertificate, SpectrumDescriptor, SpectrumTag, RELATION_BOUND,
};
