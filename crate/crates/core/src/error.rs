// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors produced by the workbench.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid rotation number: {0}")]
    InvalidRotation(String),

    #[error("invalid Bernoulli specification: {0}")]
    InvalidBernoulli(String),

    #[error("symbol {0} is not in the alphabet")]
    UnknownSymbol(i64),

    #[error("invalid cylinder set: {0}")]
    InvalidCylinder(String),

    #[error("invalid system specification: {0}")]
    InvalidSystem(String),

    #[error("normalizing phase undefined on the point-spectrum row m = 0")]
    PointSpectrumRow,

    #[error("exact arithmetic required: {0}")]
    NonExact(String),

    #[error("incompatible spectra: {0}")]
    IncompatibleSpectra(String),

    #[error("operation not supported for {kind} systems: {what}")]
    Unsupported { kind: &'static str, what: String },

    #[error("character ({0}, {1}) is not in tower level {2}")]
    NotInLevel(i64, i64, u32),

    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("undersampled: {0}")]
    Undersampled(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid test set: {0}")]
    InvalidTestSet(String),

    #[error("no closed form for {0}")]
    NoClosedForm(String),

    #[error("coordinate {0} lies outside the sampled window")]
    WindowExhausted(i64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
