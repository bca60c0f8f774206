// SPDX-License-Identifier: Apache-2.0

//! Whether `1″ = 1‴` tells two systems apart.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::levels::compute_tower;
use super::residual::{quasi_eigen_residual_search, ResidualReport, DEFAULT_BAND};
use crate::error::{Error, Result};
use crate::systems::SystemSpec;

/// Accept a quasi-eigenfunction at or below this residual.
pub const ACCEPT_RESIDUAL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualProtocol {
    pub ks: Vec<i64>,
    pub truncation: u32,
    /// Window of the reference run fixing the floor `r₀`.
    pub reference_truncation: u32,
    pub band: u32,
}

impl Default for ResidualProtocol {
    fn default() -> Self {
        Self {
            ks: vec![1, -1, 2, -2],
            truncation: 8,
            reference_truncation: 4,
            band: DEFAULT_BAND,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Exact,
    Spectral,
    ResidualCertified,
}

/// Per-`k` outcome of the residual protocol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualEvidence {
    pub k: i64,
    pub floor: f64,
    pub report: ResidualReport,
    /// Whether a quasi-eigenfunction with multiplier `e^{2πiku}` exists.
    pub exists: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TowerSignature {
    pub system: String,
    pub second_equals_third: bool,
    pub provenance: Provenance,
    pub evidence: Vec<ResidualEvidence>,
}

/// Applies the threshold protocol to one `k`: exists if the residual is at
/// most [`ACCEPT_RESIDUAL`], absent if at least half the reference floor.
pub fn classify_residual(k: i64, floor: f64, report: ResidualReport) -> Result<ResidualEvidence> {
    let exists = if report.residual <= ACCEPT_RESIDUAL {
        true
    } else if report.residual >= floor / 2.0 {
        false
    } else {
        return Err(Error::Inconclusive(format!(
            "k = {k}: residual {:.3e} lies between {ACCEPT_RESIDUAL:e} and r0/2 = {:.3e}",
            report.residual,
            floor / 2.0
        )));
    };
    Ok(ResidualEvidence {
        k,
        floor,
        report,
        exists,
    })
}

pub fn tower_signature(spec: &SystemSpec, protocol: &ResidualProtocol) -> Result<TowerSignature> {
    let (second_equals_third, provenance, evidence) = match spec {
        SystemSpec::Rotation { .. } | SystemSpec::Skew { .. } => {
            let tower = compute_tower(spec, 3)?;
            let eq = tower.second_equals_third().expect("three levels computed");
            (eq, Provenance::Exact, Vec::new())
        }
        // no eigenvalue besides 1, so 1′ = 1″ = 1‴ = constants
        SystemSpec::Bernoulli { .. } => (true, Provenance::Spectral, Vec::new()),
        SystemSpec::Product { .. } => {
            let evidence = protocol
                .ks
                .par_iter()
                .map(|&k| {
                    let floor = quasi_eigen_residual_search(
                        spec,
                        k,
                        protocol.reference_truncation,
                        protocol.band,
                        None,
                    )?
                    .residual;
                    let report = quasi_eigen_residual_search(
                        spec,
                        k,
                        protocol.truncation,
                        protocol.band,
                        None,
                    )?;
                    classify_residual(k, floor, report)
                })
                .collect::<Result<Vec<_>>>()?;
            let eq = evidence.iter().all(|e| !e.exists);
            (eq, Provenance::ResidualCertified, evidence)
        }
    };
    Ok(TowerSignature {
        system: spec.kind_name().to_string(),
        second_equals_third,
        provenance,
        evidence,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TowerVerdict {
    Distinguished,
    NotDistinguished,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TowerComparison {
    pub verdict: TowerVerdict,
    pub a: TowerSignature,
    pub b: TowerSignature,
}

/// Distinguished iff exactly one system has `1″ = 1‴`; a distinguished pair
/// is not spacially isomorphic.
pub fn towers_distinguish(
    a: &SystemSpec,
    b: &SystemSpec,
    protocol: &ResidualProtocol,
) -> Result<TowerComparison> {
    let sa = tower_signature(a, protocol)?;
    let sb = tower_signature(b, protocol)?;
    let verdict = if sa.second_equals_third != sb.second_equals_third {
        TowerVerdict::Distinguished
    } else {
        TowerVerdict::NotDistinguished
    };
    Ok(TowerComparison {
        verdict,
        a: sa,
        b: sb,
    })
}
