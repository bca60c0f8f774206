// SPDX-License-Identifier: Apache-2.0

//! Basis indices and the exact Koopman action on them.
//!
//! Torus modes `g_{k,m}(u,v) = e^{2πiku}e^{2πimv}` are mapped by the skew
//! system as `U g_{k,m} = e^{2πikγ} g_{k+m,m}`. On sequence space the basis is
//! the constant together with cylinder characters `d_{k,m}`, where `m` labels
//! a character pattern anchored at offset 0 and `k` its translate; the shift
//! acts as `d_{k,m} ↦ d_{k+1,m}`. Product indices combine a circle frequency
//! `l` with either the constant or a `d_{k,m}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase::Phase;
use crate::systems::{BernoulliSpec, SymbolWindow, SystemSpec};

/// Index `(k, m)` of `g_{k,m}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FourierMode {
    pub k: i64,
    pub m: i64,
}

impl FourierMode {
    pub fn new(k: i64, m: i64) -> Self {
        Self { k, m }
    }
}

/// `phase · g_{mode}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PhasedMode {
    pub phase: Phase,
    pub mode: FourierMode,
}

/// Sequence-space factor of a basis function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tail {
    Constant,
    Lebesgue { k: i64, m: i64 },
}

/// `\bar h_l` (constant tail) or `p_{l,k,m} = e^{2πilu} d_{k,m}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ProductBasisIndex {
    pub l: i64,
    pub tail: Tail,
}

impl ProductBasisIndex {
    pub fn constant(l: i64) -> Self {
        Self {
            l,
            tail: Tail::Constant,
        }
    }

    pub fn lebesgue(l: i64, k: i64, m: i64) -> Self {
        Self {
            l,
            tail: Tail::Lebesgue { k, m },
        }
    }
}

/// A basis label in any of the four systems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisIndex {
    Circle(i64),
    Torus(FourierMode),
    Sequence(Tail),
    Product(ProductBasisIndex),
}

/// Which orthonormal frame an index refers to: the raw one (`g`, `p`) or the
/// phase-normalized one (`f = a·g`, `t`) on which chains shift without phases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    Raw,
    Normalized,
}

/// `U g_{k,m} = e^{2πikγ} g_{k+m,m}`.
pub fn koopman_apply_skew(mode: FourierMode) -> PhasedMode {
    PhasedMode {
        phase: Phase::gamma_multiple(mode.k),
        mode: FourierMode::new(mode.k + mode.m, mode.m),
    }
}

/// `U⁻¹ g_{k,m} = e^{-2πi(k-m)γ} g_{k-m,m}`.
pub fn koopman_apply_skew_inverse(mode: FourierMode) -> PhasedMode {
    PhasedMode {
        phase: Phase::gamma_multiple(-(mode.k - mode.m)),
        mode: FourierMode::new(mode.k - mode.m, mode.m),
    }
}

/// Chain coordinates of a row-`m` mode: residue `r = k mod |m|` and position
/// `j` with `k = r + j·m`.
pub fn skew_chain_coordinates(k: i64, m: i64) -> (i64, i64) {
    let r = k.rem_euclid(m.abs());
    (r, (k - r) / m)
}

/// The unimodular constant `a_{k,m}` with `a_{k+m,m} = e^{2πikγ} a_{k,m}`,
/// anchored by `a_{r,m} = 1` at the chain representative `0 ≤ r < |m|`.
///
/// With `k = r + j·m` the solution is `e^{2πiγ(jr + m·j(j−1)/2)}`.
pub fn normalizing_phase(k: i64, m: i64) -> Result<Phase> {
    if m == 0 {
        return Err(Error::PointSpectrumRow);
    }
    let (r, j) = skew_chain_coordinates(k, m);
    Ok(Phase::gamma_multiple(j * r + m * j * (j - 1) / 2))
}

/// `V p_{l,k,m} = e^{2πilγ} p_{l,k+1,m}` and `V \bar h_l = e^{2πilγ} \bar h_l`
/// in the raw frame; `V t_{l,k,m} = t_{l,k+1,m}` in the normalized frame,
/// where `t_{l,k,m} = e^{2πilkγ} p_{l,k,m}`.
pub fn koopman_apply_product(idx: ProductBasisIndex, frame: Frame) -> (Phase, ProductBasisIndex) {
    match idx.tail {
        Tail::Constant => (Phase::gamma_multiple(idx.l), idx),
        Tail::Lebesgue { k, m } => {
            let phase = match frame {
                Frame::Raw => Phase::gamma_multiple(idx.l),
                Frame::Normalized => Phase::ONE,
            };
            (phase, ProductBasisIndex::lebesgue(idx.l, k + 1, m))
        }
    }
}

/// Raw-frame Koopman action of `spec` on `idx`.
pub fn koopman_apply(spec: &SystemSpec, idx: BasisIndex) -> Result<(Phase, BasisIndex)> {
    koopman_power(spec, idx, 1)
}

/// Raw-frame action of the inverse Koopman operator.
pub fn koopman_apply_inverse(spec: &SystemSpec, idx: BasisIndex) -> Result<(Phase, BasisIndex)> {
    koopman_power(spec, idx, -1)
}

fn koopman_power(spec: &SystemSpec, idx: BasisIndex, dir: i64) -> Result<(Phase, BasisIndex)> {
    match (spec, idx) {
        (SystemSpec::Rotation { .. }, BasisIndex::Circle(k)) => {
            Ok((Phase::gamma_multiple(dir * k), idx))
        }
        (SystemSpec::Skew { .. }, BasisIndex::Torus(mode)) => {
            let pm = if dir > 0 {
                koopman_apply_skew(mode)
            } else {
                koopman_apply_skew_inverse(mode)
            };
            Ok((pm.phase, BasisIndex::Torus(pm.mode)))
        }
        (SystemSpec::Bernoulli { .. }, BasisIndex::Sequence(tail)) => {
            Ok((Phase::ONE, BasisIndex::Sequence(shift_tail(tail, dir))))
        }
        (SystemSpec::Product { .. }, BasisIndex::Product(p)) => Ok((
            Phase::gamma_multiple(dir * p.l),
            BasisIndex::Product(ProductBasisIndex {
                l: p.l,
                tail: shift_tail(p.tail, dir),
            }),
        )),
        _ => Err(Error::InvalidArgument(format!(
            "basis index {idx:?} does not belong to a {} system",
            spec.kind_name()
        ))),
    }
}

fn shift_tail(tail: Tail, by: i64) -> Tail {
    match tail {
        Tail::Constant => Tail::Constant,
        Tail::Lebesgue { k, m } => Tail::Lebesgue { k: k + by, m },
    }
}

/// The phase `n(idx)` with `normalized(idx) = n(idx) · raw(idx)`.
pub fn normalizer(idx: BasisIndex) -> Phase {
    match idx {
        BasisIndex::Torus(FourierMode { k, m }) if m != 0 => {
            normalizing_phase(k, m).expect("m is nonzero")
        }
        BasisIndex::Product(ProductBasisIndex {
            l,
            tail: Tail::Lebesgue { k, .. },
        }) => Phase::gamma_multiple(l * k),
        _ => Phase::ONE,
    }
}

/// Normalized-frame action: the raw action conjugated by [`normalizer`].
pub fn koopman_apply_normalized(spec: &SystemSpec, idx: BasisIndex) -> Result<(Phase, BasisIndex)> {
    let (phase, image) = koopman_apply(spec, idx)?;
    Ok((normalizer(idx) * phase * normalizer(image).conj(), image))
}

/// A nontrivial cylinder-character pattern: `(offset, letter)` pairs with
/// offsets starting at 0 and letters indexing the nontrivial site functions
/// `φ_1, …, φ_{n-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CharacterPattern {
    pub sites: Vec<(u32, u8)>,
}

/// `0, 1, -1, 2, -2, …` ↔ `0, 1, 2, 3, 4, …`.
pub fn zigzag_rank(m: i64) -> u64 {
    if m > 0 {
        (2 * m - 1) as u64
    } else {
        (-2 * m) as u64
    }
}

pub fn zigzag_unrank(n: u64) -> i64 {
    if n % 2 == 1 {
        n.div_ceil(2) as i64
    } else {
        -((n / 2) as i64)
    }
}

impl CharacterPattern {
    /// Width `max offset + 1`.
    pub fn span(&self) -> u32 {
        self.sites.last().map_or(0, |s| s.0 + 1)
    }

    /// The `rank`-th pattern over an alphabet of `alphabet` symbols, ordered
    /// by span and then by mixed-radix digits.
    pub fn unrank(mut rank: u64, alphabet: usize) -> Self {
        let q = (alphabet - 1) as u64;
        let mut span = 1u32;
        loop {
            let count = if span == 1 {
                q
            } else {
                q * q * (q + 1).pow(span - 2)
            };
            if rank < count {
                break;
            }
            rank -= count;
            span += 1;
        }
        if span == 1 {
            return Self {
                sites: vec![(0, 1 + rank as u8)],
            };
        }
        let first = 1 + (rank % q) as u8;
        rank /= q;
        let last = 1 + (rank % q) as u8;
        rank /= q;
        let mut sites = vec![(0, first)];
        for offset in 1..span - 1 {
            let digit = (rank % (q + 1)) as u8;
            rank /= q + 1;
            if digit > 0 {
                sites.push((offset, digit));
            }
        }
        sites.push((span - 1, last));
        Self { sites }
    }

    /// Pattern carried by chain label `m` of a Bernoulli system.
    pub fn for_label(m: i64, alphabet: usize) -> Self {
        Self::unrank(zigzag_rank(m), alphabet)
    }
}

/// Evaluates `d_{k,m}(w)` (or the constant 1) on a window.
pub fn eval_sequence_basis(
    spec: &BernoulliSpec,
    basis: &[Vec<f64>],
    tail: Tail,
    w: &SymbolWindow,
) -> Result<f64> {
    match tail {
        Tail::Constant => Ok(1.0),
        Tail::Lebesgue { k, m } => {
            let pattern = CharacterPattern::for_label(m, spec.len());
            pattern
                .sites
                .iter()
                .try_fold(1.0, |acc, &(offset, letter)| {
                    let pos = k + offset as i64;
                    let s = w.get(pos).ok_or(Error::WindowExhausted(pos))?;
                    Ok(acc * basis[letter as usize][s as usize])
                })
        }
    }
}
