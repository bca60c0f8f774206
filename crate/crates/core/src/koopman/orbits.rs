// SPDX-License-Identifier: Apache-2.0

//! Orbit structure of the basis under the Koopman operator.
//!
//! Every basis index is either fixed up to a phase (a proper function) or
//! lies on a bi-infinite chain that the operator shifts one step forward.
//! Chains are named by a [`ChainLabel`] and a position; the labels of each
//! system kind carry a canonical enumeration, and truncating at a bound `B`
//! always keeps a prefix of it.

use serde::{Deserialize, Serialize};

use super::basis::{
    skew_chain_coordinates, zigzag_rank, zigzag_unrank, BasisIndex, FourierMode, ProductBasisIndex,
    Tail,
};
use crate::error::{Error, Result};
use crate::systems::SystemSpec;

/// Name of one bi-infinite chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainLabel {
    /// Row `m ≠ 0`, residue `0 ≤ r < |m|`.
    Skew { m: i64, r: i64 },
    /// Cylinder-character pattern `m`.
    Sequence { m: i64 },
    /// Circle frequency `l` times pattern `m`.
    Product { l: i64, m: i64 },
}

/// One orbit of a truncated basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "type")]
pub enum Orbit {
    /// A proper function with eigenvalue `e^{2πi·k·γ}`.
    Fixed { index: BasisIndex, k: i64 },
    /// The members of a chain inside the truncation, in forward order,
    /// starting at `first_position`. Truncated chains are always partial.
    Chain {
        label: ChainLabel,
        first_position: i64,
        members: Vec<BasisIndex>,
        partial: bool,
    },
}

/// Label and position of a chain member, or `None` for a fixed index.
pub fn chain_position(idx: BasisIndex) -> Option<(ChainLabel, i64)> {
    match idx {
        BasisIndex::Torus(FourierMode { k, m }) if m != 0 => {
            let (r, j) = skew_chain_coordinates(k, m);
            Some((ChainLabel::Skew { m, r }, j))
        }
        BasisIndex::Sequence(Tail::Lebesgue { k, m }) => Some((ChainLabel::Sequence { m }, k)),
        BasisIndex::Product(ProductBasisIndex {
            l,
            tail: Tail::Lebesgue { k, m },
        }) => Some((ChainLabel::Product { l, m }, k)),
        _ => None,
    }
}

/// Inverse of [`chain_position`].
pub fn chain_member(label: ChainLabel, position: i64) -> BasisIndex {
    match label {
        ChainLabel::Skew { m, r } => BasisIndex::Torus(FourierMode::new(r + position * m, m)),
        ChainLabel::Sequence { m } => BasisIndex::Sequence(Tail::Lebesgue { k: position, m }),
        ChainLabel::Product { l, m } => {
            BasisIndex::Product(ProductBasisIndex::lebesgue(l, position, m))
        }
    }
}

/// The fixed basis index carrying eigenvalue `e^{2πikγ}`, if the system has one.
pub fn point_index(spec: &SystemSpec, k: i64) -> Option<BasisIndex> {
    match spec {
        SystemSpec::Rotation { .. } => Some(BasisIndex::Circle(k)),
        SystemSpec::Skew { .. } => Some(BasisIndex::Torus(FourierMode::new(k, 0))),
        SystemSpec::Bernoulli { .. } => (k == 0).then_some(BasisIndex::Sequence(Tail::Constant)),
        SystemSpec::Product { .. } => Some(BasisIndex::Product(ProductBasisIndex::constant(k))),
    }
}

/// Frequency `k` of a fixed index.
pub fn point_frequency(idx: BasisIndex) -> Option<i64> {
    match idx {
        BasisIndex::Circle(k) => Some(k),
        BasisIndex::Torus(FourierMode { k, m: 0 }) => Some(k),
        BasisIndex::Sequence(Tail::Constant) => Some(0),
        BasisIndex::Product(ProductBasisIndex {
            l,
            tail: Tail::Constant,
        }) => Some(l),
        _ => None,
    }
}

/// Whether `idx` lies inside the truncation at bound `b`.
pub fn in_truncation(idx: BasisIndex, b: i64) -> bool {
    match idx {
        BasisIndex::Circle(k) => k.abs() <= b,
        BasisIndex::Torus(FourierMode { k, m }) => k.abs() <= b && m.abs() <= b,
        BasisIndex::Sequence(Tail::Constant) => true,
        BasisIndex::Sequence(Tail::Lebesgue { k, m }) => k.abs() <= b && m.abs() <= b,
        BasisIndex::Product(ProductBasisIndex { l, tail }) => {
            l.abs() <= b
                && match tail {
                    Tail::Constant => true,
                    Tail::Lebesgue { k, m } => k.abs() <= b && m.abs() <= b,
                }
        }
    }
}

/// Chain label kinds, for canonical enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChainKind {
    Skew,
    Sequence,
    Product,
}

/// The kind of chains `spec` has, if any.
pub fn chain_kind(spec: &SystemSpec) -> Option<ChainKind> {
    match spec {
        SystemSpec::Rotation { .. } => None,
        SystemSpec::Skew { .. } => Some(ChainKind::Skew),
        SystemSpec::Bernoulli { .. } => Some(ChainKind::Sequence),
        SystemSpec::Product { .. } => Some(ChainKind::Product),
    }
}

fn isqrt(n: u64) -> u64 {
    let mut x = (n as f64).sqrt() as u64;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// Pairs `(l, m)` with `max(|l|, |m|) = s`, in lexicographic order.
fn product_shell(s: i64) -> impl Iterator<Item = (i64, i64)> {
    (-s..=s).flat_map(move |l| {
        let ms: Vec<i64> = if l.abs() == s {
            (-s..=s).collect()
        } else if s == 0 {
            vec![0]
        } else {
            vec![-s, s]
        };
        ms.into_iter().map(move |m| (l, m))
    })
}

/// The `n`-th label in the canonical order of `kind`.
///
/// Skew: by `|m|`, then `+|m|` before `−|m|`, then residue. Sequence: `m` in
/// zigzag order. Product: by shell `max(|l|, |m|)`, then lexicographically.
pub fn chain_label_at(kind: ChainKind, n: u64) -> ChainLabel {
    match kind {
        ChainKind::Skew => {
            // labels with |m| < M number M(M-1)
            let mut big_m = isqrt(4 * n + 1).div_ceil(2);
            while big_m * (big_m - 1) > n {
                big_m -= 1;
            }
            let offset = n - big_m * (big_m - 1);
            let m = big_m as i64;
            let (m, r) = if offset < big_m {
                (m, offset as i64)
            } else {
                (-m, (offset - big_m) as i64)
            };
            ChainLabel::Skew { m, r }
        }
        ChainKind::Sequence => ChainLabel::Sequence {
            m: zigzag_unrank(n),
        },
        ChainKind::Product => {
            // labels with shell < s number (2s - 1)^2
            let mut s = isqrt(n).div_ceil(2);
            while (2 * s + 1) * (2 * s + 1) <= n {
                s += 1;
            }
            let before = if s == 0 { 0 } else { (2 * s - 1) * (2 * s - 1) };
            let (l, m) = product_shell(s as i64)
                .nth((n - before) as usize)
                .expect("offset inside shell");
            ChainLabel::Product { l, m }
        }
    }
}

/// Position of `label` in the canonical order of its kind.
pub fn chain_label_rank(label: ChainLabel) -> u64 {
    match label {
        ChainLabel::Skew { m, r } => {
            let a = m.unsigned_abs();
            a * (a - 1) + if m > 0 { 0 } else { a } + r as u64
        }
        ChainLabel::Sequence { m } => zigzag_rank(m),
        ChainLabel::Product { l, m } => {
            let s = l.abs().max(m.abs());
            let before = if s == 0 { 0 } else { (2 * s - 1) * (2 * s - 1) } as u64;
            let offset = product_shell(s)
                .position(|p| p == (l, m))
                .expect("pair lies in its shell");
            before + offset as u64
        }
    }
}

/// Splits the basis truncated at bound `b` into fixed points and chain
/// segments. Fixed points come first by frequency; chains follow in the
/// canonical label order.
pub fn orbit_decompose(spec: &SystemSpec, b: u32) -> Result<Vec<Orbit>> {
    let b = b as i64;
    let mut orbits = Vec::new();
    let fixed_range = match spec {
        SystemSpec::Bernoulli { .. } => 0..=0,
        _ => -b..=b,
    };
    for k in fixed_range {
        let index = point_index(spec, k).ok_or_else(|| {
            Error::InvalidArgument(format!("no proper index {k} in {}", spec.kind_name()))
        })?;
        orbits.push(Orbit::Fixed { index, k });
    }
    let Some(kind) = chain_kind(spec) else {
        return Ok(orbits);
    };
    let mut n = 0u64;
    loop {
        let label = chain_label_at(kind, n);
        let outside = match label {
            ChainLabel::Skew { m, .. } | ChainLabel::Sequence { m } => m.abs() > b,
            ChainLabel::Product { l, m } => l.abs().max(m.abs()) > b,
        };
        if outside {
            break;
        }
        let positions: Vec<i64> = match label {
            ChainLabel::Skew { m, r } => (-2 * b - 1..=2 * b + 1)
                .filter(|j| (r + j * m).abs() <= b)
                .collect(),
            _ => (-b..=b).collect(),
        };
        orbits.push(Orbit::Chain {
            label,
            first_position: positions[0],
            members: positions.iter().map(|&j| chain_member(label, j)).collect(),
            partial: true,
        });
        n += 1;
    }
    Ok(orbits)
}
