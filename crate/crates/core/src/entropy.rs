// SPDX-License-Identifier: Apache-2.0

//! Kolmogorov–Sinai entropy.
//!
//! All values are in nats with the nonnegative convention `−Σ p ln p`.
//! [`partition_refine_entropy`] estimates `H_n/n`, the entropy of the
//! refined partition `α ∨ S⁻¹α ∨ … ∨ S^{−(n−1)}α` per step, as the sample
//! mean of `−ln μ(C(x)) / n` where `C(x)` is the refined cell of a sampled
//! point. Cell measures are exact: refined cells are intersections of arcs
//! and cylinders.

use std::collections::BTreeMap;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::number::{Angle, AngleArc};
use crate::rng::{MeanAcc, SeedStreams};
use crate::systems::{cylinder_measure, BernoulliSpec, CylinderSet, SymbolWindow, SystemSpec};

/// Below this many samples an estimate is refused.
pub const MIN_SAMPLES: usize = 100;

/// Blocks per possible block required by [`block_entropy_rate`].
pub const COVERAGE: usize = 100;

const TWO_POW_64: f64 = 18_446_744_073_709_551_616.0;

/// `−Σ p ln p`.
pub fn bernoulli_entropy(spec: &BernoulliSpec) -> f64 {
    -spec.probs().iter().map(|&p| p * p.ln()).sum::<f64>()
}

pub fn nats_to_bits(nats: f64) -> f64 {
    nats / std::f64::consts::LN_2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    pub value: f64,
    pub block_length: u32,
    pub samples: u64,
    pub stderr: f64,
    pub exact: bool,
}

/// `H_n / n` for a Bernoulli shift, summed over symbol-count classes of
/// blocks rather than sampled. Each class contributes its probability times
/// its information `Σ c_i·(−ln p_i)`; grouping the sum by symbol keeps dyadic
/// probabilities exact.
pub fn analytic_block_entropy(spec: &BernoulliSpec, n: u32) -> Result<EntropyEstimate> {
    if n == 0 || n > 60 {
        return Err(Error::InvalidArgument(format!(
            "block length {n} outside 1..=60"
        )));
    }
    // expected symbol counts, normalized by the total block mass so that
    // probabilities summing to 1 only up to rounding do not drift with n
    let mut expected = vec![Neumaier::default(); spec.len()];
    let mut mass = Neumaier::default();
    let mut counts = vec![0u32; spec.len()];
    compositions(&mut counts, 0, n, &mut |c| {
        let weight = multinomial(c)
            * c.iter()
                .zip(spec.probs())
                .map(|(&ci, p)| p.powi(ci as i32))
                .product::<f64>();
        mass.add(weight);
        for (e, &ci) in expected.iter_mut().zip(c) {
            e.add(weight * ci as f64);
        }
    });
    let mut total = Neumaier::default();
    for (e, p) in expected.iter().zip(spec.probs()) {
        total.add(-e.sum() / mass.sum() * p.ln());
    }
    let total = total.sum();
    Ok(EntropyEstimate {
        value: total / n as f64,
        block_length: n,
        samples: 0,
        stderr: 0.0,
        exact: true,
    })
}

/// Compensated summation.
#[derive(Clone, Copy, Default)]
struct Neumaier {
    sum: f64,
    carry: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        self.carry += if self.sum.abs() >= x.abs() {
            (self.sum - t) + x
        } else {
            (x - t) + self.sum
        };
        self.sum = t;
    }

    fn sum(&self) -> f64 {
        self.sum + self.carry
    }
}

fn compositions(c: &mut [u32], i: usize, left: u32, f: &mut impl FnMut(&[u32])) {
    if i + 1 == c.len() {
        c[i] = left;
        f(c);
        return;
    }
    for x in 0..=left {
        c[i] = x;
        compositions(c, i + 1, left - x, f);
    }
}

/// `(Σc)! / Π c_i!`, exact while it fits in a `u128`.
fn multinomial(c: &[u32]) -> f64 {
    let mut acc: u128 = 1;
    let mut seen: u128 = 0;
    for &ci in c {
        for j in 1..=ci as u128 {
            seen += 1;
            acc = acc * seen / j;
        }
    }
    acc as f64
}

/// Plug-in estimate `(1/n)·(−Σ f̂ ln f̂)` over the empirical frequencies of
/// overlapping length-`n` blocks. The standard error is the delta-method
/// value treating blocks as independent.
pub fn block_entropy_rate<T: Ord>(stream: &[T], n: u32) -> Result<EntropyEstimate> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "block length must be at least 1".into(),
        ));
    }
    let alphabet = stream
        .iter()
        .collect::<std::collections::BTreeSet<_>>()
        .len()
        .max(1);
    let needed = (alphabet as f64).powi(n as i32) * COVERAGE as f64;
    if (stream.len() as f64) < needed {
        return Err(Error::Undersampled(format!(
            "{} symbols for blocks of length {n} over {alphabet} symbols; need {needed}",
            stream.len()
        )));
    }
    let mut table: BTreeMap<&[T], u64> = BTreeMap::new();
    for block in stream.windows(n as usize) {
        *table.entry(block).or_default() += 1;
    }
    let total = (stream.len() - n as usize + 1) as f64;
    // summing in count order makes the estimate a function of the count
    // multiset alone, so relabeling symbols cannot change a single bit
    let mut counts: Vec<u64> = table.into_values().collect();
    counts.sort_unstable();
    let (mut h, mut h2) = (0.0, 0.0);
    for count in counts {
        let f = count as f64 / total;
        h -= f * f.ln();
        h2 += f * f.ln() * f.ln();
    }
    let var = ((h2 - h * h) / total).max(0.0);
    Ok(EntropyEstimate {
        value: h / n as f64,
        block_length: n,
        samples: total as u64,
        stderr: var.sqrt() / n as f64,
        exact: false,
    })
}

/// A measurable cell: an arc `[a, b)` of the circle coordinate, a cylinder
/// of the sequence coordinate, or both.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "type")]
pub enum CellSpec {
    Whole,
    Interval {
        a: f64,
        b: f64,
    },
    Cylinder {
        constraints: CylinderSet,
    },
    Product {
        a: f64,
        b: f64,
        constraints: CylinderSet,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub label: String,
    #[serde(flatten)]
    pub region: CellSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionSpec {
    pub cells: Vec<Cell>,
}

fn arc(a: f64, b: f64) -> Result<AngleArc> {
    AngleArc::new(a, b).map_err(|e| Error::InvalidPartition(e.to_string()))
}

struct Region {
    arc: Option<AngleArc>,
    cylinder: Option<CylinderSet>,
}

impl PartitionSpec {
    pub fn new(cells: Vec<Cell>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::InvalidPartition("no cells".into()));
        }
        Ok(Self { cells })
    }

    /// The trivial partition `{X}`.
    pub fn whole() -> Self {
        Self {
            cells: vec![Cell {
                label: "X".into(),
                region: CellSpec::Whole,
            }],
        }
    }

    /// `{[0, 1/2), [1/2, 1)}` on the circle coordinate.
    pub fn halves() -> Self {
        Self {
            cells: vec![
                Cell {
                    label: "lower".into(),
                    region: CellSpec::Interval { a: 0.0, b: 0.5 },
                },
                Cell {
                    label: "upper".into(),
                    region: CellSpec::Interval { a: 0.5, b: 1.0 },
                },
            ],
        }
    }

    /// `{w : w_0 = s}` for each symbol `s`.
    pub fn time_zero(spec: &BernoulliSpec) -> Self {
        Self {
            cells: spec
                .symbols()
                .iter()
                .map(|&s| Cell {
                    label: s.to_string(),
                    region: CellSpec::Cylinder {
                        constraints: CylinderSet::single(0, s),
                    },
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    fn regions(&self, system: &SystemSpec) -> Result<Vec<Region>> {
        let shift = system.shift();
        let has_circle = system.gamma().is_some();
        let mut regions = Vec::with_capacity(self.cells.len());
        for cell in &self.cells {
            let (arc, cylinder) = match &cell.region {
                CellSpec::Whole => (None, None),
                CellSpec::Interval { a, b } => (Some(arc(*a, *b)?), None),
                CellSpec::Cylinder { constraints } => (None, Some(constraints.clone())),
                CellSpec::Product { a, b, constraints } => {
                    (Some(arc(*a, *b)?), Some(constraints.clone()))
                }
            };
            if arc.is_some() && !has_circle {
                return Err(Error::InvalidPartition(format!(
                    "cell {} constrains a circle coordinate the {} system lacks",
                    cell.label,
                    system.kind_name()
                )));
            }
            if let Some(c) = &cylinder {
                let spec = shift.ok_or_else(|| {
                    Error::InvalidPartition(format!(
                        "cell {} constrains a sequence coordinate the {} system lacks",
                        cell.label,
                        system.kind_name()
                    ))
                })?;
                c.validate(spec)?;
            }
            regions.push(Region { arc, cylinder });
        }
        Ok(regions)
    }

    /// Checks the cells against the system: pairwise disjoint, total measure
    /// 1 within `1e−12`.
    pub fn validate_for(&self, system: &SystemSpec) -> Result<()> {
        let regions = self.regions(system)?;
        let measure = |r: &Region| -> Result<f64> {
            let arc = r.arc.map_or(1.0, |a| a.measure());
            let cyl = match (&r.cylinder, system.shift()) {
                (Some(c), Some(spec)) => cylinder_measure(spec, c)?,
                _ => 1.0,
            };
            Ok(arc * cyl)
        };
        for (i, a) in regions.iter().enumerate() {
            for (j, b) in regions.iter().enumerate().skip(i + 1) {
                let arcs_disjoint = match (a.arc, b.arc) {
                    (Some(x), Some(y)) => x.disjoint(&y),
                    _ => false,
                };
                let cylinders_disjoint = match (&a.cylinder, &b.cylinder) {
                    (Some(x), Some(y)) => x.intersect(y).is_none(),
                    _ => false,
                };
                if !arcs_disjoint && !cylinders_disjoint {
                    return Err(Error::InvalidPartition(format!(
                        "cells {} and {} overlap",
                        self.cells[i].label, self.cells[j].label
                    )));
                }
            }
        }
        let total = regions.iter().map(measure).sum::<Result<f64>>()?;
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidPartition(format!(
                "cells cover measure {total}, not 1"
            )));
        }
        Ok(())
    }
}

/// What a sampled point needs for its itinerary.
struct Sampler<'a> {
    system: &'a SystemSpec,
    regions: Vec<Region>,
    gamma: Angle,
    /// Sequence positions `lo..=hi` touched by the first `n` steps.
    span: Option<(i64, i64)>,
    n: u32,
}

impl<'a> Sampler<'a> {
    fn new(system: &'a SystemSpec, partition: &PartitionSpec, n: u32) -> Result<Self> {
        partition.validate_for(system)?;
        let regions = partition.regions(system)?;
        let extents: Vec<(i64, i64)> = regions
            .iter()
            .filter_map(|r| r.cylinder.as_ref()?.extent())
            .collect();
        let span = (!extents.is_empty()).then(|| {
            let lo = extents.iter().map(|e| e.0).min().unwrap_or(0);
            let hi = extents.iter().map(|e| e.1).max().unwrap_or(0);
            (lo, hi + n as i64 - 1)
        });
        Ok(Self {
            system,
            regions,
            gamma: system.gamma().map_or(Angle::ZERO, |g| g.angle()),
            span,
            n,
        })
    }

    fn draw(&self, rng: &mut dyn RngCore) -> (Angle, Option<SymbolWindow>) {
        let u = Angle(rng.next_u64());
        let w = match (self.span, self.system.shift()) {
            (Some((lo, hi)), Some(spec)) => {
                let symbols = (lo..=hi).map(|_| spec.sample_index(rng)).collect();
                Some(SymbolWindow::new(lo, symbols).expect("nonempty span"))
            }
            _ => None,
        };
        (u, w)
    }

    /// Index of the cell holding `(u, w)`.
    fn cell_of(
        &self,
        u: Angle,
        w: Option<&SymbolWindow>,
        spec: Option<&BernoulliSpec>,
    ) -> Result<usize> {
        for (i, r) in self.regions.iter().enumerate() {
            let in_arc = r.arc.is_none_or(|a| a.offset(u).is_some());
            let in_cyl = match (&r.cylinder, w, spec) {
                (Some(c), Some(w), Some(spec)) => c.contains(spec, w)?,
                (None, _, _) => true,
                _ => false,
            };
            if in_arc && in_cyl {
                return Ok(i);
            }
        }
        Err(Error::InvalidPartition(
            "a sampled point lies in no cell".into(),
        ))
    }

    /// `−ln μ(C(x))` of the refined cell of `(u, w)`.
    fn information(&self, u: Angle, w: Option<&SymbolWindow>) -> Result<f64> {
        let spec = self.system.shift();
        let (mut left, mut right) = (u128::MAX, u128::MAX);
        let mut fixed: Vec<(i64, i64)> = Vec::new();
        for j in 0..self.n as i64 {
            let uj = u + self.gamma.times(j);
            let wj = w.map(|w| w.shift_by(j));
            let cell = &self.regions[self.cell_of(uj, wj.as_ref(), spec)?];
            if let Some(arc) = cell.arc {
                let off = arc.offset(uj).expect("point lies in its cell");
                left = left.min(off);
                right = right.min(arc.len_units() - off);
            }
            if let Some(c) = &cell.cylinder {
                // S^{-j} of a cylinder moves its constraints j places right
                fixed.extend(c.shifted(j).constraints().iter().copied());
            }
        }
        let arc_measure = if left == u128::MAX {
            1.0
        } else {
            (left + right) as f64 / TWO_POW_64
        };
        fixed.sort_unstable();
        fixed.dedup();
        let cyl = match spec {
            Some(spec) => cylinder_measure(spec, &CylinderSet::new(fixed)?)?,
            None => 1.0,
        };
        Ok(-(arc_measure.min(1.0) * cyl).ln())
    }
}

/// Monte-Carlo `H_n / n` for partition `alpha` under `system`.
pub fn partition_refine_entropy(
    system: &SystemSpec,
    alpha: &PartitionSpec,
    n: u32,
    samples: usize,
    streams: &SeedStreams,
) -> Result<EntropyEstimate> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "block length must be at least 1".into(),
        ));
    }
    if samples < MIN_SAMPLES {
        return Err(Error::Undersampled(format!(
            "{samples} samples; at least {MIN_SAMPLES} required"
        )));
    }
    let sampler = Sampler::new(system, alpha, n)?;
    let parts = streams.chunked("entropy", samples, |rng, count| -> Result<MeanAcc> {
        let mut acc = MeanAcc::default();
        for _ in 0..count {
            let (u, w) = sampler.draw(rng);
            acc.push(sampler.information(u, w.as_ref())? / n as f64);
        }
        Ok(acc)
    });
    let acc = MeanAcc::merged(&parts.into_iter().collect::<Result<Vec<_>>>()?);
    Ok(EntropyEstimate {
        value: acc.mean(),
        block_length: n,
        samples: acc.count(),
        stderr: acc.stderr(),
        exact: false,
    })
}

/// Cell indices of `x, Sx, …, S^{len−1}x` for one sampled `x`.
pub fn coded_trajectory(
    system: &SystemSpec,
    alpha: &PartitionSpec,
    len: usize,
    streams: &SeedStreams,
) -> Result<Vec<u32>> {
    let sampler = Sampler::new(system, alpha, len as u32)?;
    let mut rng = streams.stream("trajectory", 0);
    let (u, w) = sampler.draw(&mut rng);
    let spec = system.shift();
    (0..len as i64)
        .map(|j| {
            let wj = w.as_ref().map(|w| w.shift_by(j));
            sampler
                .cell_of(u + sampler.gamma.times(j), wj.as_ref(), spec)
                .map(|i| i as u32)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpacialVerdict {
    /// Entropies differ, so no isomorphism exists.
    NotSpaciallyIsomorphic,
    /// Entropies agree; isomorphic by Ornstein's theorem.
    SpaciallyIsomorphic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyClassification {
    pub entropy_a: f64,
    pub entropy_b: f64,
    pub spacial: SpacialVerdict,
    /// Bernoulli shifts all have countable Lebesgue spectrum.
    pub spectrally_isomorphic: bool,
}

impl EntropyClassification {
    pub fn spacial_text(&self) -> &'static str {
        match self.spacial {
            SpacialVerdict::NotSpaciallyIsomorphic => {
                "not spacially isomorphic (entropy invariant)"
            }
            SpacialVerdict::SpaciallyIsomorphic => "spacially isomorphic (Ornstein)",
        }
    }

    pub fn spectral_text(&self) -> &'static str {
        "spectrally isomorphic (both Lebesgue systems)"
    }
}

pub fn entropy_classifier(
    a: &BernoulliSpec,
    b: &BernoulliSpec,
    tol: f64,
) -> Result<EntropyClassification> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "tolerance {tol} must be positive"
        )));
    }
    let (ha, hb) = (bernoulli_entropy(a), bernoulli_entropy(b));
    Ok(EntropyClassification {
        entropy_a: ha,
        entropy_b: hb,
        spacial: if (ha - hb).abs() > tol {
            SpacialVerdict::NotSpaciallyIsomorphic
        } else {
            SpacialVerdict::SpaciallyIsomorphic
        },
        spectrally_isomorphic: true,
    })
}
