// SPDX-License-Identifier: Apache-2.0

//! Birkhoff averages, correlation sequences `μ(Sⁱ(A) ∩ B)` and the
//! weak-mixing Cesàro statistic.
//!
//! Exact correlations exist for arcs under a rotation (and for arcs in the
//! `u`-coordinate of the skew and product systems, which factor onto it) and
//! for cylinders under the shift. Everything else is sampled: a point `y` is
//! drawn from the invariant measure and `μ(Sⁱ(A) ∩ B) = P(y ∈ A, Sⁱy ∈ B)`.

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::koopman::SpectrumDescriptor;
use crate::number::{Angle, AngleArc};
use crate::rng::{MeanAcc, SeedStreams};
use crate::systems::{
    cylinder_measure, skew_power, BernoulliSpec, CylinderSet, SystemPoint, SystemSpec, TorusPoint,
};

/// Sets whose measure and membership are computable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "type")]
pub enum TestSet {
    Empty,
    /// `{u ∈ [a, b)}`, full in every other coordinate.
    Interval {
        a: f64,
        b: f64,
    },
    /// `[u0, u1) × [v0, v1)` on the torus.
    Rectangle {
        u: [f64; 2],
        v: [f64; 2],
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

impl TestSet {
    fn arcs(&self) -> Result<(Option<AngleArc>, Option<AngleArc>)> {
        Ok(match self {
            TestSet::Interval { a, b } | TestSet::Product { a, b, .. } => {
                (Some(test_arc(*a, *b)?), None)
            }
            TestSet::Rectangle { u, v } => {
                (Some(test_arc(u[0], u[1])?), Some(test_arc(v[0], v[1])?))
            }
            _ => (None, None),
        })
    }

    fn cylinder(&self) -> Option<&CylinderSet> {
        match self {
            TestSet::Cylinder { constraints } | TestSet::Product { constraints, .. } => {
                Some(constraints)
            }
            _ => None,
        }
    }

    /// Checks that the set lives on the system's space.
    pub fn validate_for(&self, system: &SystemSpec) -> Result<()> {
        self.arcs()?;
        let ok = match (self, system) {
            (TestSet::Empty, _) => true,
            (TestSet::Interval { .. }, s) => s.gamma().is_some(),
            (TestSet::Rectangle { .. }, SystemSpec::Skew { .. }) => true,
            (
                TestSet::Cylinder { .. },
                SystemSpec::Bernoulli { .. } | SystemSpec::Product { .. },
            ) => true,
            (TestSet::Product { .. }, SystemSpec::Product { .. }) => true,
            _ => false,
        };
        if !ok {
            return Err(Error::InvalidTestSet(format!(
                "{self:?} is not a subset of the {} space",
                system.kind_name()
            )));
        }
        if let (Some(c), Some(spec)) = (self.cylinder(), system.shift()) {
            c.validate(spec)?;
        }
        Ok(())
    }

    pub fn measure(&self, system: &SystemSpec) -> Result<f64> {
        self.validate_for(system)?;
        if *self == TestSet::Empty {
            return Ok(0.0);
        }
        let (u, v) = self.arcs()?;
        let cyl = match (self.cylinder(), system.shift()) {
            (Some(c), Some(spec)) => cylinder_measure(spec, c)?,
            _ => 1.0,
        };
        Ok(u.map_or(1.0, |a| a.measure()) * v.map_or(1.0, |a| a.measure()) * cyl)
    }

    pub fn contains(&self, system: &SystemSpec, x: &SystemPoint) -> Result<bool> {
        if *self == TestSet::Empty {
            return Ok(false);
        }
        let (u_arc, v_arc) = self.arcs()?;
        if let Some(arc) = u_arc {
            let u = x.u().ok_or_else(|| self.mismatch(x))?;
            if !arc.contains(u) {
                return Ok(false);
            }
        }
        if let Some(arc) = v_arc {
            let SystemPoint::Torus(p) = x else {
                return Err(self.mismatch(x));
            };
            if !arc.contains(p.v) {
                return Ok(false);
            }
        }
        if let Some(c) = self.cylinder() {
            let (Some(w), Some(spec)) = (x.window(), system.shift()) else {
                return Err(self.mismatch(x));
            };
            return c.contains(spec, w);
        }
        Ok(true)
    }

    fn mismatch(&self, x: &SystemPoint) -> Error {
        Error::InvalidTestSet(format!(
            "{self:?} cannot be tested on a {} point",
            x.kind_name()
        ))
    }

    /// Short text label for reports.
    pub fn label(&self) -> String {
        match self {
            TestSet::Empty => "empty".into(),
            TestSet::Interval { a, b } => format!("u in [{a},{b})"),
            TestSet::Rectangle { u, v } => {
                format!("u in [{},{}) x v in [{},{})", u[0], u[1], v[0], v[1])
            }
            TestSet::Cylinder { constraints } => cylinder_label(constraints),
            TestSet::Product { a, b, constraints } => {
                format!("u in [{a},{b}) x {}", cylinder_label(constraints))
            }
        }
    }
}

fn cylinder_label(c: &CylinderSet) -> String {
    let parts: Vec<String> = c
        .constraints()
        .iter()
        .map(|(p, s)| format!("w{p}={s}"))
        .collect();
    if parts.is_empty() {
        "all".into()
    } else {
        parts.join(" & ")
    }
}

fn test_arc(a: f64, b: f64) -> Result<AngleArc> {
    AngleArc::new(a, b).map_err(|e| Error::InvalidTestSet(e.to_string()))
}

/// Functions averaged along orbits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "type")]
pub enum Observable {
    One,
    Indicator {
        set: TestSet,
    },
    /// The circle coordinate in `[0, 1)`.
    U,
    /// The torus coordinate `v` in `[0, 1)`.
    V,
    /// The label of the symbol at `position`.
    Symbol {
        position: i64,
    },
}

impl Observable {
    pub fn eval(&self, system: &SystemSpec, x: &SystemPoint) -> Result<f64> {
        let missing = || {
            Error::InvalidArgument(format!(
                "{self:?} is undefined on a {} point",
                x.kind_name()
            ))
        };
        Ok(match self {
            Observable::One => 1.0,
            Observable::Indicator { set } => f64::from(u8::from(set.contains(system, x)?)),
            Observable::U => x.u().ok_or_else(missing)?.to_f64(),
            Observable::V => match x {
                SystemPoint::Torus(p) => p.v.to_f64(),
                _ => return Err(missing()),
            },
            Observable::Symbol { position } => {
                let (w, spec) = x.window().zip(system.shift()).ok_or_else(missing)?;
                let idx = w.get(*position).ok_or(Error::WindowExhausted(*position))?;
                spec.label(idx) as f64
            }
        })
    }
}

/// `(1/n) Σ_{j<n} f(S^j x0)`. Sequence points must carry enough of the
/// sequence for `n` steps.
pub fn birkhoff_average(
    system: &SystemSpec,
    f: &Observable,
    x0: &SystemPoint,
    n: u64,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let mut x = x0.clone();
    let mut sum = 0.0;
    for _ in 0..n {
        sum += f.eval(system, &x)?;
        x.advance(system)?;
    }
    Ok(sum / n as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum CorrelationMode {
    Exact,
    MonteCarlo { samples: usize },
}

impl CorrelationMode {
    pub fn name(&self) -> &'static str {
        match self {
            CorrelationMode::Exact => "exact",
            CorrelationMode::MonteCarlo { .. } => "monte-carlo",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationPoint {
    pub i: u64,
    pub value: f64,
    pub exact: bool,
    pub stderr: f64,
}

/// `|[θ + a₁, θ + b₁) ∩ [a₂, b₂)|` on the circle, splitting the moved arc at 1.
fn arc_overlap(theta: f64, a1: f64, b1: f64, a2: f64, b2: f64) -> f64 {
    let start = (a1 + theta).rem_euclid(1.0);
    let len = b1 - a1;
    let pieces = if start + len <= 1.0 {
        [(start, start + len), (0.0, 0.0)]
    } else {
        [(start, 1.0), (0.0, start + len - 1.0)]
    };
    pieces
        .iter()
        .map(|&(s, e)| (e.min(b2) - s.max(a2)).max(0.0))
        .sum()
}

fn u_bounds(set: &TestSet) -> Option<(f64, f64)> {
    match set {
        TestSet::Interval { a, b } | TestSet::Product { a, b, .. } => Some((*a, *b)),
        _ => None,
    }
}

fn exact_correlation(system: &SystemSpec, a: &TestSet, b: &TestSet, i: u64) -> Result<f64> {
    if *a == TestSet::Empty || *b == TestSet::Empty {
        return Ok(0.0);
    }
    let no_form = || {
        Error::NoClosedForm(format!(
            "μ(S^i(A) ∩ B) with A = {}, B = {} on the {} system",
            a.label(),
            b.label(),
            system.kind_name()
        ))
    };
    if matches!(a, TestSet::Rectangle { .. }) || matches!(b, TestSet::Rectangle { .. }) {
        return Err(no_form());
    }
    // circle factor: S^i moves the arc by iγ
    let circle = match (system.gamma(), u_bounds(a), u_bounds(b)) {
        (Some(g), Some((a1, b1)), Some((a2, b2))) => {
            let theta = g.multiple_mod_one(i as i64).to_f64();
            arc_overlap(theta, a1, b1, a2, b2)
        }
        (_, ua, ub) => ua.map_or(1.0, |(x, y)| y - x) * ub.map_or(1.0, |(x, y)| y - x),
    };
    // sequence factor: R^i(A) is A moved i places left
    let sequence = match (system.shift(), a.cylinder(), b.cylinder()) {
        (Some(spec), ca, cb) => {
            let moved = ca.cloned().unwrap_or_default().shifted(-(i as i64));
            match moved.intersect(cb.unwrap_or(&CylinderSet::everything())) {
                Some(c) => cylinder_measure(spec, &c)?,
                None => 0.0,
            }
        }
        (None, None, None) => 1.0,
        _ => return Err(no_form()),
    };
    Ok(circle * sequence)
}

/// Symbols drawn on demand at arbitrary positions, consistently.
struct SparseSequence<'a> {
    spec: &'a BernoulliSpec,
    drawn: Vec<(i64, u8)>,
}

impl<'a> SparseSequence<'a> {
    fn new(spec: &'a BernoulliSpec) -> Self {
        Self {
            spec,
            drawn: Vec::new(),
        }
    }

    fn get(&mut self, pos: i64, rng: &mut dyn RngCore) -> u8 {
        if let Some(&(_, s)) = self.drawn.iter().find(|d| d.0 == pos) {
            return s;
        }
        let s = self.spec.sample_index(rng);
        self.drawn.push((pos, s));
        s
    }

    fn satisfies(&mut self, c: &CylinderSet, offset: i64, rng: &mut dyn RngCore) -> Result<bool> {
        for &(p, s) in c.constraints() {
            let want = self.spec.index_of(s)?;
            if self.get(p + offset, rng) != want {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// One draw of `1[y ∈ A] · 1[Sⁱy ∈ B]`.
fn sample_indicator(
    system: &SystemSpec,
    a: &TestSet,
    b: &TestSet,
    i: u64,
    rng: &mut dyn RngCore,
) -> Result<bool> {
    let (au, av) = a.arcs()?;
    let (bu, bv) = b.arcs()?;
    let i = i as i64;
    let u = Angle(rng.next_u64());
    let gamma = system.gamma().map_or(Angle::ZERO, |g| g.angle());
    let (ui, vpair) = match system {
        SystemSpec::Skew { .. } => {
            let p = TorusPoint {
                u,
                v: Angle(rng.next_u64()),
            };
            let q = skew_power(p, gamma, i);
            (q.u, Some((p.v, q.v)))
        }
        _ => (u + gamma.times(i), None),
    };
    let arc_ok = |arc: Option<AngleArc>, x: Option<Angle>| {
        arc.is_none_or(|arc| x.is_some_and(|x| arc.contains(x)))
    };
    if !arc_ok(au, Some(u))
        || !arc_ok(bu, Some(ui))
        || !arc_ok(av, vpair.map(|p| p.0))
        || !arc_ok(bv, vpair.map(|p| p.1))
    {
        return Ok(false);
    }
    if let Some(spec) = system.shift() {
        let mut seq = SparseSequence::new(spec);
        if let Some(c) = a.cylinder() {
            if !seq.satisfies(c, 0, rng)? {
                return Ok(false);
            }
        }
        // (Rⁱy)_p = y_{p+i}
        if let Some(c) = b.cylinder() {
            if !seq.satisfies(c, i, rng)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `μ(Sⁱ(A) ∩ B)`, exactly or by sampling.
pub fn correlation(
    system: &SystemSpec,
    a: &TestSet,
    b: &TestSet,
    i: u64,
    mode: CorrelationMode,
    streams: &SeedStreams,
) -> Result<CorrelationPoint> {
    a.validate_for(system)?;
    b.validate_for(system)?;
    match mode {
        CorrelationMode::Exact => Ok(CorrelationPoint {
            i,
            value: exact_correlation(system, a, b, i)?,
            exact: true,
            stderr: 0.0,
        }),
        CorrelationMode::MonteCarlo { samples } => {
            if samples < 2 {
                return Err(Error::Undersampled(format!("{samples} samples")));
            }
            if *a == TestSet::Empty || *b == TestSet::Empty {
                return Ok(CorrelationPoint {
                    i,
                    value: 0.0,
                    exact: false,
                    stderr: 0.0,
                });
            }
            let parts = streams.child(&format!("correlation/{i}")).chunked(
                "indicator",
                samples,
                |rng, count| -> Result<MeanAcc> {
                    let mut acc = MeanAcc::default();
                    for _ in 0..count {
                        acc.push(f64::from(u8::from(sample_indicator(system, a, b, i, rng)?)));
                    }
                    Ok(acc)
                },
            );
            let acc = MeanAcc::merged(&parts.into_iter().collect::<Result<Vec<_>>>()?);
            Ok(CorrelationPoint {
                i,
                value: acc.mean(),
                exact: false,
                stderr: acc.stderr(),
            })
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakMixingStatistic {
    pub t: u64,
    pub value: f64,
    pub exact: bool,
    /// Mean per-term standard error (0 in exact mode).
    pub stderr: f64,
}

/// `(1/t) Σ_{i<t} |μ(Sⁱ(A) ∩ B) − μ(A)μ(B)|`.
pub fn weak_mixing_statistic(
    system: &SystemSpec,
    a: &TestSet,
    b: &TestSet,
    t: u64,
    mode: CorrelationMode,
    streams: &SeedStreams,
) -> Result<WeakMixingStatistic> {
    if t == 0 {
        return Err(Error::InvalidArgument("t must be at least 1".into()));
    }
    let target = a.measure(system)? * b.measure(system)?;
    let terms = (0..t)
        .into_par_iter()
        .map(|i| correlation(system, a, b, i, mode, streams))
        .collect::<Result<Vec<_>>>()?;
    let value = terms.iter().map(|c| (c.value - target).abs()).sum::<f64>() / t as f64;
    let stderr = terms.iter().map(|c| c.stderr).sum::<f64>() / t as f64;
    Ok(WeakMixingStatistic {
        t,
        value,
        exact: mode == CorrelationMode::Exact,
        stderr,
    })
}

/// Statistic at or below which a finite-`t` run is read as consistent with
/// weak mixing.
pub const MIXING_THRESHOLD: f64 = 0.01;
/// Statistic at or above which a run is read as not weakly mixing.
pub const NON_MIXING_THRESHOLD: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MixingVerdict {
    ConsistentWithWeakMixing,
    NotWeakMixing,
    Undecided,
}

impl MixingVerdict {
    /// A finite run can only falsify weak mixing, so the positive reading is
    /// "consistent with", never "weakly mixing".
    pub fn from_statistic(s: &WeakMixingStatistic) -> Self {
        if s.value <= MIXING_THRESHOLD {
            MixingVerdict::ConsistentWithWeakMixing
        } else if s.value >= NON_MIXING_THRESHOLD {
            MixingVerdict::NotWeakMixing
        } else {
            MixingVerdict::Undecided
        }
    }

    /// Agreement with a spectral weak-mixing answer; `None` when undecided.
    pub fn agrees_with(&self, spectral: bool) -> Option<bool> {
        match self {
            MixingVerdict::ConsistentWithWeakMixing => Some(spectral),
            MixingVerdict::NotWeakMixing => Some(!spectral),
            MixingVerdict::Undecided => None,
        }
    }
}

/// 1 is the only eigenvalue and it is simple.
pub fn spectral_weak_mixing_check(d: &SpectrumDescriptor) -> bool {
    d.is_weak_mixing()
}

/// The eigenvalue 1 is simple.
pub fn spectral_ergodicity_check(d: &SpectrumDescriptor) -> bool {
    d.is_ergodic()
}
