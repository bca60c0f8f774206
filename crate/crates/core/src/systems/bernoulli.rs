// SPDX-License-Identifier: Apache-2.0

//! Bernoulli shifts: probability vectors, cylinder sets and symbol windows.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Probabilities `p_1, …, p_n` over a labeled alphabet.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BernoulliDoc", into = "BernoulliDoc")]
pub struct BernoulliSpec {
    probs: Vec<f64>,
    symbols: Vec<i64>,
    cumulative: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BernoulliDoc {
    pub probs: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbols: Option<Vec<i64>>,
}

impl TryFrom<BernoulliDoc> for BernoulliSpec {
    type Error = Error;

    fn try_from(doc: BernoulliDoc) -> Result<Self> {
        BernoulliSpec::new(doc.probs, doc.symbols)
    }
}

impl From<BernoulliSpec> for BernoulliDoc {
    fn from(spec: BernoulliSpec) -> Self {
        BernoulliDoc {
            probs: spec.probs,
            symbols: Some(spec.symbols),
        }
    }
}

/// Default labels: `{-1, 1}` for two symbols, `0..n` otherwise.
pub fn default_symbols(n: usize) -> Vec<i64> {
    if n == 2 {
        vec![-1, 1]
    } else {
        (0..n as i64).collect()
    }
}

impl BernoulliSpec {
    pub fn new(probs: Vec<f64>, symbols: Option<Vec<i64>>) -> Result<Self> {
        let symbols = symbols.unwrap_or_else(|| default_symbols(probs.len()));
        if probs.len() < 2 {
            return Err(Error::InvalidBernoulli("need at least two symbols".into()));
        }
        if probs.len() > u8::MAX as usize {
            return Err(Error::InvalidBernoulli("at most 255 symbols".into()));
        }
        if symbols.len() != probs.len() {
            return Err(Error::InvalidBernoulli(format!(
                "{} probabilities but {} symbols",
                probs.len(),
                symbols.len()
            )));
        }
        for (i, &p) in probs.iter().enumerate() {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::InvalidBernoulli(format!(
                    "probability {p} at index {i} is outside (0, 1)"
                )));
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-15 {
            return Err(Error::InvalidBernoulli(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        let mut sorted = symbols.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidBernoulli("symbols must be distinct".into()));
        }
        let cumulative = probs
            .iter()
            .scan(0.0, |acc, &p| {
                *acc += p;
                Some(*acc)
            })
            .collect();
        Ok(Self {
            probs,
            symbols,
            cumulative,
        })
    }

    /// `(1/2, 1/2)` on `{-1, 1}`.
    pub fn fair_coin() -> Self {
        Self::new(vec![0.5, 0.5], None).expect("valid constant")
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(vec![1.0 / n as f64; n], None)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn symbols(&self) -> &[i64] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn index_of(&self, symbol: i64) -> Result<u8> {
        self.symbols
            .iter()
            .position(|&s| s == symbol)
            .map(|i| i as u8)
            .ok_or(Error::UnknownSymbol(symbol))
    }

    pub fn label(&self, index: u8) -> i64 {
        self.symbols[index as usize]
    }

    pub fn prob(&self, index: u8) -> f64 {
        self.probs[index as usize]
    }

    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> u8 {
        let x: f64 = rng.random();
        self.cumulative
            .iter()
            .position(|&c| x < c)
            .unwrap_or(self.probs.len() - 1) as u8
    }

    /// An orthonormal basis `φ_0 = 1, φ_1, …, φ_{n-1}` of `L²(p)` on one
    /// site, as a table `basis[j][symbol]`. Products of the nontrivial `φ_j`
    /// over finitely many positions are the cylinder characters.
    pub fn site_basis(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        let inner = |a: &[f64], b: &[f64]| -> f64 {
            a.iter()
                .zip(b)
                .zip(&self.probs)
                .map(|((x, y), p)| x * y * p)
                .sum()
        };
        let mut basis: Vec<Vec<f64>> = vec![vec![1.0; n]];
        for s in 0..n - 1 {
            let mut v = vec![0.0; n];
            v[s] = 1.0;
            for b in &basis {
                let c = inner(&v, b);
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= c * bi;
                }
            }
            let norm = inner(&v, &v).sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
            basis.push(v);
        }
        basis
    }
}

/// The cylinder `{w : w_{i_1} = e_1, …, w_{i_n} = e_n}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<(i64, i64)>", into = "Vec<(i64, i64)>")]
pub struct CylinderSet {
    constraints: Vec<(i64, i64)>,
}

impl TryFrom<Vec<(i64, i64)>> for CylinderSet {
    type Error = Error;

    fn try_from(c: Vec<(i64, i64)>) -> Result<Self> {
        CylinderSet::new(c)
    }
}

impl From<CylinderSet> for Vec<(i64, i64)> {
    fn from(c: CylinderSet) -> Self {
        c.constraints
    }
}

impl CylinderSet {
    /// Constraints `(position, symbol)`; sorted by position, which must be
    /// distinct.
    pub fn new(mut constraints: Vec<(i64, i64)>) -> Result<Self> {
        constraints.sort_unstable();
        if constraints.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidCylinder("positions must be distinct".into()));
        }
        Ok(Self { constraints })
    }

    /// The whole space.
    pub fn everything() -> Self {
        Self::default()
    }

    pub fn single(position: i64, symbol: i64) -> Self {
        Self {
            constraints: vec![(position, symbol)],
        }
    }

    pub fn constraints(&self) -> &[(i64, i64)] {
        &self.constraints
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    /// Translates all positions by `offset`.
    pub fn shifted(&self, offset: i64) -> Self {
        Self {
            constraints: self
                .constraints
                .iter()
                .map(|&(p, s)| (p + offset, s))
                .collect(),
        }
    }

    /// Intersection, or `None` when the cylinders disagree at some position.
    pub fn intersect(&self, other: &CylinderSet) -> Option<CylinderSet> {
        let mut merged = self.constraints.clone();
        for &(p, s) in &other.constraints {
            match merged.iter().find(|c| c.0 == p) {
                Some(&(_, t)) if t != s => return None,
                Some(_) => {}
                None => merged.push((p, s)),
            }
        }
        merged.sort_unstable();
        Some(CylinderSet {
            constraints: merged,
        })
    }

    /// `(min, max)` position, if any constraint exists.
    pub fn extent(&self) -> Option<(i64, i64)> {
        Some((self.constraints.first()?.0, self.constraints.last()?.0))
    }

    pub fn validate(&self, spec: &BernoulliSpec) -> Result<()> {
        for &(_, s) in &self.constraints {
            spec.index_of(s)?;
        }
        Ok(())
    }

    pub fn contains(&self, spec: &BernoulliSpec, w: &SymbolWindow) -> Result<bool> {
        for &(p, s) in &self.constraints {
            let idx = w.get(p).ok_or(Error::WindowExhausted(p))?;
            if spec.label(idx) != s {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// `ρ(C) = p_{e_1} ⋯ p_{e_n}`.
pub fn cylinder_measure(spec: &BernoulliSpec, c: &CylinderSet) -> Result<f64> {
    c.constraints
        .iter()
        .try_fold(1.0, |acc, &(_, s)| Ok(acc * spec.prob(spec.index_of(s)?)))
}

/// A finite window of a bi-infinite sequence: `symbols[j]` is the alphabet
/// index of coordinate `anchor + j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymbolWindow {
    anchor: i64,
    symbols: Vec<u8>,
}

impl SymbolWindow {
    pub fn new(anchor: i64, symbols: Vec<u8>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::InvalidArgument("empty symbol window".into()));
        }
        Ok(Self { anchor, symbols })
    }

    pub fn anchor(&self) -> i64 {
        self.anchor
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Inclusive range of coordinates held.
    pub fn span(&self) -> (i64, i64) {
        (self.anchor, self.anchor + self.symbols.len() as i64 - 1)
    }

    pub fn get(&self, position: i64) -> Option<u8> {
        let j = position.checked_sub(self.anchor)?;
        usize::try_from(j)
            .ok()
            .and_then(|j| self.symbols.get(j).copied())
    }

    /// `R`: the coordinate at index `i` becomes the old coordinate `i + 1`.
    pub fn shift(&self) -> Self {
        self.shift_by(1)
    }

    /// `R^n` for any integer `n`.
    pub fn shift_by(&self, n: i64) -> Self {
        Self {
            anchor: self.anchor - n,
            symbols: self.symbols.clone(),
        }
    }

    pub(crate) fn shift_in_place(&mut self, n: i64) {
        self.anchor -= n;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cylinder_measure_examples() {
        let fair = BernoulliSpec::fair_coin();
        let c = CylinderSet::new(vec![(0, 1), (1, -1)]).unwrap();
        assert_eq!(cylinder_measure(&fair, &c).unwrap(), 0.25);
        assert_eq!(
            cylinder_measure(&fair, &CylinderSet::everything()).unwrap(),
            1.0
        );
        let skewed = BernoulliSpec::new(vec![0.3, 0.7], None).unwrap();
        let c = CylinderSet::single(5, -1);
        assert_eq!(cylinder_measure(&skewed, &c).unwrap(), 0.3);
        assert_eq!(
            cylinder_measure(&fair, &CylinderSet::single(0, 7)),
            Err(Error::UnknownSymbol(7))
        );
    }

    #[test]
    fn spec_validation() {
        assert!(BernoulliSpec::new(vec![1.0], None).is_err());
        assert!(BernoulliSpec::new(vec![0.5, 0.6], None).is_err());
        assert!(BernoulliSpec::new(vec![0.0, 1.0], None).is_err());
        assert!(BernoulliSpec::new(vec![0.5, 0.5], Some(vec![1, 1])).is_err());
        assert!(BernoulliSpec::new(vec![0.5, 0.5], Some(vec![1])).is_err());
        assert!(CylinderSet::new(vec![(0, 1), (0, -1)]).is_err());
    }

    #[test]
    fn site_basis_is_orthonormal() {
        let spec = BernoulliSpec::new(vec![0.5, 0.25, 0.125, 0.125], None).unwrap();
        let basis = spec.site_basis();
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let ip: f64 = (0..4).map(|s| a[s] * b[s] * spec.probs()[s]).sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((ip - expected).abs() < 1e-12, "<{i},{j}> = {ip}");
            }
        }
    }

    #[test]
    fn shift_moves_the_anchor() {
        let w = SymbolWindow::new(0, vec![1, 0, 1]).unwrap();
        let r = w.shift();
        assert_eq!(r.anchor(), -1);
        assert_eq!(r.symbols(), w.symbols());
        // new coordinate i holds old coordinate i + 1
        assert_eq!(r.get(0), w.get(1));
        assert_eq!(r.shift_by(-1), w);
        assert_eq!(w.shift_by(5).anchor(), -5);
        assert!(SymbolWindow::new(0, vec![]).is_err());
    }

    #[test]
    fn intersection_detects_conflicts() {
        let a = CylinderSet::new(vec![(0, 1), (2, -1)]).unwrap();
        let b = CylinderSet::new(vec![(2, -1), (3, 1)]).unwrap();
        assert_eq!(a.intersect(&b).unwrap().constraints().len(), 3);
        assert!(a.intersect(&CylinderSet::single(0, -1)).is_none());
    }
}
