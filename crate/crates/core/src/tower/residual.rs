// SPDX-License-Identifier: Apache-2.0

//! Truncated search for quasi-eigenfunctions `g∘T ≈ δ·e^{2πiku}·g`.
//!
//! Trial functions are `g = Σ c_A(u) χ_A`, where `χ_A` runs over the cylinder
//! characters supported in the window `{0, …, N−1}` (plus the constant) and
//! each `c_A` is a trigonometric polynomial of degree at most `L` in `u`.
//! Since `χ_A ∘ R = χ_{A+1}`, characters sharing a pattern form a chain of
//! translates inside the window, and the quadratic form decouples over
//! chains: the problem splits into one block per chain length, each solved
//! on a uniform `u`-grid.
//!
//! For unit `c`, `‖A_U c − δ A_K c‖² = 2 − 2 Re(δ̄ ⟨A_K c, A_U c⟩)`, so the
//! optimal `δ` is the phase of `c* M c` with `M = A_K* A_U`, and minimizing
//! over `c` means maximizing `λ_max((e^{−iθ}M + e^{iθ}M*)/2)` over `θ`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::systems::SystemSpec;

/// Default degree of the `u`-polynomials.
pub const DEFAULT_BAND: u32 = 4;

const THETA_SCAN: usize = 72;
const GOLDEN_STEPS: usize = 60;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "type")]
pub enum Block {
    /// Functions of `u` alone.
    Constant,
    /// Coefficients on a chain of `length` translates of one pattern.
    Chain { length: u32 },
    /// Row `m` of the torus basis (skew system).
    Row { m: i64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockResidual {
    pub block: Block,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub system: String,
    pub k: i64,
    pub truncation: u32,
    pub band: u32,
    pub grid: usize,
    pub residual: f64,
    /// `δ = e^{2πi·delta_turns}` at the minimizer.
    pub delta_turns: f64,
    pub best_block: Block,
    /// `‖c_j‖` for each slot of the minimizing block.
    pub profile: Vec<f64>,
    pub blocks: Vec<BlockResidual>,
}

/// Smallest admissible default grid.
pub fn default_grid(spec: &SystemSpec, k: i64, n: u32, band: u32) -> usize {
    let span = frequency_span(spec, k, n, band);
    (4 * n as usize)
        .max(2 * span as usize + 2)
        .next_power_of_two()
}

/// Largest difference between output frequencies.
fn frequency_span(spec: &SystemSpec, k: i64, n: u32, band: u32) -> i64 {
    let l = band as i64;
    match spec {
        SystemSpec::Skew { .. } => 2 * l + n as i64 + k.abs(),
        _ => 2 * l + k.abs(),
    }
}

struct BlockShape {
    block: Block,
    slots: usize,
    comps: usize,
    /// `(slot, component, extra frequency)` of the composed part `g∘T`.
    shifted: Vec<(usize, usize, i64)>,
    /// `(slot, component)` of the multiplied part `e^{2πiku}·g`.
    multiplied: Vec<(usize, usize)>,
}

impl BlockShape {
    fn single(block: Block, extra: i64) -> Self {
        Self {
            block,
            slots: 1,
            comps: 1,
            shifted: vec![(0, 0, extra)],
            multiplied: vec![(0, 0)],
        }
    }

    /// `χ_{P+j}` for `j < n`: the composed part lands one step further.
    fn chain(n: usize) -> Self {
        Self {
            block: Block::Chain { length: n as u32 },
            slots: n,
            comps: n + 1,
            shifted: (0..n).map(|j| (j, j + 1, 0)).collect(),
            multiplied: (0..n).map(|j| (j, j)).collect(),
        }
    }
}

struct Grid {
    g: usize,
    band: i64,
    k: i64,
    gamma: f64,
}

impl Grid {
    fn width(&self) -> usize {
        2 * self.band as usize + 1
    }

    fn wave(&self, freq: f64, node: usize) -> Complex64 {
        let u = node as f64 / self.g as f64;
        Complex64::from_polar(
            1.0 / (self.g as f64).sqrt(),
            std::f64::consts::TAU * freq * u,
        )
    }

    fn operators(&self, b: &BlockShape) -> (DMatrix<Complex64>, DMatrix<Complex64>) {
        let rows = b.comps * self.g;
        let cols = b.slots * self.width();
        let mut au = DMatrix::zeros(rows, cols);
        let mut ak = DMatrix::zeros(rows, cols);
        for &(slot, comp, extra) in &b.shifted {
            for (i, l) in (-self.band..=self.band).enumerate() {
                let shift =
                    Complex64::from_polar(1.0, std::f64::consts::TAU * l as f64 * self.gamma);
                for node in 0..self.g {
                    au[(comp * self.g + node, slot * self.width() + i)] =
                        shift * self.wave((l + extra) as f64, node);
                }
            }
        }
        for &(slot, comp) in &b.multiplied {
            for (i, l) in (-self.band..=self.band).enumerate() {
                for node in 0..self.g {
                    ak[(comp * self.g + node, slot * self.width() + i)] =
                        self.wave((l + self.k) as f64, node);
                }
            }
        }
        (au, ak)
    }
}

fn top_eigen(m: &DMatrix<Complex64>, theta: f64) -> (f64, DVector<Complex64>) {
    let rot = Complex64::from_polar(1.0, -theta);
    let h = (m * rot + m.adjoint() * rot.conj()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    let (idx, &val) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty block");
    (val, eig.eigenvectors.column(idx).into_owned())
}

fn solve_block(grid: &Grid, shape: &BlockShape) -> (f64, f64, DVector<Complex64>) {
    let (au, ak) = grid.operators(shape);
    let m = ak.adjoint() * &au;
    let best_theta = if shape.slots > 1 {
        // conjugating by diag(e^{ijφ}) over chain positions turns M into
        // e^{iφ}M, so the top eigenvalue does not depend on θ
        0.0
    } else {
        let step = std::f64::consts::TAU / THETA_SCAN as f64;
        let (i, _) = (0..THETA_SCAN)
            .map(|i| (i, top_eigen(&m, i as f64 * step).0))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("scan is nonempty");
        golden_max(
            |t| top_eigen(&m, t).0,
            (i as f64 - 1.0) * step,
            (i as f64 + 1.0) * step,
        )
    };
    let (_, c) = top_eigen(&m, best_theta);
    let overlap = (c.adjoint() * &m * &c)[(0, 0)];
    let delta = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let residual = (&au * &c - &ak * &c * delta).norm();
    (residual, delta.arg() / std::f64::consts::TAU, c)
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..GOLDEN_STEPS {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        }
    }
    (a + b) / 2.0
}

/// Minimizes `‖g∘T − δe^{2πiku}g‖` over unit `g` in the truncated span and
/// unimodular `δ`. `grid = None` picks [`default_grid`].
pub fn quasi_eigen_residual_search(
    spec: &SystemSpec,
    k: i64,
    n: u32,
    band: u32,
    grid: Option<usize>,
) -> Result<ResidualReport> {
    let gamma = match spec {
        SystemSpec::Product { gamma, .. } | SystemSpec::Skew { gamma } => gamma.value_f64(),
        other => {
            return Err(Error::Unsupported {
                kind: other.kind_name(),
                what: "residual search needs a product or skew system".into(),
            })
        }
    };
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "truncation N = {n} must be at least 2"
        )));
    }
    let g = grid.unwrap_or_else(|| default_grid(spec, k, n, band));
    if g < 4 * n as usize {
        return Err(Error::DegenerateGrid(format!(
            "G = {g} is below 4N = {}",
            4 * n
        )));
    }
    let span = frequency_span(spec, k, n, band);
    if span >= g as i64 {
        return Err(Error::DegenerateGrid(format!(
            "frequencies spread over {span} but the grid has only {g} nodes"
        )));
    }
    let shapes: Vec<BlockShape> = match spec {
        SystemSpec::Skew { .. } => (-(n as i64)..=n as i64)
            .map(|m| BlockShape::single(Block::Row { m }, m))
            .collect(),
        _ => std::iter::once(BlockShape::single(Block::Constant, 0))
            .chain((1..=n as usize).map(BlockShape::chain))
            .collect(),
    };
    let grid = Grid {
        g,
        band: band as i64,
        k,
        gamma,
    };
    let mut best: Option<(f64, f64, &BlockShape, DVector<Complex64>)> = None;
    let mut blocks = Vec::with_capacity(shapes.len());
    for shape in &shapes {
        let (residual, delta, c) = solve_block(&grid, shape);
        blocks.push(BlockResidual {
            block: shape.block,
            residual,
        });
        if best.as_ref().is_none_or(|b| residual < b.0 - 1e-12) {
            best = Some((residual, delta, shape, c));
        }
    }
    let (residual, delta_turns, shape, c) = best.expect("at least one block");
    let width = grid.width();
    let profile = (0..shape.slots)
        .map(|s| c.rows(s * width, width).norm())
        .collect();
    Ok(ResidualReport {
        system: spec.kind_name().to_string(),
        k,
        truncation: n,
        band,
        grid: g,
        residual,
        delta_turns,
        best_block: shape.block,
        profile,
        blocks,
    })
}
