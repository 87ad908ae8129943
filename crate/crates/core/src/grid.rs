//! Tensor-product phase-space grid over (x, y, w, mu, phi).
//!
//! Spatial cells are addressed with ghost-inclusive indices: interior cells are
//! `1..=nx` and `1..=ny`, ghosts sit at `0` and `nx + 1` / `ny + 1`. Momentum
//! cells are zero-based `(k, m, n)` with `n` varying fastest.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Relative tolerance used when checking that the energy step divides the phonon energy.
pub const ALIGNMENT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    edges: Vec<f64>,
}

impl Axis {
    pub fn uniform(lo: f64, hi: f64, cells: usize) -> Result<Self> {
        if cells == 0 {
            return Err(Error::InvalidGrid("axis needs at least one cell".into()));
        }
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidGrid(format!("degenerate axis [{lo}, {hi}]")));
        }
        let h = (hi - lo) / cells as f64;
        let mut edges: Vec<f64> = (0..=cells).map(|c| lo + h * c as f64).collect();
        edges[cells] = hi;
        Ok(Axis { edges })
    }

    pub fn from_edges(edges: Vec<f64>) -> Result<Self> {
        if edges.len() < 2 || edges.windows(2).any(|e| !(e[1] > e[0])) {
            return Err(Error::InvalidGrid("axis edges must be strictly increasing".into()));
        }
        Ok(Axis { edges })
    }

    pub fn len(&self) -> usize {
        self.edges.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn lo(&self, c: usize) -> f64 {
        self.edges[c]
    }

    pub fn hi(&self, c: usize) -> f64 {
        self.edges[c + 1]
    }

    pub fn width(&self, c: usize) -> f64 {
        self.edges[c + 1] - self.edges[c]
    }

    pub fn center(&self, c: usize) -> f64 {
        0.5 * (self.edges[c] + self.edges[c + 1])
    }

    pub fn start(&self) -> f64 {
        self.edges[0]
    }

    pub fn end(&self) -> f64 {
        self.edges[self.len()]
    }

    pub fn min_width(&self) -> f64 {
        (0..self.len()).map(|c| self.width(c)).fold(f64::INFINITY, f64::min)
    }

    pub fn is_uniform(&self, rtol: f64) -> bool {
        let h = (self.end() - self.start()) / self.len() as f64;
        (0..self.len()).all(|c| (self.width(c) - h).abs() <= rtol * h)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub lx: f64,
    pub ly: f64,
    pub w_max: f64,
    pub nx: usize,
    pub ny: usize,
    pub nw: usize,
    pub nmu: usize,
    pub nphi: usize,
    /// When set, the energy step must divide this phonon energy exactly.
    pub align_to: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrid {
    pub x: Axis,
    pub y: Axis,
    pub w: Axis,
    pub mu: Axis,
    pub phi: Axis,
    /// Energy cells per phonon energy when the grid is aligned.
    pub phonon_shift: Option<usize>,
}

impl PhaseGrid {
    pub fn build(spec: &GridSpec) -> Result<Self> {
        if spec.nphi % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "the angle phi needs an even number of cells, got {}",
                spec.nphi
            )));
        }
        if spec.nmu < 1 {
            return Err(Error::InvalidGrid("mu needs at least one cell".into()));
        }
        let x = Axis::uniform(0.0, spec.lx, spec.nx)?;
        let y = Axis::uniform(0.0, spec.ly, spec.ny)?;
        let w = Axis::uniform(0.0, spec.w_max, spec.nw)?;
        let mu = Axis::uniform(-1.0, 1.0, spec.nmu)?;
        let phi = Axis::uniform(0.0, PI, spec.nphi)?;
        let phonon_shift = match spec.align_to {
            None => None,
            Some(gamma) => Some(phonon_shift(gamma, w.width(0))?),
        };
        Ok(PhaseGrid { x, y, w, mu, phi, phonon_shift })
    }

    pub fn nx(&self) -> usize {
        self.x.len()
    }
    pub fn ny(&self) -> usize {
        self.y.len()
    }
    pub fn nw(&self) -> usize {
        self.w.len()
    }
    pub fn nmu(&self) -> usize {
        self.mu.len()
    }
    pub fn nphi(&self) -> usize {
        self.phi.len()
    }

    pub fn w_max(&self) -> f64 {
        self.w.end()
    }

    /// Number of momentum cells per spatial cell.
    pub fn n_momentum(&self) -> usize {
        self.nw() * self.nmu() * self.nphi()
    }

    /// Flat momentum index with `n` fastest.
    #[inline]
    pub fn momentum_index(&self, k: usize, m: usize, n: usize) -> usize {
        (k * self.nmu() + m) * self.nphi() + n
    }

    pub fn momentum_cell(&self, idx: usize) -> (usize, usize, usize) {
        let n = idx % self.nphi();
        let m = (idx / self.nphi()) % self.nmu();
        let k = idx / (self.nphi() * self.nmu());
        (k, m, n)
    }

    /// Index of the phi cell mirrored about pi/2.
    #[inline]
    pub fn mirror_phi(&self, n: usize) -> usize {
        self.nphi() - 1 - n
    }

    pub fn momentum_volume(&self, k: usize, m: usize, n: usize) -> f64 {
        self.w.width(k) * self.mu.width(m) * self.phi.width(n)
    }

    /// Volume of interior spatial cell (i, j) (ghost-inclusive indices) times momentum cell (k, m, n).
    pub fn cell_volume(&self, i: usize, j: usize, k: usize, m: usize, n: usize) -> f64 {
        self.x.width(i - 1) * self.y.width(j - 1) * self.momentum_volume(k, m, n)
    }

    /// Whether the phi edges are symmetric about pi/2.
    pub fn phi_is_symmetric(&self) -> bool {
        let np = self.nphi();
        (0..=np).all(|e| (self.phi.edges()[e] + self.phi.edges()[np - e] - PI).abs() < 1e-12)
    }
}

/// Mirrored phi index in one-based numbering, `n' = nphi - n + 1`.
pub fn reflect_phi_index(n: usize, nphi: usize) -> usize {
    nphi - n + 1
}

/// Number of energy cells spanned by one phonon energy, or an error when they do not align.
pub fn phonon_shift(gamma: f64, dw: f64) -> Result<usize> {
    let ratio = gamma / dw;
    let g = ratio.round();
    if g < 1.0 || (ratio - g).abs() > ALIGNMENT_TOL * ratio {
        return Err(Error::MisalignedEnergyGrid { gamma, dw, ratio });
    }
    Ok(g as usize)
}

/// Ghost-inclusive spatial block layout shared by the kinetic state arrays.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockLayout {
    pub nx: usize,
    pub ny: usize,
    pub block: usize,
}

impl BlockLayout {
    pub fn new(nx: usize, ny: usize, block: usize) -> Self {
        BlockLayout { nx, ny, block }
    }

    pub fn blocks(&self) -> usize {
        (self.nx + 2) * (self.ny + 2)
    }

    #[inline]
    pub fn block_index(&self, i: usize, j: usize) -> usize {
        i * (self.ny + 2) + j
    }

    #[inline]
    pub fn offset(&self, i: usize, j: usize) -> usize {
        self.block_index(i, j) * self.block
    }

    /// Interior spatial cells in storage order.
    pub fn interior(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (1..=self.nx).flat_map(move |i| (1..=self.ny).map(move |j| (i, j)))
    }
}
