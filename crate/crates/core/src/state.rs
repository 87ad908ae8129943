//! Coefficients of the Q^{1,0} approximation: per phase cell, the value
//! `T + X xi + Y eta` with local spatial coordinates xi, eta in [-1, 1] and no
//! momentum dependence inside a cell.

use crate::grid::{BlockLayout, PhaseGrid};
use crate::material::MomentumTables;
use crate::quadrature::{gauss_legendre, energy_nodes};

#[derive(Debug, Clone, PartialEq)]
pub struct DgState {
    pub layout: BlockLayout,
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

/// Borrowed coefficient block of one spatial cell.
#[derive(Clone, Copy)]
pub struct Block<'a> {
    pub t: &'a [f64],
    pub x: &'a [f64],
    pub y: &'a [f64],
}

pub struct BlockMut<'a> {
    pub t: &'a mut [f64],
    pub x: &'a mut [f64],
    pub y: &'a mut [f64],
}

impl DgState {
    pub fn zeros(grid: &PhaseGrid) -> Self {
        let layout = BlockLayout::new(grid.nx(), grid.ny(), grid.n_momentum());
        let len = layout.blocks() * layout.block;
        DgState { layout, t: vec![0.0; len], x: vec![0.0; len], y: vec![0.0; len] }
    }

    pub fn block(&self, i: usize, j: usize) -> Block<'_> {
        let o = self.layout.offset(i, j);
        let b = self.layout.block;
        Block { t: &self.t[o..o + b], x: &self.x[o..o + b], y: &self.y[o..o + b] }
    }

    pub fn block_mut(&mut self, i: usize, j: usize) -> BlockMut<'_> {
        let o = self.layout.offset(i, j);
        let b = self.layout.block;
        BlockMut { t: &mut self.t[o..o + b], x: &mut self.x[o..o + b], y: &mut self.y[o..o + b] }
    }

    /// Copies block (si, sj) of `src` into block (i, j) of `self`.
    pub fn copy_block_from(&mut self, i: usize, j: usize, src: &DgState, si: usize, sj: usize) {
        let from = src.block(si, sj);
        let to = self.block_mut(i, j);
        to.t.copy_from_slice(from.t);
        to.x.copy_from_slice(from.x);
        to.y.copy_from_slice(from.y);
    }

    /// `self = a * self + b * other` over every coefficient.
    pub fn scale_add(&mut self, a: f64, b: f64, other: &DgState) {
        for (dst, src) in [(&mut self.t, &other.t), (&mut self.x, &other.x), (&mut self.y, &other.y)] {
            for (d, s) in dst.iter_mut().zip(src.iter()) {
                *d = a * *d + b * s;
            }
        }
    }

    /// Interior mass: sum of T times the phase-cell volume.
    pub fn total_mass(&self, grid: &PhaseGrid) -> f64 {
        let mom = momentum_volumes(grid);
        let mut total = 0.0;
        for (i, j) in self.layout.interior() {
            let area = grid.x.width(i - 1) * grid.y.width(j - 1);
            let b = self.block(i, j);
            let s: f64 = b.t.iter().zip(&mom).map(|(t, v)| t * v).sum();
            total += area * s;
        }
        total
    }

    /// Cell-mean density of interior cell (i, j).
    pub fn cell_density(&self, grid: &PhaseGrid, i: usize, j: usize) -> f64 {
        let mom = momentum_volumes(grid);
        self.block(i, j).t.iter().zip(&mom).map(|(t, v)| t * v).sum()
    }

    /// First non-finite interior coefficient, as (i, j, momentum index).
    pub fn find_non_finite(&self) -> Option<(usize, usize, usize)> {
        for (i, j) in self.layout.interior() {
            let b = self.block(i, j);
            for idx in 0..self.layout.block {
                if !(b.t[idx].is_finite() && b.x[idx].is_finite() && b.y[idx].is_finite()) {
                    return Some((i, j, idx));
                }
            }
        }
        None
    }

    /// L2 projection of `f(x, y, w, mu, phi)` using tensor Gauss rules
    /// (3 points per spatial axis, 4 per momentum axis with the energy substitution).
    pub fn project(grid: &PhaseGrid, f: impl Fn(f64, f64, f64, f64, f64) -> f64) -> Self {
        let mut state = DgState::zeros(grid);
        let s3 = gauss_legendre(3);
        let g4 = gauss_legendre(4);
        for (i, j) in state.layout.interior() {
            let (x0, hx) = (grid.x.center(i - 1), 0.5 * grid.x.width(i - 1));
            let (y0, hy) = (grid.y.center(j - 1), 0.5 * grid.y.width(j - 1));
            for idx in 0..grid.n_momentum() {
                let (k, m, n) = grid.momentum_cell(idx);
                let wn = energy_nodes(grid.w.lo(k), grid.w.hi(k), 4);
                let (mc, mh) = (grid.mu.center(m), 0.5 * grid.mu.width(m));
                let (pc, ph) = (grid.phi.center(n), 0.5 * grid.phi.width(n));
                let vol = grid.momentum_volume(k, m, n);
                let (mut t, mut xc, mut yc) = (0.0, 0.0, 0.0);
                for &(xi, wxi) in s3 {
                    for &(eta, weta) in s3 {
                        let mut mom = 0.0;
                        for &(w, ww) in &wn {
                            for &(a, wa) in g4 {
                                for &(b, wb) in g4 {
                                    mom += ww * wa * mh * wb * ph * f(x0 + hx * xi, y0 + hy * eta, w, mc + mh * a, pc + ph * b);
                                }
                            }
                        }
                        let wt = 0.25 * wxi * weta * mom / vol;
                        t += wt;
                        xc += 3.0 * wt * xi;
                        yc += 3.0 * wt * eta;
                    }
                }
                let o = state.layout.offset(i, j) + idx;
                state.t[o] = t;
                state.x[o] = xc;
                state.y[o] = yc;
            }
        }
        state
    }

    /// Projection of `density(i, j) * N exp(-w) s(w)` with N chosen so that the
    /// cell-mean density equals `density(i, j)`. Spatial slopes are zero.
    pub fn lattice_maxwellian(grid: &PhaseGrid, tables: &MomentumTables, density: impl Fn(usize, usize) -> f64) -> Self {
        let mut state = DgState::zeros(grid);
        let angle: f64 = (0..grid.nmu())
            .flat_map(|m| (0..grid.nphi()).map(move |n| (m, n)))
            .map(|(m, n)| grid.mu.width(m) * grid.phi.width(n))
            .sum();
        let norm: f64 = tables.maxwellian.iter().sum::<f64>() * angle;
        for (i, j) in state.layout.interior() {
            let rho = density(i, j);
            let o = state.layout.offset(i, j);
            for idx in 0..grid.n_momentum() {
                let (k, _, _) = grid.momentum_cell(idx);
                state.t[o + idx] = rho / norm * tables.maxwellian[k] / grid.w.width(k);
            }
        }
        state
    }
}

/// Momentum-cell volumes in flat momentum order.
pub fn momentum_volumes(grid: &PhaseGrid) -> Vec<f64> {
    (0..grid.n_momentum())
        .map(|idx| {
            let (k, m, n) = grid.momentum_cell(idx);
            grid.momentum_volume(k, m, n)
        })
        .collect()
}
