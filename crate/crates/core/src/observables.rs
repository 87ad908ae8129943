//! Kinetic moments of the DG state. Every moment is linear in the state and
//! keeps the P1 spatial structure, so each field is a `[T, X, Y]` triple per
//! interior cell, stored in the order `i * ny + j` (zero-based).

use crate::grid::PhaseGrid;
use crate::material::{Dimensionless, MomentumTables};
use crate::state::{momentum_volumes, DgState};
use crate::transport::FluxTables;

/// Moment fields, each as P1 coefficients per interior cell.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentFields {
    pub nx: usize,
    pub ny: usize,
    pub rho: Vec<[f64; 3]>,
    /// Particle fluxes: integrals of the velocity components times the distribution.
    pub ux: Vec<[f64; 3]>,
    pub uy: Vec<[f64; 3]>,
    /// Integral of w times the distribution.
    pub energy_density: Vec<[f64; 3]>,
}

/// Weighted momentum sums of the three coefficient arrays of every interior cell.
fn weighted(state: &DgState, grid: &PhaseGrid, weight: &[f64]) -> Vec<[f64; 3]> {
    let mut out = Vec::with_capacity(grid.nx() * grid.ny());
    for (i, j) in state.layout.interior() {
        let b = state.block(i, j);
        let dot = |c: &[f64]| c.iter().zip(weight).map(|(a, w)| a * w).sum::<f64>();
        out.push([dot(b.t), dot(b.x), dot(b.y)]);
    }
    out
}

/// Density: the distribution integrated over each momentum cell.
pub fn density(state: &DgState, grid: &PhaseGrid) -> Vec<[f64; 3]> {
    weighted(state, grid, &momentum_volumes(grid))
}

/// Total interior mass over its value at the start of the run.
pub fn relative_mass(state: &DgState, grid: &PhaseGrid, initial: f64) -> f64 {
    state.total_mass(grid) / initial
}

pub fn moments(state: &DgState, grid: &PhaseGrid, tables: &MomentumTables, flux: &FluxTables) -> MomentFields {
    let nmom = grid.n_momentum();
    let vx: Vec<f64> = (0..nmom).map(|idx| flux.vx(idx)).collect();
    let vy: Vec<f64> = (0..nmom).map(|idx| flux.vy(idx)).collect();
    let w: Vec<f64> = (0..nmom)
        .map(|idx| {
            let (k, m, n) = grid.momentum_cell(idx);
            tables.energy_mean[k] * grid.momentum_volume(k, m, n)
        })
        .collect();
    MomentFields {
        nx: grid.nx(),
        ny: grid.ny(),
        rho: density(state, grid),
        ux: weighted(state, grid, &vx),
        uy: weighted(state, grid, &vy),
        energy_density: weighted(state, grid, &w),
    }
}

/// Cell means of the moments in physical units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalMeans {
    pub rho_cm3: f64,
    pub energy_ev: f64,
    /// Particle fluxes in units of 1e28 / (cm^2 s).
    pub ux: f64,
    pub uy: f64,
    pub vx_cm_s: f64,
    pub vy_cm_s: f64,
}

impl MomentFields {
    /// Mean energy per particle of cell `c` in thermal units.
    pub fn mean_energy(&self, c: usize) -> f64 {
        guarded(self.energy_density[c][0], self.rho[c][0])
    }

    /// Mean velocities of cell `c` in scaled units.
    pub fn mean_velocity(&self, c: usize) -> (f64, f64) {
        (guarded(self.ux[c][0], self.rho[c][0]), guarded(self.uy[c][0], self.rho[c][0]))
    }

    pub fn physical(&self, c: usize, dims: &Dimensionless) -> PhysicalMeans {
        let (vx, vy) = self.mean_velocity(c);
        let flux_scale = dims.density_scale_m3 * dims.velocity_scale_m_s * 1e-4 / 1e28;
        PhysicalMeans {
            rho_cm3: self.rho[c][0] * dims.density_scale_m3 * 1e-6,
            energy_ev: self.mean_energy(c) * dims.thermal_energy_ev,
            ux: self.ux[c][0] * flux_scale,
            uy: self.uy[c][0] * flux_scale,
            vx_cm_s: vx * dims.velocity_scale_m_s * 100.0,
            vy_cm_s: vy * dims.velocity_scale_m_s * 100.0,
        }
    }

    /// Density-weighted mean energy over the domain, in thermal units.
    pub fn domain_mean_energy(&self) -> f64 {
        let e: f64 = self.energy_density.iter().map(|v| v[0]).sum();
        let r: f64 = self.rho.iter().map(|v| v[0]).sum();
        guarded(e, r)
    }

    /// Mean cell density over the two rows touching the y-walls.
    pub fn wall_row_density(&self) -> f64 {
        let rows = [0, self.ny - 1];
        let sum: f64 = (0..self.nx).flat_map(|i| rows.map(|j| self.rho[i * self.ny + j][0])).sum();
        sum / (2 * self.nx) as f64
    }

    /// Mean of |Vx| over cells.
    pub fn domain_mean_abs_vx(&self) -> f64 {
        let n = self.rho.len() as f64;
        (0..self.rho.len()).map(|c| self.mean_velocity(c).0.abs()).sum::<f64>() / n
    }
}

/// `num / den`, or zero where the density vanishes.
fn guarded(num: f64, den: f64) -> f64 {
    if den.abs() > f64::MIN_POSITIVE {
        num / den
    } else {
        0.0
    }
}
