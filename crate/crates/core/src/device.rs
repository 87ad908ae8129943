//! Turns a run configuration into the dimensionless problem the driver integrates.
//!
//! The bulk diode solves Poisson on the kinetic mesh with contacts at both x-ends.
//! The double-gate MOSFET models the half device above its symmetry plane: the
//! Poisson mesh stacks oxide rows on top of the silicon, the gate sits on the
//! top edge of the oxide, and source and drain cover the silicon rows only.

use crate::boundary::XBoundary;
use crate::collision::CollisionModel;
use crate::config::{DeviceKind, RunConfig};
use crate::driver::{FieldSetup, Problem};
use crate::error::Result;
use crate::grid::{Axis, GridSpec, PhaseGrid};
use crate::material::Dimensionless;
use crate::poisson::{EdgeCondition, PoissonBoundary, PoissonMesh};

/// Doping (1/m^3) at a point, from the background and the last region containing it.
pub fn doping_at(cfg: &RunConfig, x_um: f64, y_um: f64) -> f64 {
    cfg.doping
        .region
        .iter()
        .rev()
        .find(|r| r.x_um[0] <= x_um && x_um <= r.x_um[1] && r.y_um[0] <= y_um && y_um <= r.y_um[1])
        .map_or(cfg.doping.background_m3, |r| r.value_m3)
}

pub fn dimensionless(cfg: &RunConfig) -> Result<Dimensionless> {
    Dimensionless::new(&cfg.material, &cfg.scales)
}

pub fn phase_grid(cfg: &RunConfig, dims: &Dimensionless) -> Result<PhaseGrid> {
    let g = &cfg.grid;
    let to_scaled = 1e-6 / cfg.scales.length_m;
    let dw = dims.gamma / g.cells_per_phonon as f64;
    PhaseGrid::build(&GridSpec {
        lx: cfg.device.length_um * to_scaled,
        ly: cfg.device.height_um * to_scaled,
        w_max: dw * g.nw as f64,
        nx: g.nx,
        ny: g.ny,
        nw: g.nw,
        nmu: g.nmu,
        nphi: g.nphi,
        align_to: (cfg.run.collisions == CollisionModel::Full).then_some(dims.gamma),
    })
}

pub fn build_problem(cfg: &RunConfig) -> Result<Problem> {
    cfg.validate()?;
    let dims = dimensionless(cfg)?;
    let grid = phase_grid(cfg, &dims)?;
    let (nx, ny) = (grid.nx(), grid.ny());
    let um = cfg.scales.length_m / 1e-6;
    let scale = 1.0 / dims.density_scale_m3;
    let doping: Vec<f64> = (0..nx)
        .flat_map(|i| (0..ny).map(move |j| (i, j)))
        .map(|(i, j)| scale * doping_at(cfg, grid.x.center(i) * um, grid.y.center(j) * um))
        .collect();

    let v = 1.0 / cfg.scales.voltage_v;
    let (source, drain, gate) = (
        EdgeCondition::Dirichlet(cfg.bias.source_v * v),
        EdgeCondition::Dirichlet(cfg.bias.drain_v * v),
        EdgeCondition::Dirichlet(cfg.bias.gate_v * v),
    );
    let field = match cfg.device.kind {
        DeviceKind::BulkDiode => {
            let mesh = PoissonMesh::new(grid.x.clone(), grid.y.clone(), vec![cfg.material.eps_silicon; nx * ny])?;
            let boundary = PoissonBoundary::uniform(nx, ny, source, drain, EdgeCondition::Neumann, EdgeCondition::Neumann);
            FieldSetup::Poisson { mesh, boundary, doping: doping.clone() }
        }
        DeviceKind::Dgmosfet => {
            let d = &cfg.device;
            let rows = d.oxide_rows;
            let t_ox = d.oxide_um / um;
            let mut edges = grid.y.edges().to_vec();
            let top = grid.y.end();
            edges.extend((1..=rows).map(|r| top + t_ox * r as f64 / rows as f64));
            let y = Axis::from_edges(edges)?;
            let total = ny + rows;
            let mut eps = Vec::with_capacity(nx * total);
            let mut pdoping = Vec::with_capacity(nx * total);
            for i in 0..nx {
                for j in 0..total {
                    let silicon = j < ny;
                    eps.push(if silicon { cfg.material.eps_silicon } else { cfg.material.eps_oxide });
                    pdoping.push(if silicon { doping[i * ny + j] } else { 0.0 });
                }
            }
            let (g0, g1) = (d.gate_start_um / um, d.gate_end_um / um);
            let mut boundary = PoissonBoundary::uniform(nx, total, source, drain, EdgeCondition::Neumann, EdgeCondition::Neumann);
            for j in ny..total {
                boundary.left[j] = EdgeCondition::Neumann;
                boundary.right[j] = EdgeCondition::Neumann;
            }
            for i in 0..nx {
                let xc = grid.x.center(i);
                if g0 <= xc && xc <= g1 {
                    boundary.top[i] = gate;
                }
            }
            let mesh = PoissonMesh::new(grid.x.clone(), y, eps)?;
            FieldSetup::Poisson { mesh, boundary, doping: pdoping }
        }
    };
    Ok(Problem {
        grid,
        dims,
        collisions: cfg.run.collisions,
        bottom: cfg.boundary.bottom,
        top: cfg.boundary.top,
        x_boundary: cfg.boundary.x,
        doping,
        field,
        integrator: cfg.run.integrator,
        cfl: cfg.run.cfl,
    })
}

/// Whether the x-ends exchange particles with contacts.
pub fn has_contacts(cfg: &RunConfig) -> bool {
    cfg.boundary.x == XBoundary::ChargeNeutral
}
