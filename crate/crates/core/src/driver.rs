//! Time integration of the coupled system. Every Runge-Kutta stage recomputes
//! the density, solves for the potential, refreshes the ghost cells and
//! assembles the kinetic right-hand side.

use crate::boundary::{KineticBoundary, Wall, WallModel, WallReflector, XBoundary};
use crate::collision::{CollisionModel, CollisionOperator};
use crate::error::{Error, Result};
use crate::grid::PhaseGrid;
use crate::material::{Dimensionless, MomentumTables};
use crate::observables;
use crate::poisson::{FieldSolution, LdgPoisson, PoissonBoundary, PoissonMesh};
use crate::state::DgState;
use crate::transport::{CellField, FluxTables, Transport};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Integrator {
    /// Two-stage strong-stability-preserving scheme (Heun).
    #[default]
    Rk2,
    /// Three-stage strong-stability-preserving scheme.
    Rk3,
}

impl Integrator {
    /// Convex combination weights `(a, b)` of `u = a u0 + b (u + dt L(u))` applied after each stage.
    pub fn stages(self) -> &'static [(f64, f64)] {
        match self {
            Integrator::Rk2 => &[(0.0, 1.0), (0.5, 0.5)],
            Integrator::Rk3 => &[(0.0, 1.0), (0.75, 0.25), (1.0 / 3.0, 2.0 / 3.0)],
        }
    }
}

/// Source of the electric field seen by the kinetic equation.
pub enum FieldSetup {
    /// Self-consistent field: the Poisson mesh stacks `kinetic_rows` silicon rows
    /// under any oxide rows, column by column in the kinetic x order.
    Poisson {
        mesh: PoissonMesh,
        boundary: PoissonBoundary,
        /// Dimensionless doping per Poisson cell, zero in the oxide.
        doping: Vec<f64>,
    },
    /// Fixed field per kinetic cell.
    Frozen(Vec<CellField>),
}

/// Everything needed to start a run, in dimensionless units.
pub struct Problem {
    pub grid: PhaseGrid,
    pub dims: Dimensionless,
    pub collisions: CollisionModel,
    pub bottom: WallModel,
    pub top: WallModel,
    pub x_boundary: XBoundary,
    /// Dimensionless doping per kinetic cell `i * ny + j` (zero-based).
    pub doping: Vec<f64>,
    pub field: FieldSetup,
    pub integrator: Integrator,
    pub cfl: f64,
}

enum FieldSource {
    Poisson { solver: LdgPoisson, doping: Vec<f64> },
    Frozen(Vec<CellField>),
}

/// Immutable pieces of the semi-discrete operator.
pub struct Operator {
    pub grid: PhaseGrid,
    pub dims: Dimensionless,
    pub tables: MomentumTables,
    pub flux: FluxTables,
    pub collisions: Option<CollisionOperator>,
    pub boundary: KineticBoundary,
    pub doping: Vec<f64>,
    field: FieldSource,
}

/// Field produced while evaluating one stage.
#[derive(Debug, Clone)]
pub struct StageField {
    pub cells: Vec<CellField>,
    pub solution: Option<FieldSolution>,
}

impl Operator {
    pub fn new(problem: Problem) -> Result<Self> {
        let Problem { grid, dims, collisions, bottom, top, x_boundary, doping, field, .. } = problem;
        let (nx, ny) = (grid.nx(), grid.ny());
        if doping.len() != nx * ny {
            return Err(Error::InvalidGrid(format!("doping has {} cells, grid has {}", doping.len(), nx * ny)));
        }
        let tables = MomentumTables::new(&grid, dims.band());
        let flux = FluxTables::new(&grid, &tables, &dims);
        let collisions = match collisions {
            CollisionModel::Off => None,
            model => Some(CollisionOperator::new(&grid, &tables, &dims, model)?),
        };
        let band = dims.band();
        let boundary = KineticBoundary {
            bottom: WallReflector::new(Wall::Bottom, bottom, &grid, &tables, band)?,
            top: WallReflector::new(Wall::Top, top, &grid, &tables, band)?,
            x: x_boundary,
        };
        let field = match field {
            FieldSetup::Frozen(cells) => {
                if cells.len() != nx * ny {
                    return Err(Error::InvalidGrid("frozen field does not match the grid".into()));
                }
                FieldSource::Frozen(cells)
            }
            FieldSetup::Poisson { mesh, boundary, doping } => {
                if mesh.nx() != nx || mesh.ny() < ny || doping.len() != mesh.cells() {
                    return Err(Error::InvalidGrid("Poisson mesh does not extend the kinetic grid".into()));
                }
                FieldSource::Poisson { solver: LdgPoisson::new(mesh, &boundary)?, doping }
            }
        };
        Ok(Operator { grid, dims, tables, flux, collisions, boundary, doping, field })
    }

    /// Refreshes the ghosts of `state`, solves for the field and writes the
    /// right-hand side into `rhs`.
    pub fn evaluate(&self, state: &mut DgState, rhs: &mut DgState) -> Result<StageField> {
        let ny = self.grid.ny();
        let doping = |i: usize, j: usize| self.doping[(i - 1) * ny + (j - 1)];
        self.boundary.apply(state, &self.grid, &doping)?;
        let field = self.field(state)?;
        let transport = Transport { grid: &self.grid, flux: &self.flux, collisions: self.collisions.as_ref() };
        transport.assemble(state, &field.cells, rhs)?;
        Ok(field)
    }

    /// Electric field of the current interior state.
    pub fn field(&self, state: &DgState) -> Result<StageField> {
        match &self.field {
            FieldSource::Frozen(cells) => Ok(StageField { cells: cells.clone(), solution: None }),
            FieldSource::Poisson { solver, doping } => {
                let mesh = solver.mesh();
                let (nx, ny, rows) = (self.grid.nx(), self.grid.ny(), mesh.ny());
                let rho = observables::density(state, &self.grid);
                let mut source = vec![[0.0; 3]; mesh.cells()];
                for i in 0..nx {
                    for j in 0..ny {
                        let c = mesh.cell(i, j);
                        let r = rho[i * ny + j];
                        source[c] = [self.dims.cp * (r[0] - doping[c]), self.dims.cp * r[1], self.dims.cp * r[2]];
                    }
                }
                let solution = solver.solve(&source)?;
                let cells = solution.cell_fields(rows, ny, self.dims.cv);
                Ok(StageField { cells, solution: Some(solution) })
            }
        }
    }

    /// Largest stable step for the given field: the CFL number over the fastest
    /// per-axis rate (cell-averaged speed over cell width), with the collision
    /// loss rate as one more rate.
    pub fn cfl_dt(&self, field: &[CellField], cfl: f64) -> Result<f64> {
        let g = &self.grid;
        let b = &self.flux.speed_bounds;
        let (mut ex, mut ey) = (0.0f64, 0.0f64);
        for f in field {
            ex = ex.max(f.ex.iter().fold(0.0f64, |m, v| m.max(v.abs())));
            ey = ey.max(f.ey.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        }
        let e = ex.hypot(ey);
        let rates = [
            b.x / g.x.min_width(),
            b.y / g.y.min_width(),
            b.w_per_field * e / g.w.min_width(),
            b.mu_per_field * e / g.mu.min_width(),
            b.phi_per_field * ey / g.phi.min_width(),
            self.collisions.as_ref().map_or(0.0, |c| c.max_loss_rate()),
        ];
        let rate = rates.iter().cloned().fold(0.0, f64::max);
        let dt = cfl / rate;
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Step(format!("degenerate time step {dt} (rates {rates:?})")));
        }
        Ok(dt)
    }

    /// Initial state: lattice Maxwellian with the doping density in every cell.
    pub fn initial_state(&self) -> DgState {
        let ny = self.grid.ny();
        DgState::lattice_maxwellian(&self.grid, &self.tables, |i, j| self.doping[(i - 1) * ny + (j - 1)])
    }
}

/// Running simulation.
pub struct Simulation {
    pub op: Operator,
    pub state: DgState,
    /// Dimensionless time.
    pub time: f64,
    pub steps: usize,
    pub initial_mass: f64,
    pub integrator: Integrator,
    pub cfl: f64,
    base: DgState,
    rhs: DgState,
    /// Field of the current state.
    field: StageField,
}

/// Callback invoked after every accepted step.
pub trait Observer {
    fn step(&mut self, _sim: &Simulation) -> Result<()> {
        Ok(())
    }
}

impl Observer for () {}

impl Simulation {
    pub fn new(problem: Problem) -> Result<Self> {
        let (integrator, cfl) = (problem.integrator, problem.cfl);
        if !(cfl > 0.0 && cfl.is_finite()) {
            return Err(Error::Step(format!("CFL number must be positive, got {cfl}")));
        }
        let op = Operator::new(problem)?;
        let state = op.initial_state();
        Self::with_state(op, state, integrator, cfl)
    }

    pub fn with_state(op: Operator, mut state: DgState, integrator: Integrator, cfl: f64) -> Result<Self> {
        let ny = op.grid.ny();
        let doping = |i: usize, j: usize| op.doping[(i - 1) * ny + (j - 1)];
        op.boundary.apply(&mut state, &op.grid, &doping)?;
        let field = op.field(&state)?;
        let initial_mass = state.total_mass(&op.grid);
        let rhs = DgState::zeros(&op.grid);
        let base = state.clone();
        Ok(Simulation { op, state, time: 0.0, steps: 0, initial_mass, integrator, cfl, base, rhs, field })
    }

    pub fn relative_mass(&self) -> f64 {
        observables::relative_mass(&self.state, &self.op.grid, self.initial_mass)
    }

    /// Field of the current state.
    pub fn field(&self) -> &StageField {
        &self.field
    }

    /// Step size the CFL condition allows for the current state.
    pub fn stable_dt(&self) -> Result<f64> {
        self.op.cfl_dt(&self.field.cells, self.cfl)
    }

    /// Advances by `dt`, re-solving the field at every stage.
    pub fn step(&mut self, dt: f64) -> Result<()> {
        self.base.clone_from(&self.state);
        for (s, &(a, b)) in self.integrator.stages().iter().enumerate() {
            if s == 0 {
                // The field of the current state is already known; refresh ghosts only.
                let ny = self.op.grid.ny();
                let doping = |i: usize, j: usize| self.op.doping[(i - 1) * ny + (j - 1)];
                self.op.boundary.apply(&mut self.state, &self.op.grid, &doping)?;
                let transport = Transport {
                    grid: &self.op.grid,
                    flux: &self.op.flux,
                    collisions: self.op.collisions.as_ref(),
                };
                transport.assemble(&self.state, &self.field.cells, &mut self.rhs)?;
            } else {
                self.op.evaluate(&mut self.state, &mut self.rhs)?;
            }
            self.state.scale_add(1.0, dt, &self.rhs);
            if a != 0.0 {
                self.state.scale_add(b, a, &self.base);
            }
        }
        self.time += dt;
        self.steps += 1;
        if let Some((i, j, idx)) = self.state.find_non_finite() {
            let (k, m, n) = self.op.grid.momentum_cell(idx);
            return Err(Error::NonFinite { i, j, k, m, n });
        }
        // Ghosts of the new state feed the field and the next step.
        let ny = self.op.grid.ny();
        let doping = |i: usize, j: usize| self.op.doping[(i - 1) * ny + (j - 1)];
        self.op.boundary.apply(&mut self.state, &self.op.grid, &doping)?;
        self.field = self.op.field(&self.state)?;
        Ok(())
    }

    /// Integrates to `t_end` with CFL-limited steps that land exactly on `t_end`.
    pub fn advance_to(&mut self, t_end: f64, observer: &mut dyn Observer) -> Result<()> {
        while self.time < t_end * (1.0 - 1e-14) {
            let dt = self.stable_dt()?.min(t_end - self.time);
            self.step(dt)?;
            observer.step(self)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::material::{Material, Scales};
    use crate::poisson::EdgeCondition;

    fn problem(collisions: CollisionModel, x_boundary: XBoundary, field: Option<FieldSetup>) -> Problem {
        let dims = Dimensionless::new(&Material::default(), &Scales::default()).unwrap();
        let grid = PhaseGrid::build(&GridSpec {
            lx: 0.15,
            ly: 0.012,
            w_max: 6.0 * dims.gamma,
            nx: 6,
            ny: 3,
            nw: 12,
            nmu: 4,
            nphi: 4,
            align_to: Some(dims.gamma),
        })
        .unwrap();
        let nd = 1e24 / dims.density_scale_m3;
        let (nx, ny) = (grid.nx(), grid.ny());
        let field = field.unwrap_or_else(|| {
            let mesh = PoissonMesh::new(grid.x.clone(), grid.y.clone(), vec![11.7; nx * ny]).unwrap();
            let boundary = PoissonBoundary::uniform(
                nx,
                ny,
                EdgeCondition::Dirichlet(0.5235),
                EdgeCondition::Dirichlet(1.5235),
                EdgeCondition::Neumann,
                EdgeCondition::Neumann,
            );
            FieldSetup::Poisson { mesh, boundary, doping: vec![nd; nx * ny] }
        });
        Problem {
            grid,
            dims,
            collisions,
            bottom: WallModel::Specular,
            top: WallModel::Diffusive,
            x_boundary,
            doping: vec![nd; nx * ny],
            field,
            integrator: Integrator::Rk2,
            cfl: 0.2,
        }
    }

    #[test]
    fn stage_weights_are_convex() {
        for integ in [Integrator::Rk2, Integrator::Rk3] {
            for &(a, b) in integ.stages() {
                assert!(a >= 0.0 && b > 0.0 && (a + b - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn uniform_equilibrium_without_field_is_a_fixed_point() {
        let p = problem(CollisionModel::Off, XBoundary::Periodic, Some(FieldSetup::Frozen(vec![CellField::default(); 18])));
        let mut sim = Simulation::new(p).unwrap();
        let before = sim.state.clone();
        let dt = sim.stable_dt().unwrap();
        sim.step(dt).unwrap();
        for (i, j) in before.layout.interior() {
            let (a, b) = (before.block(i, j), sim.state.block(i, j));
            for idx in 0..a.t.len() {
                assert!((a.t[idx] - b.t[idx]).abs() <= 1e-14 * a.t[idx].abs().max(1e-300));
                assert!(b.x[idx].abs() < 1e-12 * a.t[idx].abs() + 1e-300);
            }
        }
    }

    #[test]
    fn periodic_step_conserves_mass() {
        for coll in [CollisionModel::Off, CollisionModel::Full] {
            let mut sim = Simulation::new(problem(coll, XBoundary::Periodic, None)).unwrap();
            for _ in 0..5 {
                let dt = sim.stable_dt().unwrap();
                sim.step(dt).unwrap();
            }
            assert!((sim.relative_mass() - 1.0).abs() < 1e-12, "{}", sim.relative_mass());
        }
    }

    #[test]
    fn cfl_step_scales_with_cell_width() {
        let p = problem(CollisionModel::Off, XBoundary::Periodic, Some(FieldSetup::Frozen(vec![CellField::default(); 18])));
        let op = Operator::new(p).unwrap();
        let dt = op.cfl_dt(&vec![CellField::default(); 18], 0.2).unwrap();
        let rate = op.flux.speed_bounds.y / op.grid.y.min_width();
        assert!((dt - 0.2 / rate).abs() < 1e-15 * dt);

        let mut p2 = problem(CollisionModel::Off, XBoundary::Periodic, Some(FieldSetup::Frozen(vec![CellField::default(); 18])));
        p2.grid = PhaseGrid::build(&GridSpec {
            lx: 0.3,
            ly: 0.024,
            w_max: 6.0 * p2.dims.gamma,
            nx: 6,
            ny: 3,
            nw: 12,
            nmu: 4,
            nphi: 4,
            align_to: Some(p2.dims.gamma),
        })
        .unwrap();
        let op2 = Operator::new(p2).unwrap();
        let dt2 = op2.cfl_dt(&vec![CellField::default(); 18], 0.2).unwrap();
        assert!((dt2 / dt - 2.0).abs() < 1e-12);
    }

    #[test]
    fn diode_step_keeps_state_finite_and_lands_on_end_time() {
        let mut sim = Simulation::new(problem(CollisionModel::Full, XBoundary::ChargeNeutral, None)).unwrap();
        let dt = sim.stable_dt().unwrap();
        sim.advance_to(2.5 * dt, &mut ()).unwrap();
        assert_eq!(sim.steps, 3);
        assert!((sim.time - 2.5 * dt).abs() < 1e-15);
        assert!(sim.state.find_non_finite().is_none());
    }
}
