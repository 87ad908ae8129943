//! Built-in order studies: the Poisson solver against a manufactured solution
//! and collisionless, field-free kinetic advection against its exact solution.

use crate::boundary::{WallModel, XBoundary};
use crate::collision::CollisionModel;
use crate::driver::{FieldSetup, Integrator, Problem, Simulation};
use crate::error::Result;
use crate::grid::{Axis, GridSpec, PhaseGrid};
use crate::material::{Dimensionless, Material, Scales};
use crate::poisson::{EdgeCondition, LdgPoisson, PoissonBoundary, PoissonMesh};
use crate::quadrature::gauss_legendre;
use crate::state::DgState;
use crate::transport::CellField;
use std::f64::consts::PI;

/// Errors on successively refined meshes.
#[derive(Debug, Clone, PartialEq)]
pub struct Study {
    pub cells: Vec<usize>,
    pub errors: Vec<f64>,
}

impl Study {
    /// Observed orders between consecutive refinements (each halving the mesh width).
    pub fn orders(&self) -> Vec<f64> {
        self.errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
    }

    pub fn min_order(&self) -> f64 {
        self.orders().into_iter().fold(f64::INFINITY, f64::min)
    }
}

/// P1 projection of `f` onto every cell of `mesh`.
pub fn project_cells(mesh: &PoissonMesh, f: impl Fn(f64, f64) -> f64) -> Vec<[f64; 3]> {
    let gl = gauss_legendre(4);
    let mut out = vec![[0.0; 3]; mesh.cells()];
    for i in 0..mesh.nx() {
        for j in 0..mesh.ny() {
            let (hx, hy) = (0.5 * mesh.x.width(i), 0.5 * mesh.y.width(j));
            let c = &mut out[mesh.cell(i, j)];
            for &(xi, wx) in gl {
                for &(eta, wy) in gl {
                    let v = 0.25 * wx * wy * f(mesh.x.center(i) + hx * xi, mesh.y.center(j) + hy * eta);
                    c[0] += v;
                    c[1] += 3.0 * v * xi;
                    c[2] += 3.0 * v * eta;
                }
            }
        }
    }
    out
}

/// `cos(pi x / lx) cos(pi y / ly)` with matching Dirichlet data on the x-ends and
/// zero normal derivative on the y-ends, on a device-shaped domain.
pub fn poisson_study(sizes: &[usize]) -> Result<Study> {
    let (lx, ly, eps) = (0.15, 0.012, 11.7);
    let exact = |x: f64, y: f64| (PI * x / lx).cos() * (PI * y / ly).cos();
    let lap = -eps * PI * PI * (1.0 / (lx * lx) + 1.0 / (ly * ly));
    let mut errors = Vec::new();
    for &n in sizes {
        let mesh = PoissonMesh::new(Axis::uniform(0.0, lx, n)?, Axis::uniform(0.0, ly, n)?, vec![eps; n * n])?;
        let boundary = PoissonBoundary::uniform(
            n,
            n,
            EdgeCondition::Dirichlet(0.0),
            EdgeCondition::Dirichlet(0.0),
            EdgeCondition::Neumann,
            EdgeCondition::Neumann,
        );
        let solver = LdgPoisson::new(mesh.clone(), &boundary)?;
        let source = project_cells(&mesh, |x, y| lap * exact(x, y));
        let sol = solver.solve_with_dirichlet(&source, exact)?;
        errors.push(sol.l2_error(&mesh, exact));
    }
    Ok(Study { cells: sizes.to_vec(), errors })
}

/// Periodic advection of `(1 + sin(2 pi x)/2) exp(-w)` between specular walls.
///
/// Each momentum cell carries a single-signed velocity, so the exact solution of
/// the momentum-discrete system translates the profile with the cell-mean velocity.
pub fn transport_study(sizes: &[usize]) -> Result<Study> {
    let dims = Dimensionless::new(&Material::default(), &Scales::default())?;
    let (lx, t_end) = (1.0, 1.0);
    let profile = |x: f64| 1.0 + 0.5 * (2.0 * PI * x / lx).sin();
    let mut errors = Vec::new();
    for &nx in sizes {
        let grid = PhaseGrid::build(&GridSpec {
            lx,
            ly: 0.1,
            w_max: 6.0,
            nx,
            ny: 2,
            nw: 4,
            nmu: 2,
            nphi: 2,
            align_to: None,
        })?;
        let cells = nx * grid.ny();
        let init = DgState::project(&grid, |x, _, w, _, _| profile(x) * (-w).exp());
        let weights = DgState::project(&grid, |_, _, w, _, _| (-w).exp());
        let problem = Problem {
            grid,
            dims: dims.clone(),
            collisions: CollisionModel::Off,
            bottom: WallModel::Specular,
            top: WallModel::Specular,
            x_boundary: XBoundary::Periodic,
            doping: vec![1.0; cells],
            field: FieldSetup::Frozen(vec![CellField::default(); cells]),
            integrator: Integrator::Rk3,
            cfl: 0.1,
        };
        let op = crate::driver::Operator::new(problem)?;
        let mut sim = Simulation::with_state(op, init, Integrator::Rk3, 0.1)?;
        sim.advance_to(t_end, &mut ())?;

        let g = &sim.op.grid;
        let gl = gauss_legendre(4);
        let mut sum = 0.0;
        for (i, j) in sim.state.layout.interior() {
            let b = sim.state.block(i, j);
            let m = weights.block(i, j);
            let (xc, hx) = (g.x.center(i - 1), 0.5 * g.x.width(i - 1));
            let hy = g.y.width(j - 1);
            for idx in 0..g.n_momentum() {
                let (k, mm, n) = g.momentum_cell(idx);
                let vol = g.momentum_volume(k, mm, n);
                let v = sim.op.flux.vx(idx) / vol;
                for &(xi, w) in gl {
                    let exact = m.t[idx] * profile(xc + hx * xi - v * t_end);
                    let e = b.t[idx] + b.x[idx] * xi - exact;
                    sum += w * hx * hy * vol * e * e;
                }
            }
        }
        errors.push(sum.sqrt());
    }
    Ok(Study { cells: sizes.to_vec(), errors })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_of_exact_halving() {
        let s = Study { cells: vec![4, 8, 16], errors: vec![1.0, 0.25, 0.0625] };
        assert_eq!(s.orders(), vec![2.0, 2.0]);
        assert_eq!(s.min_order(), 2.0);
    }

    #[test]
    fn coarse_transport_study_converges() {
        let s = transport_study(&[8, 16]).unwrap();
        assert!(s.errors[1] < s.errors[0], "{s:?}");
    }
}
