//! Ghost-layer boundary conditions.
//!
//! The y-walls reflect electrons: specularly, diffusively into a lattice
//! Maxwellian, or a mix of both weighted by a specularity `p` that is either
//! constant or momentum dependent (Soffer roughness model). Every kinetic wall
//! model fills the inflow half of the ghost layer so that the discrete normal
//! flux through the wall vanishes identically. The x-ends are either periodic
//! or charge-neutral contacts.

use crate::error::{Error, Result};
use crate::grid::PhaseGrid;
use crate::material::{integrate_energy_angle, Band, MomentumTables};
use crate::state::DgState;
use crate::transport::{y_face_flux, FluxTables};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WallModel {
    Specular,
    Diffusive,
    /// Constant specularity in [0, 1].
    Mixed(f64),
    /// Soffer specularity `exp(-4 eta^2 w (1 + alpha w) sin^2 phi)` with roughness `eta`.
    Soffer(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wall {
    Bottom,
    Top,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XBoundary {
    ChargeNeutral,
    Periodic,
}

impl WallModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            WallModel::Mixed(p) if !(0.0..=1.0).contains(&p) => {
                Err(Error::InvalidBoundary(format!("specularity must lie in [0, 1], got {p}")))
            }
            WallModel::Soffer(eta) if !(eta >= 0.0 && eta.is_finite()) => {
                Err(Error::InvalidBoundary(format!("roughness must be non-negative, got {eta}")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for WallModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WallModel::Specular => write!(f, "specular"),
            WallModel::Diffusive => write!(f, "diffusive"),
            WallModel::Mixed(p) => write!(f, "mixed:{p}"),
            WallModel::Soffer(eta) => write!(f, "soffer:{eta}"),
        }
    }
}

impl FromStr for WallModel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let number = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("bad number `{v}`: {e}"));
        let model = match s.split_once(':') {
            None if s == "specular" => WallModel::Specular,
            None if s == "diffusive" => WallModel::Diffusive,
            Some(("mixed", v)) => WallModel::Mixed(number(v)?),
            Some(("soffer", v)) => WallModel::Soffer(number(v)?),
            _ => {
                return Err(format!(
                    "unknown wall condition `{s}` (expected specular, diffusive, mixed:<p> or soffer:<eta>)"
                ))
            }
        };
        model.validate().map_err(|e| e.to_string())?;
        Ok(model)
    }
}

impl Serialize for WallModel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for WallModel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for XBoundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            XBoundary::ChargeNeutral => "neutral",
            XBoundary::Periodic => "periodic",
        })
    }
}

impl FromStr for XBoundary {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "neutral" => Ok(XBoundary::ChargeNeutral),
            "periodic" => Ok(XBoundary::Periodic),
            _ => Err(format!("unknown x boundary `{s}` (expected neutral or periodic)")),
        }
    }
}

impl Serialize for XBoundary {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for XBoundary {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Specularity data of a partially diffusive wall on the `(k, n)` energy-angle cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Specularity {
    /// Cell average of p.
    pub mean: Vec<f64>,
    /// Cell average of (1 - p) exp(-w) s(w): the shape of the re-emitted distribution.
    pub emission: Vec<f64>,
}

impl Specularity {
    pub fn new(model: WallModel, grid: &PhaseGrid, tables: &MomentumTables, band: Band) -> Result<Self> {
        model.validate()?;
        let (nw, np) = (grid.nw(), grid.nphi());
        let mut mean = vec![0.0; nw * np];
        let mut emission = vec![0.0; nw * np];
        for k in 0..nw {
            let maxw = tables.maxwellian[k] / grid.w.width(k);
            for n in 0..np {
                let (p, e) = match model {
                    WallModel::Specular => (1.0, 0.0),
                    WallModel::Diffusive => (0.0, maxw),
                    WallModel::Mixed(p) => (p, (1.0 - p) * maxw),
                    WallModel::Soffer(eta) => {
                        let spec = |w: f64, phi: f64| {
                            let s = phi.sin();
                            (-4.0 * eta * eta * band.wavenumber(w).powi(2) * s * s).exp()
                        };
                        let wr = (grid.w.lo(k), grid.w.hi(k));
                        let pr = (grid.phi.lo(n), grid.phi.hi(n));
                        let area = grid.w.width(k) * grid.phi.width(n);
                        let pm = integrate_energy_angle(spec, wr, pr, 8) / area;
                        let em = integrate_energy_angle(
                            |w, phi| (1.0 - spec(w, phi)) * (-w).exp() * band.jacobian(w),
                            wr,
                            pr,
                            8,
                        ) / area;
                        (pm, em)
                    }
                };
                mean[k * np + n] = p;
                emission[k * np + n] = e;
            }
        }
        Ok(Specularity { mean, emission })
    }
}

/// Fills the ghost row of one y-wall.
#[derive(Debug, Clone)]
pub struct WallReflector {
    pub wall: Wall,
    pub model: WallModel,
    /// `None` when the wall is purely specular.
    kinetic: Option<(Specularity, f64)>,
    /// speed * sin_polar * |cos| per momentum cell.
    weight: Vec<f64>,
    nphi: usize,
    nmu: usize,
    nw: usize,
}

impl WallReflector {
    pub fn new(wall: Wall, model: WallModel, grid: &PhaseGrid, tables: &MomentumTables, band: Band) -> Result<Self> {
        model.validate()?;
        if !grid.phi_is_symmetric() {
            return Err(Error::InvalidBoundary("reflection needs phi edges symmetric about pi/2".into()));
        }
        let weight = (0..grid.n_momentum())
            .map(|idx| {
                let (k, m, n) = grid.momentum_cell(idx);
                tables.speed[k] * tables.sin_polar[m] * tables.cos_phi(n).abs()
            })
            .collect();
        let mut r = WallReflector {
            wall,
            model,
            kinetic: None,
            weight,
            nphi: grid.nphi(),
            nmu: grid.nmu(),
            nw: grid.nw(),
        };
        if model != WallModel::Specular {
            let spec = Specularity::new(model, grid, tables, band)?;
            match r.normalization(&spec) {
                Ok(c) => r.kinetic = Some((spec, c)),
                Err(Error::PurelySpecular) => {}
                Err(e) => return Err(e),
            }
        }
        Ok(r)
    }

    /// Whether phi cell `n` carries electrons into the domain through this wall.
    #[inline]
    pub fn is_inflow(&self, n: usize) -> bool {
        match self.wall {
            Wall::Top => n >= self.nphi / 2,
            Wall::Bottom => n < self.nphi / 2,
        }
    }

    /// Normalisation constant of the re-emitted distribution.
    pub fn normalization(&self, spec: &Specularity) -> Result<f64> {
        let mut inv = 0.0;
        for k in 0..self.nw {
            for m in 0..self.nmu {
                for n in (0..self.nphi).filter(|&n| self.is_inflow(n)) {
                    let idx = (k * self.nmu + m) * self.nphi + n;
                    inv += self.weight[idx] * spec.emission[k * self.nphi + n];
                }
            }
        }
        if inv <= 0.0 {
            return Err(Error::PurelySpecular);
        }
        Ok(1.0 / inv)
    }

    /// Normalisation of the diffusive part, or `PurelySpecular` if there is none.
    pub fn mixed_normalization(&self) -> Result<f64> {
        self.kinetic.as_ref().map(|(_, c)| *c).ok_or(Error::PurelySpecular)
    }

    fn rows(&self, ny: usize) -> (usize, usize) {
        match self.wall {
            Wall::Top => (ny, ny + 1),
            Wall::Bottom => (1, 0),
        }
    }

    /// Outflow moments of T, X, Y minus the specularly returned inflow part.
    fn emitted_moments(&self, state: &DgState, i: usize, j: usize, spec: Option<&Specularity>) -> [f64; 3] {
        let b = state.block(i, j);
        let np = self.nphi;
        let mut sigma = [0.0; 3];
        for idx in 0..b.t.len() {
            let n = idx % np;
            let w = self.weight[idx];
            if !self.is_inflow(n) {
                sigma[0] += w * b.t[idx];
                sigma[1] += w * b.x[idx];
                sigma[2] += w * b.y[idx];
            } else if let Some(spec) = spec {
                let k = idx / (np * self.nmu);
                let p = spec.mean[k * np + n];
                let mirror = idx - n + (np - 1 - n);
                sigma[0] -= w * p * b.t[mirror];
                sigma[1] -= w * p * b.x[mirror];
                sigma[2] -= w * p * b.y[mirror];
            }
        }
        sigma
    }

    /// Writes the inflow half of the ghost row from the adjacent interior row.
    pub fn apply(&self, state: &mut DgState) {
        let (nx, ny) = (state.layout.nx, state.layout.ny);
        let (inner, ghost) = self.rows(ny);
        let np = self.nphi;
        let nb = state.layout.block;
        for i in 1..=nx {
            let src_off = state.layout.offset(i, inner);
            let dst_off = state.layout.offset(i, ghost);
            match &self.kinetic {
                None => {
                    for idx in 0..nb {
                        let n = idx % np;
                        if !self.is_inflow(n) {
                            continue;
                        }
                        let mirror = src_off + idx - n + (np - 1 - n);
                        state.t[dst_off + idx] = state.t[mirror];
                        state.x[dst_off + idx] = state.x[mirror];
                        state.y[dst_off + idx] = -state.y[mirror];
                    }
                }
                Some((spec, norm)) => {
                    let sigma = self.emitted_moments(state, i, inner, Some(spec));
                    for idx in 0..nb {
                        let n = idx % np;
                        if !self.is_inflow(n) {
                            continue;
                        }
                        let k = idx / (np * self.nmu);
                        let p = spec.mean[k * np + n];
                        let e = norm * spec.emission[k * np + n];
                        let mirror = src_off + idx - n + (np - 1 - n);
                        state.t[dst_off + idx] = p * state.t[mirror] + e * sigma[0];
                        state.x[dst_off + idx] = p * state.x[mirror] + e * sigma[1];
                        state.y[dst_off + idx] = -(p * state.y[mirror] + e * sigma[2]);
                    }
                }
            }
        }
    }
}

/// Net and absolute normal flux through a wall above one boundary cell, for the
/// constant and linear (in x) parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WallFlux {
    pub constant: f64,
    pub linear: f64,
    /// Sum of absolute contributions, the natural scale for the residual.
    pub magnitude: f64,
}

impl WallFlux {
    pub fn relative_residual(&self) -> f64 {
        if self.magnitude == 0.0 {
            0.0
        } else {
            self.constant.abs().max(self.linear.abs()) / self.magnitude
        }
    }
}

/// Discrete normal flux through `wall` for every boundary cell, evaluated with
/// the same upwind formula as the transport right-hand side.
pub fn wall_flux(state: &DgState, flux: &FluxTables, wall: Wall) -> Vec<WallFlux> {
    let (nx, ny) = (state.layout.nx, state.layout.ny);
    let (lower, upper) = match wall {
        Wall::Top => (ny, ny + 1),
        Wall::Bottom => (0, 1),
    };
    (1..=nx)
        .map(|i| {
            let lo = state.block(i, lower);
            let hi = state.block(i, upper);
            let mut out = WallFlux { constant: 0.0, linear: 0.0, magnitude: 0.0 };
            for idx in 0..lo.t.len() {
                let (vp, vm) = (flux.vy_pos[idx], flux.vy_neg[idx]);
                let (f0, f1) = y_face_flux(vp, vm, (lo.t[idx], lo.x[idx], lo.y[idx]), (hi.t[idx], hi.x[idx], hi.y[idx]));
                out.constant += f0;
                out.linear += f1;
                out.magnitude += vp.abs() * ((lo.t[idx] + lo.y[idx]).abs() + lo.x[idx].abs())
                    + vm.abs() * ((hi.t[idx] - hi.y[idx]).abs() + hi.x[idx].abs());
            }
            out
        })
        .collect()
}

/// Fills the x ghost columns for interior rows.
pub fn apply_x_boundary(
    kind: XBoundary,
    state: &mut DgState,
    grid: &PhaseGrid,
    doping: &dyn Fn(usize, usize) -> f64,
) -> Result<()> {
    let (nx, ny) = (state.layout.nx, state.layout.ny);
    for j in 1..=ny {
        match kind {
            XBoundary::Periodic => {
                copy_scaled(state, (nx, j), (0, j), 1.0);
                copy_scaled(state, (1, j), (nx + 1, j), 1.0);
            }
            XBoundary::ChargeNeutral => {
                for (inner, ghost) in [(1, 0), (nx, nx + 1)] {
                    let rho = state.cell_density(grid, inner, j);
                    if !(rho > 0.0) {
                        return Err(Error::NonPositiveDensity { i: inner, j, rho });
                    }
                    copy_scaled(state, (inner, j), (ghost, j), doping(inner, j) / rho);
                }
            }
        }
    }
    Ok(())
}

fn copy_scaled(state: &mut DgState, from: (usize, usize), to: (usize, usize), scale: f64) {
    let nb = state.layout.block;
    let src = state.layout.offset(from.0, from.1);
    let dst = state.layout.offset(to.0, to.1);
    for arr in [&mut state.t, &mut state.x, &mut state.y] {
        for idx in 0..nb {
            arr[dst + idx] = scale * arr[src + idx];
        }
    }
}

/// Boundary conditions of the kinetic equation on all four sides.
#[derive(Debug, Clone)]
pub struct KineticBoundary {
    pub bottom: WallReflector,
    pub top: WallReflector,
    pub x: XBoundary,
}

impl KineticBoundary {
    /// Refreshes every ghost block: walls first, then the x-ends. Corner ghosts are not used.
    pub fn apply(&self, state: &mut DgState, grid: &PhaseGrid, doping: &dyn Fn(usize, usize) -> f64) -> Result<()> {
        self.bottom.apply(state);
        self.top.apply(state);
        apply_x_boundary(self.x, state, grid, doping)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::material::{Dimensionless, Material, Scales};
    use proptest::prelude::*;

    struct Fixture {
        grid: PhaseGrid,
        tables: MomentumTables,
        flux: FluxTables,
        band: Band,
    }

    fn fixture() -> Fixture {
        let d = Dimensionless::new(&Material::default(), &Scales::default()).unwrap();
        let grid = PhaseGrid::build(&GridSpec {
            lx: 0.15,
            ly: 0.012,
            w_max: 4.0 * d.gamma,
            nx: 3,
            ny: 2,
            nw: 8,
            nmu: 4,
            nphi: 6,
            align_to: Some(d.gamma),
        })
        .unwrap();
        let tables = MomentumTables::new(&grid, d.band());
        let flux = FluxTables::new(&grid, &tables, &d);
        Fixture { grid, tables, flux, band: d.band() }
    }

    fn random_state(grid: &PhaseGrid, seed: u64) -> DgState {
        // Small deterministic generator; positivity of T keeps the test physical.
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64) / ((1u64 << 53) as f64)
        };
        let mut st = DgState::zeros(grid);
        for (i, j) in st.layout.interior().collect::<Vec<_>>() {
            let b = st.block_mut(i, j);
            for idx in 0..b.t.len() {
                b.t[idx] = 0.5 + next();
                b.x[idx] = 0.2 * (next() - 0.5);
                b.y[idx] = 0.2 * (next() - 0.5);
            }
        }
        st
    }

    fn models() -> [WallModel; 5] {
        [
            WallModel::Specular,
            WallModel::Diffusive,
            WallModel::Mixed(0.5),
            WallModel::Soffer(0.5),
            WallModel::Mixed(0.0),
        ]
    }

    #[test]
    fn every_wall_model_has_zero_normal_flux() {
        let f = fixture();
        for model in models() {
            for wall in [Wall::Bottom, Wall::Top] {
                let mut st = random_state(&f.grid, 7);
                let r = WallReflector::new(wall, model, &f.grid, &f.tables, f.band).unwrap();
                r.apply(&mut st);
                for res in wall_flux(&st, &f.flux, wall) {
                    assert!(res.magnitude > 0.0);
                    assert!(res.relative_residual() < 1e-13, "{model} {wall:?}: {res:?}");
                }
            }
        }
    }

    #[test]
    fn specular_ghost_mirrors_interior() {
        let f = fixture();
        let mut st = random_state(&f.grid, 3);
        let r = WallReflector::new(Wall::Top, WallModel::Specular, &f.grid, &f.tables, f.band).unwrap();
        r.apply(&mut st);
        let ny = f.grid.ny();
        let g = &f.grid;
        for i in 1..=g.nx() {
            let inner = st.block(i, ny);
            let ghost = st.block(i, ny + 1);
            for idx in 0..g.n_momentum() {
                let (k, m, n) = g.momentum_cell(idx);
                let mirror = g.momentum_index(k, m, g.mirror_phi(n));
                if n >= g.nphi() / 2 {
                    assert_eq!(ghost.t[idx], inner.t[mirror]);
                    assert_eq!(ghost.x[idx], inner.x[mirror]);
                    assert_eq!(ghost.y[idx], -inner.y[mirror]);
                } else {
                    assert_eq!(ghost.t[idx], 0.0, "outflow half must stay untouched");
                }
            }
        }
    }

    #[test]
    fn diffusive_ghost_is_lattice_maxwellian_shaped() {
        let f = fixture();
        let mut st = random_state(&f.grid, 11);
        let r = WallReflector::new(Wall::Bottom, WallModel::Diffusive, &f.grid, &f.tables, f.band).unwrap();
        r.apply(&mut st);
        let g = &f.grid;
        for i in 1..=g.nx() {
            let ghost = st.block(i, 0);
            let base = ghost.t[g.momentum_index(0, 0, 0)] / (f.tables.maxwellian[0] / g.w.width(0));
            for idx in 0..g.n_momentum() {
                let (k, _, n) = g.momentum_cell(idx);
                if n < g.nphi() / 2 {
                    let expect = base * f.tables.maxwellian[k] / g.w.width(k);
                    assert!((ghost.t[idx] - expect).abs() < 1e-13 * expect.abs());
                }
            }
        }
    }

    #[test]
    fn pure_specular_mixture_reports_no_diffusive_part() {
        let f = fixture();
        let r = WallReflector::new(Wall::Top, WallModel::Mixed(1.0), &f.grid, &f.tables, f.band).unwrap();
        assert!(matches!(r.mixed_normalization(), Err(Error::PurelySpecular)));
    }

    #[test]
    fn reduction_identities() {
        let f = fixture();
        let build = |m| WallReflector::new(Wall::Top, m, &f.grid, &f.tables, f.band).unwrap();
        let run = |m| {
            let mut st = random_state(&f.grid, 5);
            build(m).apply(&mut st);
            st
        };
        assert_eq!(run(WallModel::Mixed(1.0)), run(WallModel::Specular));
        assert_eq!(run(WallModel::Mixed(0.0)), run(WallModel::Diffusive));
        let (s, d, m) = (run(WallModel::Specular), run(WallModel::Diffusive), run(WallModel::Mixed(0.3)));
        for arr in 0..3 {
            let pick = |st: &DgState| match arr {
                0 => st.t.clone(),
                1 => st.x.clone(),
                _ => st.y.clone(),
            };
            for ((a, b), c) in pick(&s).iter().zip(pick(&d)).zip(pick(&m)) {
                let lin = 0.3 * a + 0.7 * b;
                assert!((c - lin).abs() <= 1e-14 * (a.abs() + b.abs()).max(1e-300), "{c} vs {lin}");
            }
        }
    }

    #[test]
    fn soffer_specularity_limits() {
        let f = fixture();
        let smooth = Specularity::new(WallModel::Soffer(0.0), &f.grid, &f.tables, f.band).unwrap();
        assert!(smooth.mean.iter().all(|&p| (p - 1.0).abs() < 1e-14));
        let rough = Specularity::new(WallModel::Soffer(0.5), &f.grid, &f.tables, f.band).unwrap();
        assert!(rough.mean.iter().all(|&p| p > 0.0 && p < 1.0));
        // Specularity decreases with energy at fixed angle.
        let np = f.grid.nphi();
        for n in 0..np {
            for k in 1..f.grid.nw() {
                assert!(rough.mean[k * np + n] < rough.mean[(k - 1) * np + n]);
            }
        }
    }

    #[test]
    fn wall_names_parse() {
        assert_eq!("mixed:0.25".parse::<WallModel>().unwrap(), WallModel::Mixed(0.25));
        assert_eq!("soffer:0.5".parse::<WallModel>().unwrap(), WallModel::Soffer(0.5));
        assert!("mixed:1.5".parse::<WallModel>().is_err());
        assert!("rough".parse::<WallModel>().is_err());
        assert_eq!("periodic".parse::<XBoundary>().unwrap(), XBoundary::Periodic);
        for m in models() {
            assert_eq!(m.to_string().parse::<WallModel>().unwrap(), m);
        }
    }

    #[test]
    fn charge_neutral_ghost_restores_doping() {
        let f = fixture();
        let mut st = random_state(&f.grid, 13);
        apply_x_boundary(XBoundary::ChargeNeutral, &mut st, &f.grid, &|_, _| 2.0).unwrap();
        for j in 1..=f.grid.ny() {
            let ghost_rho: f64 = {
                let b = st.block(0, j);
                b.t.iter().enumerate().map(|(idx, t)| {
                    let (k, m, n) = f.grid.momentum_cell(idx);
                    t * f.grid.momentum_volume(k, m, n)
                }).sum()
            };
            assert!((ghost_rho - 2.0).abs() < 1e-13);
        }
        let mut zero = DgState::zeros(&f.grid);
        assert!(matches!(
            apply_x_boundary(XBoundary::ChargeNeutral, &mut zero, &f.grid, &|_, _| 1.0),
            Err(Error::NonPositiveDensity { .. })
        ));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn zero_flux_holds_for_random_states(seed in any::<u64>(), p in 0.0f64..1.0, eta in 0.0f64..2.0) {
            let f = fixture();
            for model in [WallModel::Mixed(p), WallModel::Soffer(eta), WallModel::Diffusive] {
                for wall in [Wall::Bottom, Wall::Top] {
                    let mut st = random_state(&f.grid, seed);
                    WallReflector::new(wall, model, &f.grid, &f.tables, f.band).unwrap().apply(&mut st);
                    for res in wall_flux(&st, &f.flux, wall) {
                        prop_assert!(res.relative_residual() < 1e-13);
                    }
                }
            }
        }

        #[test]
        fn nonnegative_means_give_nonnegative_ghost_means(seed in any::<u64>(), p in 0.0f64..1.0) {
            let f = fixture();
            for model in [WallModel::Specular, WallModel::Diffusive, WallModel::Mixed(p), WallModel::Soffer(0.5)] {
                let mut st = random_state(&f.grid, seed);
                WallReflector::new(Wall::Top, model, &f.grid, &f.tables, f.band).unwrap().apply(&mut st);
                let ny = f.grid.ny();
                for i in 1..=f.grid.nx() {
                    prop_assert!(st.block(i, ny + 1).t.iter().all(|&t| t >= 0.0));
                }
            }
        }
    }
}
