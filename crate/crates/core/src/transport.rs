//! Semi-discrete DG right-hand side of the scaled Boltzmann equation.
//!
//! Spatial faces use exact upwinding per momentum cell: the sign of the
//! transport velocity is fixed inside every cell once mu and phi cells never
//! straddle 0 and pi/2. Momentum faces split the field-driven velocity into
//! momentum factor times field component and upwind each product at the
//! spatial Gauss points.

use crate::collision::CollisionOperator;
use crate::error::{Error, Result};
use crate::grid::PhaseGrid;
use crate::material::{Dimensionless, MomentumTables};
use crate::quadrature::gauss_legendre;
use crate::state::DgState;
use rayon::prelude::*;

/// Number of spatial quadrature points used for the field-driven fluxes.
pub const FIELD_POINTS: usize = 4;

/// Electric field at the 2x2 Gauss points of one spatial cell, in the order
/// (xi, eta) = (-,-), (-,+), (+,-), (+,+).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CellField {
    pub ex: [f64; FIELD_POINTS],
    pub ey: [f64; FIELD_POINTS],
}

impl CellField {
    pub fn uniform(ex: f64, ey: f64) -> Self {
        CellField { ex: [ex; FIELD_POINTS], ey: [ey; FIELD_POINTS] }
    }

    /// Field from P1 coefficients `e0 + e1 xi + e2 eta` of each component.
    pub fn from_linear(ex: [f64; 3], ey: [f64; 3]) -> Self {
        let mut f = CellField::default();
        for (q, (xi, eta)) in field_points().into_iter().enumerate() {
            f.ex[q] = ex[0] + ex[1] * xi + ex[2] * eta;
            f.ey[q] = ey[0] + ey[1] * xi + ey[2] * eta;
        }
        f
    }

    pub fn max_abs(&self) -> f64 {
        (0..FIELD_POINTS).map(|q| self.ex[q].hypot(self.ey[q])).fold(0.0, f64::max)
    }
}

/// Local coordinates of the field quadrature points.
pub fn field_points() -> [(f64, f64); FIELD_POINTS] {
    let g = gauss_legendre(2);
    [(g[0].0, g[0].0), (g[0].0, g[1].0), (g[1].0, g[0].0), (g[1].0, g[1].0)]
}

/// Momentum integrals of the positive and negative parts of every flux factor.
#[derive(Debug, Clone)]
pub struct FluxTables {
    nw: usize,
    nmu: usize,
    nphi: usize,
    /// x-velocity integrals per momentum cell.
    pub vx_pos: Vec<f64>,
    pub vx_neg: Vec<f64>,
    /// y-velocity integrals per momentum cell.
    pub vy_pos: Vec<f64>,
    pub vy_neg: Vec<f64>,
    /// Energy faces `(kf, m, n)`: factors of Ex and Ey.
    w_ex: (Vec<f64>, Vec<f64>),
    w_ey: (Vec<f64>, Vec<f64>),
    /// Polar faces indexed by their lower cell `(k, m, n)`, zero past the last cell:
    /// factors of Ex (never positive) and Ey.
    mu_ex_neg: Vec<f64>,
    mu_ey: (Vec<f64>, Vec<f64>),
    /// Azimuthal faces indexed by their lower cell, zero past the last cell:
    /// factor of Ey (never negative).
    phi_ey_pos: Vec<f64>,
    inv_volume: Vec<f64>,
    /// Per-axis bounds of the cell-averaged speeds, per unit field where applicable.
    pub speed_bounds: SpeedBounds,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedBounds {
    pub x: f64,
    pub y: f64,
    pub w_per_field: f64,
    pub mu_per_field: f64,
    pub phi_per_field: f64,
}

fn split(v: f64) -> (f64, f64) {
    (v.max(0.0), v.min(0.0))
}

impl FluxTables {
    pub fn new(grid: &PhaseGrid, tables: &MomentumTables, dims: &Dimensionless) -> Self {
        let (nw, nmu, nphi) = (grid.nw(), grid.nmu(), grid.nphi());
        let nmom = grid.n_momentum();
        let (cx, ck) = (dims.cx, dims.ck);
        let mut vx_pos = vec![0.0; nmom];
        let mut vx_neg = vec![0.0; nmom];
        let mut vy_pos = vec![0.0; nmom];
        let mut vy_neg = vec![0.0; nmom];
        let mut inv_volume = vec![0.0; nmom];
        for k in 0..nw {
            for m in 0..nmu {
                for n in 0..nphi {
                    let idx = grid.momentum_index(k, m, n);
                    let dphi = grid.phi.width(n);
                    vx_pos[idx] = cx * tables.speed[k] * tables.mu_pos[m] * dphi;
                    vx_neg[idx] = cx * tables.speed[k] * tables.mu_neg[m] * dphi;
                    vy_pos[idx] = cx * tables.speed[k] * tables.sin_polar[m] * tables.cos_pos[n];
                    vy_neg[idx] = cx * tables.speed[k] * tables.sin_polar[m] * tables.cos_neg[n];
                    inv_volume[idx] = 1.0 / grid.momentum_volume(k, m, n);
                }
            }
        }

        let wlen = (nw + 1) * nmu * nphi;
        let mut w_ex = (vec![0.0; wlen], vec![0.0; wlen]);
        let mut w_ey = (vec![0.0; wlen], vec![0.0; wlen]);
        // Faces at w = 0 and at the cut-off carry no flux.
        for kf in 1..nw {
            let a = -2.0 * ck * tables.speed_face[kf];
            for m in 0..nmu {
                for n in 0..nphi {
                    let f = (kf * nmu + m) * nphi + n;
                    let dphi = grid.phi.width(n);
                    // a <= 0, so the positive part comes from the negative part of mu.
                    w_ex.0[f] = a * tables.mu_neg[m] * dphi;
                    w_ex.1[f] = a * tables.mu_pos[m] * dphi;
                    w_ey.0[f] = a * tables.sin_polar[m] * tables.cos_neg[n];
                    w_ey.1[f] = a * tables.sin_polar[m] * tables.cos_pos[n];
                }
            }
        }

        let mlen = nw * nmu * nphi;
        let mut mu_ex_neg = vec![0.0; mlen];
        let mut mu_ey = (vec![0.0; mlen], vec![0.0; mlen]);
        for k in 0..nw {
            for mf in 1..nmu {
                let s = tables.sin_polar_face[mf];
                let mu = tables.mu_face[mf];
                for n in 0..nphi {
                    let f = ((k * nmu) + mf - 1) * nphi + n;
                    mu_ex_neg[f] = -ck * s * s * tables.inv_wavenumber[k] * grid.phi.width(n);
                    let base = ck * s * mu * tables.inv_wavenumber[k];
                    let (c_pos, c_neg) = (tables.cos_pos[n], tables.cos_neg[n]);
                    let (p, q) = if mu >= 0.0 { (base * c_pos, base * c_neg) } else { (base * c_neg, base * c_pos) };
                    // Each of p, q carries one sign; route them explicitly.
                    let (pp, pn) = split(p);
                    let (qp, qn) = split(q);
                    mu_ey.0[f] = pp + qp;
                    mu_ey.1[f] = pn + qn;
                }
            }
        }

        let plen = nw * nmu * nphi;
        let mut phi_ey_pos = vec![0.0; plen];
        for k in 0..nw {
            for m in 0..nmu {
                for nf in 1..nphi {
                    let f = (k * nmu + m) * nphi + nf - 1;
                    phi_ey_pos[f] = ck * tables.sin_face[nf] * tables.inv_wavenumber[k] * tables.inv_sin_polar[m];
                }
            }
        }

        let a_max = tables.speed_face.iter().cloned().fold(0.0, f64::max);
        let inv_b_mean = (0..nw).map(|k| tables.inv_wavenumber[k] / grid.w.width(k)).fold(0.0, f64::max);
        let inv_s_mean = (0..nmu).map(|m| tables.inv_sin_polar[m] / grid.mu.width(m)).fold(0.0, f64::max);
        let speed_bounds = SpeedBounds {
            x: cx * a_max,
            y: cx * a_max,
            w_per_field: 2.0 * ck * a_max,
            mu_per_field: ck * inv_b_mean,
            phi_per_field: ck * inv_b_mean * inv_s_mean,
        };

        FluxTables {
            nw,
            nmu,
            nphi,
            vx_pos,
            vx_neg,
            vy_pos,
            vy_neg,
            w_ex,
            w_ey,
            mu_ex_neg,
            mu_ey,
            phi_ey_pos,
            inv_volume,
            speed_bounds,
        }
    }

    /// Integral of the x-velocity over momentum cell `idx`.
    pub fn vx(&self, idx: usize) -> f64 {
        self.vx_pos[idx] + self.vx_neg[idx]
    }

    /// Integral of the y-velocity over momentum cell `idx`.
    pub fn vy(&self, idx: usize) -> f64 {
        self.vy_pos[idx] + self.vy_neg[idx]
    }
}

/// Upwind flux of one momentum cell through a y-face as `(f0, f1)` of `f0 + f1 xi`.
/// `lower` and `upper` are the `(T, X, Y)` coefficients of the cells below and above.
#[inline]
pub fn y_face_flux(vp: f64, vm: f64, lower: (f64, f64, f64), upper: (f64, f64, f64)) -> (f64, f64) {
    let (tl, xl, yl) = lower;
    let (tu, xu, yu) = upper;
    (vp * (tl + yl) + vm * (tu - yu), vp * xl + vm * xu)
}

/// Scratch buffers reused across the spatial cells handled by one worker.
struct Scratch {
    /// Field-weighted mass products: [component][sign][basis] per momentum cell.
    prod: [[[Vec<f64>; 3]; 2]; 2],
    /// Fluxes of one run of faces, per basis function.
    face: [Vec<f64>; 3],
    angular: Vec<f64>,
}

impl Scratch {
    fn new(nmom: usize, nw: usize) -> Self {
        let v = || vec![0.0; nmom];
        Scratch {
            prod: std::array::from_fn(|_| std::array::from_fn(|_| [v(), v(), v()])),
            face: [v(), v(), v()],
            angular: vec![0.0; nw],
        }
    }
}

/// Right-hand side assembler: transport plus optional collisions.
pub struct Transport<'a> {
    pub grid: &'a PhaseGrid,
    pub flux: &'a FluxTables,
    pub collisions: Option<&'a CollisionOperator>,
}

impl<'a> Transport<'a> {
    /// Fills `rhs` (interior blocks) with the time derivative of every coefficient.
    /// Ghost blocks of `state` must already hold boundary data; `field` holds one
    /// entry per interior cell in storage order `(i - 1) * ny + (j - 1)`.
    pub fn assemble(&self, state: &DgState, field: &[CellField], rhs: &mut DgState) -> Result<()> {
        let layout = state.layout;
        let (nx, ny, nb) = (layout.nx, layout.ny, layout.block);
        assert_eq!(field.len(), nx * ny);
        let nw = self.grid.nw();
        let chunks = rhs
            .t
            .par_chunks_mut(nb)
            .zip(rhs.x.par_chunks_mut(nb))
            .zip(rhs.y.par_chunks_mut(nb))
            .enumerate();
        chunks.for_each_init(
            || Scratch::new(nb, nw),
            |scratch, (b, ((ot, ox), oy))| {
                let i = b / (ny + 2);
                let j = b % (ny + 2);
                if i == 0 || j == 0 || i > nx || j > ny {
                    return;
                }
                self.cell(state, i, j, &field[(i - 1) * ny + (j - 1)], ot, ox, oy, scratch);
            },
        );
        if let Some((i, j, idx)) = rhs.find_non_finite() {
            let (k, m, n) = self.grid.momentum_cell(idx);
            return Err(Error::NonFinite { i, j, k, m, n });
        }
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn cell(
        &self,
        state: &DgState,
        i: usize,
        j: usize,
        field: &CellField,
        ot: &mut [f64],
        ox: &mut [f64],
        oy: &mut [f64],
        scratch: &mut Scratch,
    ) {
        let g = self.grid;
        let f = self.flux;
        let nb = state.layout.block;
        let dx = g.x.width(i - 1);
        let dy = g.y.width(j - 1);
        let c = state.block(i, j);
        let west = state.block(i - 1, j);
        let east = state.block(i + 1, j);
        let south = state.block(i, j - 1);
        let north = state.block(i, j + 1);

        let dy3 = dy / 3.0;
        let dx3 = dx / 3.0;
        for idx in 0..nb {
            let (vp, vm) = (f.vx_pos[idx], f.vx_neg[idx]);
            let (tc, xc, yc) = (c.t[idx], c.x[idx], c.y[idx]);
            // East face (outward +x).
            let e0 = vp * (tc + xc) + vm * (east.t[idx] - east.x[idx]);
            let e1 = vp * yc + vm * east.y[idx];
            // West face (outward -x).
            let w0 = vp * (west.t[idx] + west.x[idx]) + vm * (tc - xc);
            let w1 = vp * west.y[idx] + vm * yc;
            let mut rt = (w0 - e0) * dy;
            let mut rx = -(w0 + e0) * dy + 2.0 * dy * (vp + vm) * tc;
            let mut ry = (w1 - e1) * dy3;

            let (up, um) = (f.vy_pos[idx], f.vy_neg[idx]);
            let (n0, n1) = y_face_flux(up, um, (tc, xc, yc), (north.t[idx], north.x[idx], north.y[idx]));
            let (s0, s1) = y_face_flux(up, um, (south.t[idx], south.x[idx], south.y[idx]), (tc, xc, yc));
            rt += (s0 - n0) * dx;
            rx += (s1 - n1) * dx3;
            ry += -(s0 + n0) * dx + 2.0 * dx * (up + um) * tc;

            ot[idx] = rt;
            ox[idx] = rx;
            oy[idx] = ry;
        }

        self.field_faces(c.t, c.x, c.y, dx * dy, field, ot, ox, oy, scratch);

        let area = dx * dy;
        for idx in 0..nb {
            let inv = f.inv_volume[idx] / area;
            ot[idx] *= inv;
            ox[idx] *= 3.0 * inv;
            oy[idx] *= 3.0 * inv;
        }

        if let Some(op) = self.collisions {
            op.accumulate(c.t, ot, &mut scratch.angular);
            op.accumulate(c.x, ox, &mut scratch.angular);
            op.accumulate(c.y, oy, &mut scratch.angular);
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn field_faces(
        &self,
        ct: &[f64],
        cx: &[f64],
        cy: &[f64],
        area: f64,
        field: &CellField,
        ot: &mut [f64],
        ox: &mut [f64],
        oy: &mut [f64],
        scratch: &mut Scratch,
    ) {
        let f = self.flux;
        let (nw, nmu, nphi) = (f.nw, f.nmu, f.nphi);
        let pts = field_points();
        // Field-weighted mass matrices M[a][b] = area/4 sum_q e(q) phi_a(q) phi_b(q),
        // split into positive and negative parts of e.
        let mut mats = [[[[0.0f64; 3]; 3]; 2]; 2];
        let mut active = [[false; 2]; 2];
        for (comp, values) in [field.ex, field.ey].iter().enumerate() {
            for (q, &(xi, eta)) in pts.iter().enumerate() {
                let basis = [1.0, xi, eta];
                let e = values[q];
                let sign = if e > 0.0 { 0 } else if e < 0.0 { 1 } else { continue };
                active[comp][sign] = true;
                for a in 0..3 {
                    for b in 0..3 {
                        mats[comp][sign][a][b] += 0.25 * area * e * basis[a] * basis[b];
                    }
                }
            }
        }
        if !active.iter().flatten().any(|&a| a) {
            return;
        }
        for comp in 0..2 {
            for sign in 0..2 {
                if !active[comp][sign] {
                    continue;
                }
                let m = &mats[comp][sign];
                let [p0, p1, p2] = &mut scratch.prod[comp][sign];
                for idx in 0..ct.len() {
                    let (t, x, y) = (ct[idx], cx[idx], cy[idx]);
                    p0[idx] = m[0][0] * t + m[0][1] * x + m[0][2] * y;
                    p1[idx] = m[1][0] * t + m[1][1] * x + m[1][2] * y;
                    p2[idx] = m[2][0] * t + m[2][1] * x + m[2][2] * y;
                }
            }
        }
        let prod = &scratch.prod;
        let tmp = &mut scratch.face;
        let mut out: [&mut [f64]; 3] = [ot, ox, oy];

        // With factors (h+, h-) of one field component, the upwind flux is
        // h+ (P+_lo + P-_hi) + h- (P-_lo + P+_hi); each active sign contributes
        // one (weight on lo, weight on hi, products) term.
        let terms = |comp: usize, hp: Option<&'a [f64]>, hm: Option<&'a [f64]>| {
            let mut v: [Option<Term<'a, '_>>; 2] = [None, None];
            if active[comp][0] {
                v[0] = Some(Term { w_lo: hp, w_hi: hm, p: &prod[comp][0] });
            }
            if active[comp][1] {
                v[1] = Some(Term { w_lo: hm, w_hi: hp, p: &prod[comp][1] });
            }
            v
        };

        let nmn = nmu * nphi;
        let w_terms = [
            terms(0, Some(&f.w_ex.0), Some(&f.w_ex.1)),
            terms(1, Some(&f.w_ey.0), Some(&f.w_ey.1)),
        ];
        let total = nw * nmn;
        face_run(&w_terms, 0, nmn, nmn, total - nmn, &mut out, tmp);
        let mu_terms = [terms(0, None, Some(&f.mu_ex_neg)), terms(1, Some(&f.mu_ey.0), Some(&f.mu_ey.1))];
        face_run(&mu_terms, 0, nphi, 0, total - nphi, &mut out, tmp);
        let phi_terms = [[None, None], terms(1, Some(&f.phi_ey_pos), None)];
        face_run(&phi_terms, 0, 1, 0, total - 1, &mut out, tmp);
    }
}

/// One upwind contribution to a run of momentum faces.
struct Term<'h, 'p> {
    w_lo: Option<&'h [f64]>,
    w_hi: Option<&'h [f64]>,
    p: &'p [Vec<f64>; 3],
}

/// Accumulates `len` consecutive faces whose lower cells start at `lo`, upper cells
/// at `hi` and factor tables at `h`.
fn face_run(
    terms: &[[Option<Term<'_, '_>>; 2]; 2],
    lo: usize,
    hi: usize,
    h: usize,
    len: usize,
    out: &mut [&mut [f64]; 3],
    tmp: &mut [Vec<f64>; 3],
) {
    for a in 0..3 {
        let acc = &mut tmp[a][..len];
        acc.fill(0.0);
        for term in terms.iter().flatten().flatten() {
            let p = &term.p[a];
            if let Some(w) = term.w_lo {
                for ((s, w), v) in acc.iter_mut().zip(&w[h..h + len]).zip(&p[lo..lo + len]) {
                    *s += w * v;
                }
            }
            if let Some(w) = term.w_hi {
                for ((s, w), v) in acc.iter_mut().zip(&w[h..h + len]).zip(&p[hi..hi + len]) {
                    *s += w * v;
                }
            }
        }
        let o = &mut *out[a];
        for (d, s) in o[lo..lo + len].iter_mut().zip(acc.iter()) {
            *d -= s;
        }
        for (d, s) in o[hi..hi + len].iter_mut().zip(acc.iter()) {
            *d += s;
        }
    }
}
