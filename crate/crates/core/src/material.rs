//! Silicon band model, physical scales and the per-grid momentum integral tables.

use crate::error::{Error, Result};
use crate::grid::PhaseGrid;
use crate::quadrature::{integrate_energy, energy_nodes};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const BOLTZMANN: f64 = 1.380_649e-23;
pub const HBAR: f64 = 1.054_571_817e-34;
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;

/// Points per energy cell for the tabulated energy integrals.
pub const ENERGY_QUAD_POINTS: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Material {
    /// Effective mass in units of the free electron mass.
    pub effective_mass: f64,
    /// Kane non-parabolicity factor in 1/eV.
    pub nonparabolicity_per_ev: f64,
    pub phonon_energy_ev: f64,
    pub lattice_temperature_k: f64,
    pub acoustic_deformation_ev: f64,
    pub optical_coupling_ev_per_m: f64,
    pub mass_density_kg_m3: f64,
    pub sound_velocity_m_s: f64,
    pub eps_silicon: f64,
    pub eps_oxide: f64,
}

impl Default for Material {
    fn default() -> Self {
        Material {
            effective_mass: 0.32,
            nonparabolicity_per_ev: 0.5,
            phonon_energy_ev: 0.063,
            lattice_temperature_k: 300.0,
            acoustic_deformation_ev: 9.0,
            optical_coupling_ev_per_m: 11.4e10,
            mass_density_kg_m3: 2330.0,
            sound_velocity_m_s: 9.18e3,
            eps_silicon: 11.7,
            eps_oxide: 3.9,
        }
    }
}

impl Material {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("effective_mass", self.effective_mass),
            ("phonon_energy_ev", self.phonon_energy_ev),
            ("lattice_temperature_k", self.lattice_temperature_k),
            ("mass_density_kg_m3", self.mass_density_kg_m3),
            ("sound_velocity_m_s", self.sound_velocity_m_s),
            ("eps_silicon", self.eps_silicon),
            ("eps_oxide", self.eps_oxide),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidMaterial(format!("{name} must be positive, got {v}")));
            }
        }
        let non_negative = [
            ("nonparabolicity_per_ev", self.nonparabolicity_per_ev),
            ("acoustic_deformation_ev", self.acoustic_deformation_ev),
            ("optical_coupling_ev_per_m", self.optical_coupling_ev_per_m),
        ];
        for (name, v) in non_negative {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidMaterial(format!("{name} must be non-negative, got {v}")));
            }
        }
        Ok(())
    }

    pub fn thermal_energy_j(&self) -> f64 {
        BOLTZMANN * self.lattice_temperature_k
    }

    pub fn thermal_momentum(&self) -> f64 {
        (2.0 * self.effective_mass * ELECTRON_MASS * self.thermal_energy_j()).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Scales {
    pub length_m: f64,
    pub time_s: f64,
    pub voltage_v: f64,
}

impl Default for Scales {
    fn default() -> Self {
        Scales { length_m: 1e-6, time_s: 1e-12, voltage_v: 1.0 }
    }
}

/// Dimensionless coefficients of the scaled Boltzmann-Poisson system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Dimensionless {
    pub cx: f64,
    pub ck: f64,
    pub cv: f64,
    pub cp: f64,
    /// Non-parabolicity in thermal units.
    pub alpha: f64,
    /// Phonon energy in thermal units.
    pub gamma: f64,
    pub phonon_occupation: f64,
    pub c_acoustic: f64,
    pub c_emission: f64,
    pub c_absorption: f64,
    /// Physical density (1/m^3) of one dimensionless density unit.
    pub density_scale_m3: f64,
    /// Physical field (V/m) of one dimensionless field unit.
    pub field_scale_v_m: f64,
    /// Physical velocity (m/s) of one dimensionless velocity unit.
    pub velocity_scale_m_s: f64,
    /// Thermal energy in eV.
    pub thermal_energy_ev: f64,
    pub scales: Scales,
}

impl Dimensionless {
    pub fn new(mat: &Material, scales: &Scales) -> Result<Self> {
        mat.validate()?;
        if !(scales.length_m > 0.0 && scales.time_s > 0.0 && scales.voltage_v > 0.0) {
            return Err(Error::InvalidMaterial("scales must be positive".into()));
        }
        let kt = mat.thermal_energy_j();
        let mstar = mat.effective_mass * ELECTRON_MASS;
        let p_th = mat.thermal_momentum();
        let field_scale = scales.voltage_v / scales.length_m;
        let wave_scale = p_th / HBAR;
        let density_scale = wave_scale.powi(3);

        let cx = scales.time_s / scales.length_m * (2.0 * kt / mstar).sqrt();
        let ck = scales.time_s * ELEMENTARY_CHARGE * field_scale / p_th;
        let cv = scales.voltage_v / (field_scale * scales.length_m);
        let cp = density_scale * scales.length_m.powi(2) * ELEMENTARY_CHARGE
            / (VACUUM_PERMITTIVITY * scales.voltage_v);

        let alpha = mat.nonparabolicity_per_ev * kt / ELEMENTARY_CHARGE;
        let phonon_j = mat.phonon_energy_ev * ELEMENTARY_CHARGE;
        let gamma = phonon_j / kt;
        let occupation = 1.0 / (gamma.exp() - 1.0);

        let deformation_j = mat.acoustic_deformation_ev * ELEMENTARY_CHARGE;
        let coupling_j_m = mat.optical_coupling_ev_per_m * ELEMENTARY_CHARGE;
        let omega = phonon_j / HBAR;
        let acoustic = kt * deformation_j.powi(2)
            / (4.0 * PI * PI * HBAR * mat.mass_density_kg_m3 * mat.sound_velocity_m_s.powi(2));
        let optical = coupling_j_m.powi(2) / (8.0 * PI * PI * mat.mass_density_kg_m3 * omega);
        let prefactor = 2.0 * mstar * scales.time_s / HBAR.powi(3) * p_th;

        Ok(Dimensionless {
            cx,
            ck,
            cv,
            cp,
            alpha,
            gamma,
            phonon_occupation: occupation,
            c_acoustic: prefactor * acoustic,
            c_emission: prefactor * (occupation + 1.0) * optical,
            c_absorption: prefactor * occupation * optical,
            density_scale_m3: density_scale,
            field_scale_v_m: field_scale,
            velocity_scale_m_s: scales.length_m / scales.time_s,
            thermal_energy_ev: kt / ELEMENTARY_CHARGE,
            scales: *scales,
        })
    }

    pub fn band(&self) -> Band {
        Band { alpha: self.alpha }
    }
}

/// Kane dispersion in thermal units: energy w, wave number squared w (1 + alpha w).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub alpha: f64,
}

impl Band {
    /// Speed factor sqrt(w (1 + alpha w)) / (1 + 2 alpha w).
    pub fn speed(&self, w: f64) -> f64 {
        (w * (1.0 + self.alpha * w)).sqrt() / (1.0 + 2.0 * self.alpha * w)
    }

    /// Wave number sqrt(w (1 + alpha w)).
    pub fn wavenumber(&self, w: f64) -> f64 {
        (w * (1.0 + self.alpha * w)).sqrt()
    }

    /// Jacobian factor sqrt(w (1 + alpha w)) (1 + 2 alpha w).
    pub fn jacobian(&self, w: f64) -> f64 {
        self.wavenumber(w) * (1.0 + 2.0 * self.alpha * w)
    }

    /// Closed form of the integral of 1 / wavenumber over [0, w].
    pub fn inverse_wavenumber_primitive(&self, w: f64) -> f64 {
        if self.alpha > 0.0 {
            2.0 / self.alpha.sqrt() * (self.alpha * w).sqrt().asinh()
        } else {
            2.0 * w.sqrt()
        }
    }
}

/// Closed-form integrals of the momentum factors over every momentum cell and face.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumTables {
    /// Integral of the speed factor over each energy cell.
    pub speed: Vec<f64>,
    /// Integral of 1 / wavenumber over each energy cell.
    pub inv_wavenumber: Vec<f64>,
    /// Integral of exp(-w) times the Jacobian over each energy cell.
    pub maxwellian: Vec<f64>,
    /// Cell average of the Jacobian.
    pub jacobian_mean: Vec<f64>,
    /// Cell average of w.
    pub energy_mean: Vec<f64>,
    /// Speed factor at each energy face.
    pub speed_face: Vec<f64>,
    /// Integrals of the positive and negative parts of mu over each mu cell.
    pub mu_pos: Vec<f64>,
    pub mu_neg: Vec<f64>,
    /// Integral of sqrt(1 - mu^2).
    pub sin_polar: Vec<f64>,
    /// Integral of 1 / sqrt(1 - mu^2).
    pub inv_sin_polar: Vec<f64>,
    /// mu and sqrt(1 - mu^2) at each mu face; exact zeros of the latter at mu = -1, 1.
    pub mu_face: Vec<f64>,
    pub sin_polar_face: Vec<f64>,
    /// Integrals of the positive and negative parts of cos(phi) over each phi cell.
    pub cos_pos: Vec<f64>,
    pub cos_neg: Vec<f64>,
    /// sin(phi) at each phi face; exact zeros at phi = 0, pi.
    pub sin_face: Vec<f64>,
}

impl MomentumTables {
    pub fn new(grid: &PhaseGrid, band: Band) -> Self {
        let w = &grid.w;
        let nw = grid.nw();
        let mut speed = Vec::with_capacity(nw);
        let mut inv_wavenumber = Vec::with_capacity(nw);
        let mut maxwellian = Vec::with_capacity(nw);
        let mut jacobian_mean = Vec::with_capacity(nw);
        let mut energy_mean = Vec::with_capacity(nw);
        for k in 0..nw {
            let (a, b) = (w.lo(k), w.hi(k));
            speed.push(integrate_energy(|x| band.speed(x), a, b, ENERGY_QUAD_POINTS));
            inv_wavenumber.push(band.inverse_wavenumber_primitive(b) - band.inverse_wavenumber_primitive(a));
            maxwellian.push(integrate_energy(|x| (-x).exp() * band.jacobian(x), a, b, ENERGY_QUAD_POINTS));
            jacobian_mean.push(integrate_energy(|x| band.jacobian(x), a, b, ENERGY_QUAD_POINTS) / (b - a));
            energy_mean.push(0.5 * (a + b));
        }
        let speed_face = w.edges().iter().map(|&x| band.speed(x)).collect();

        let mu = &grid.mu;
        let polar_primitive = |x: f64| 0.5 * (x * (1.0 - x * x).max(0.0).sqrt() + x.clamp(-1.0, 1.0).asin());
        let mut mu_pos = Vec::new();
        let mut mu_neg = Vec::new();
        let mut sin_polar = Vec::new();
        let mut inv_sin_polar = Vec::new();
        for m in 0..grid.nmu() {
            let (a, b) = (mu.lo(m), mu.hi(m));
            let half_sq = |lo: f64, hi: f64| 0.5 * (hi * hi - lo * lo);
            mu_pos.push(if b > 0.0 { half_sq(a.max(0.0), b) } else { 0.0 });
            mu_neg.push(if a < 0.0 { half_sq(a, b.min(0.0)) } else { 0.0 });
            sin_polar.push(polar_primitive(b) - polar_primitive(a));
            inv_sin_polar.push(b.clamp(-1.0, 1.0).asin() - a.clamp(-1.0, 1.0).asin());
        }
        let nmu = grid.nmu();
        let mu_face: Vec<f64> = mu.edges().to_vec();
        let sin_polar_face = mu_face
            .iter()
            .enumerate()
            .map(|(e, &x)| if e == 0 || e == nmu { 0.0 } else { (1.0 - x * x).sqrt() })
            .collect();

        let phi = &grid.phi;
        let np = grid.nphi();
        let mut cos_int: Vec<f64> = (0..np).map(|n| phi.hi(n).sin() - phi.lo(n).sin()).collect();
        if grid.phi_is_symmetric() {
            for n in np / 2..np {
                cos_int[n] = -cos_int[np - 1 - n];
            }
        }
        let cos_pos = cos_int.iter().map(|&c| c.max(0.0)).collect();
        let cos_neg = cos_int.iter().map(|&c| c.min(0.0)).collect();
        let sin_face = phi
            .edges()
            .iter()
            .enumerate()
            .map(|(e, &x)| if e == 0 || e == np { 0.0 } else { x.sin() })
            .collect();

        MomentumTables {
            speed,
            inv_wavenumber,
            maxwellian,
            jacobian_mean,
            energy_mean,
            speed_face,
            mu_pos,
            mu_neg,
            sin_polar,
            inv_sin_polar,
            mu_face,
            sin_polar_face,
            cos_pos,
            cos_neg,
            sin_face,
        }
    }

    /// Integral of cos(phi) over phi cell n.
    pub fn cos_phi(&self, n: usize) -> f64 {
        self.cos_pos[n] + self.cos_neg[n]
    }

    /// Integral of mu over mu cell m.
    pub fn mu(&self, m: usize) -> f64 {
        self.mu_pos[m] + self.mu_neg[m]
    }
}

/// Integrates `f(w) * g(phi)`-type functions over an energy-angle cell with the substituted energy rule.
pub fn integrate_energy_angle(
    f: impl Fn(f64, f64) -> f64,
    w: (f64, f64),
    phi: (f64, f64),
    n: usize,
) -> f64 {
    let nodes = energy_nodes(w.0, w.1, n);
    nodes
        .iter()
        .map(|&(x, wt)| wt * crate::quadrature::integrate(|p| f(x, p), phi.0, phi.1, n))
        .sum()
}
