//! Run configuration in TOML. Unknown keys are rejected and every error names
//! the offending key path.

use crate::boundary::{WallModel, XBoundary};
use crate::collision::CollisionModel;
use crate::driver::Integrator;
use crate::error::{Error, Result};
use crate::material::{Material, Scales};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeviceKind {
    #[default]
    BulkDiode,
    Dgmosfet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DeviceSection {
    pub kind: DeviceKind,
    pub length_um: f64,
    /// Height of the silicon region; for the MOSFET, from the channel centre to the oxide.
    pub height_um: f64,
    pub oxide_um: f64,
    pub oxide_rows: usize,
    pub gate_start_um: f64,
    pub gate_end_um: f64,
}

impl Default for DeviceSection {
    fn default() -> Self {
        DeviceSection {
            kind: DeviceKind::BulkDiode,
            length_um: 0.15,
            height_um: 0.012,
            oxide_um: 0.001,
            oxide_rows: 1,
            gate_start_um: 0.05,
            gate_end_um: 0.10,
        }
    }
}

/// Rectangle `[x0, x1] x [y0, y1]` (micrometres) with its own doping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DopingRegion {
    pub x_um: [f64; 2],
    pub y_um: [f64; 2],
    pub value_m3: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DopingSection {
    pub background_m3: f64,
    /// Later regions override earlier ones; a cell takes the value at its centre.
    pub region: Vec<DopingRegion>,
}

impl Default for DopingSection {
    fn default() -> Self {
        DopingSection { background_m3: 1e24, region: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BiasSection {
    pub source_v: f64,
    pub drain_v: f64,
    pub gate_v: f64,
}

impl Default for BiasSection {
    fn default() -> Self {
        BiasSection { source_v: 0.5235, drain_v: 1.5235, gate_v: 1.06 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundarySection {
    pub bottom: WallModel,
    pub top: WallModel,
    pub x: XBoundary,
}

impl Default for BoundarySection {
    fn default() -> Self {
        BoundarySection { bottom: WallModel::Specular, top: WallModel::Specular, x: XBoundary::ChargeNeutral }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub nx: usize,
    pub ny: usize,
    pub nw: usize,
    pub nmu: usize,
    pub nphi: usize,
    /// Energy cells per phonon energy; the energy cut-off is `nw / this` phonon energies.
    pub cells_per_phonon: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection { nx: 24, ny: 12, nw: 20, nmu: 8, nphi: 8, cells_per_phonon: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub final_time_ps: f64,
    pub cfl: f64,
    pub integrator: Integrator,
    pub collisions: CollisionModel,
    /// Interval between moment snapshots.
    pub output_every_ps: f64,
    /// Steps between progress lines; zero disables them.
    pub progress_every: usize,
    pub vtk: bool,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            final_time_ps: 1.0,
            cfl: 0.2,
            integrator: Integrator::Rk2,
            collisions: CollisionModel::Full,
            output_every_ps: 0.25,
            progress_every: 500,
            vtk: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub device: DeviceSection,
    pub doping: DopingSection,
    pub bias: BiasSection,
    pub boundary: BoundarySection,
    pub grid: GridSection,
    pub run: RunSection,
    pub material: Material,
    pub scales: Scales,
}

impl RunConfig {
    /// Parses and validates TOML text.
    pub fn parse(text: &str) -> Result<Self> {
        let de = toml::Deserializer::parse(text).map_err(|e| Error::config("<document>", e.message().trim().to_string()))?;
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(path, e.into_inner().message().trim().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |path: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::config(path, format!("must be positive and finite, got {v}")))
            }
        };
        let d = &self.device;
        positive("device.length_um", d.length_um)?;
        positive("device.height_um", d.height_um)?;
        if d.kind == DeviceKind::Dgmosfet {
            positive("device.oxide_um", d.oxide_um)?;
            if d.oxide_rows == 0 {
                return Err(Error::config("device.oxide_rows", "the MOSFET needs at least one oxide row"));
            }
            if !(0.0 <= d.gate_start_um && d.gate_start_um < d.gate_end_um && d.gate_end_um <= d.length_um) {
                return Err(Error::config(
                    "device.gate_start_um",
                    format!("gate [{}, {}] must lie inside [0, {}]", d.gate_start_um, d.gate_end_um, d.length_um),
                ));
            }
            if self.boundary.bottom != WallModel::Specular {
                return Err(Error::config("boundary.bottom", "the MOSFET symmetry plane at y = 0 must be specular"));
            }
            if self.doping.region.is_empty() {
                return Err(Error::config("doping.region", "the MOSFET needs explicit doping regions"));
            }
        }
        positive("doping.background_m3", self.doping.background_m3)?;
        for (r, region) in self.doping.region.iter().enumerate() {
            positive(&format!("doping.region[{r}].value_m3"), region.value_m3)?;
            for (name, v) in [("x_um", region.x_um), ("y_um", region.y_um)] {
                if !(v[0] < v[1]) || !v.iter().all(|x| x.is_finite()) {
                    return Err(Error::config(format!("doping.region[{r}].{name}"), "needs a finite increasing pair"));
                }
            }
        }
        for (path, v) in [("bias.source_v", self.bias.source_v), ("bias.drain_v", self.bias.drain_v), ("bias.gate_v", self.bias.gate_v)] {
            if !v.is_finite() {
                return Err(Error::config(path, "must be finite"));
            }
        }
        for (path, w) in [("boundary.bottom", self.boundary.bottom), ("boundary.top", self.boundary.top)] {
            w.validate().map_err(|e| Error::config(path, e.to_string()))?;
        }
        let g = &self.grid;
        for (path, n, min) in [("grid.nx", g.nx, 2), ("grid.ny", g.ny, 2), ("grid.nw", g.nw, 2), ("grid.nmu", g.nmu, 2), ("grid.nphi", g.nphi, 2)] {
            if n < min {
                return Err(Error::config(path, format!("needs at least {min} cells, got {n}")));
            }
        }
        if g.nphi % 2 != 0 {
            return Err(Error::config("grid.nphi", format!("must be even, got {}", g.nphi)));
        }
        if g.cells_per_phonon == 0 {
            return Err(Error::config("grid.cells_per_phonon", "must be at least 1"));
        }
        let r = &self.run;
        positive("run.final_time_ps", r.final_time_ps)?;
        positive("run.cfl", r.cfl)?;
        positive("run.output_every_ps", r.output_every_ps)?;
        self.material.validate().map_err(|e| Error::config("material", e.to_string()))?;
        positive("scales.length_m", self.scales.length_m)?;
        positive("scales.time_s", self.scales.time_s)?;
        positive("scales.voltage_v", self.scales.voltage_v)?;
        Ok(())
    }
}
