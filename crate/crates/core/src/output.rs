//! Run orchestration from a configuration, and the CSV, VTK and JSON writers.

use crate::config::RunConfig;
use crate::device::build_problem;
use crate::driver::{Observer, Simulation};
use crate::error::{Error, Result};
use crate::observables::moments;
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::Write;
use std::path::Path;

/// Column order of the moments file.
pub const MOMENTS_HEADER: &str = "t_ps,x_um,y_um,rho_cm3,energy_eV,Ux,Uy,Vx_cms,Vy_cms,Ex_kVcm,Ey_kVcm,V_volts";
pub const MASS_HEADER: &str = "t_ps,relative_mass";

/// One cell of one snapshot, in physical units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentRow {
    pub t_ps: f64,
    pub x_um: f64,
    pub y_um: f64,
    pub rho_cm3: f64,
    #[serde(rename = "energy_eV")]
    pub energy_ev: f64,
    #[serde(rename = "Ux")]
    pub ux: f64,
    #[serde(rename = "Uy")]
    pub uy: f64,
    #[serde(rename = "Vx_cms")]
    pub vx_cms: f64,
    #[serde(rename = "Vy_cms")]
    pub vy_cms: f64,
    #[serde(rename = "Ex_kVcm")]
    pub ex_kvcm: f64,
    #[serde(rename = "Ey_kVcm")]
    pub ey_kvcm: f64,
    #[serde(rename = "V_volts")]
    pub v_volts: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassRow {
    pub t_ps: f64,
    pub relative_mass: f64,
}

/// Cell-mean moments of one instant; cells in the order `i * ny + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t_ps: f64,
    pub nx: usize,
    pub ny: usize,
    pub x_edges_um: Vec<f64>,
    pub y_edges_um: Vec<f64>,
    pub rows: Vec<MomentRow>,
}

impl Snapshot {
    pub fn capture(sim: &Simulation) -> Snapshot {
        let op = &sim.op;
        let g = &op.grid;
        let d = &op.dims;
        let um = d.scales.length_m / 1e-6;
        let t_ps = sim.time * d.scales.time_s / 1e-12;
        let m = moments(&sim.state, g, &op.tables, &op.flux);
        let field = sim.field();
        let e_kvcm = d.field_scale_v_m / 1e5;
        let mut rows = Vec::with_capacity(g.nx() * g.ny());
        for i in 0..g.nx() {
            for j in 0..g.ny() {
                let c = i * g.ny() + j;
                let p = m.physical(c, d);
                let f = &field.cells[c];
                let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
                let v_volts = field.solution.as_ref().map_or(0.0, |s| {
                    let rows = s.psi.len() / g.nx();
                    s.psi[i * rows + j][0] * d.scales.voltage_v
                });
                rows.push(MomentRow {
                    t_ps,
                    x_um: g.x.center(i) * um,
                    y_um: g.y.center(j) * um,
                    rho_cm3: p.rho_cm3,
                    energy_ev: p.energy_ev,
                    ux: p.ux,
                    uy: p.uy,
                    vx_cms: p.vx_cm_s,
                    vy_cms: p.vy_cm_s,
                    ex_kvcm: mean(&f.ex) * e_kvcm,
                    ey_kvcm: mean(&f.ey) * e_kvcm,
                    v_volts,
                });
            }
        }
        Snapshot {
            t_ps,
            nx: g.nx(),
            ny: g.ny(),
            x_edges_um: g.x.edges().iter().map(|x| x * um).collect(),
            y_edges_um: g.y.edges().iter().map(|y| y * um).collect(),
            rows,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub solver_version: String,
    pub steps: usize,
    pub final_time_ps: f64,
    pub final_relative_mass: f64,
    pub max_relative_mass_deviation: f64,
    pub wall_clock_s: f64,
    /// Echo of the configuration that produced the run.
    pub config: String,
}

#[derive(Debug, Clone)]
pub struct RunOutputs {
    pub snapshots: Vec<Snapshot>,
    pub mass: Vec<MassRow>,
    pub metadata: RunMetadata,
}

struct Recorder<'w> {
    mass: Vec<MassRow>,
    ps_per_unit: f64,
    progress_every: usize,
    log: &'w mut dyn Write,
}

impl Observer for Recorder<'_> {
    fn step(&mut self, sim: &Simulation) -> Result<()> {
        let rel = sim.relative_mass();
        let t_ps = sim.time * self.ps_per_unit;
        self.mass.push(MassRow { t_ps, relative_mass: rel });
        if self.progress_every > 0 && sim.steps % self.progress_every == 0 {
            let rho_max = crate::observables::density(&sim.state, &sim.op.grid)
                .iter()
                .map(|r| r[0])
                .fold(f64::NEG_INFINITY, f64::max);
            writeln!(
                self.log,
                "step {:>7}  t = {:.5} ps  relative mass = {:.12}  max density = {:.4e} cm^-3",
                sim.steps,
                t_ps,
                rel,
                rho_max * sim.op.dims.density_scale_m3 * 1e-6
            )
            .map_err(|e| Error::io("progress log", e))?;
        }
        Ok(())
    }
}

/// Integrates the configured device to its final time, capturing snapshots at
/// the output cadence and the relative mass after every step.
pub fn run(cfg: &RunConfig, log: &mut dyn Write) -> Result<RunOutputs> {
    let started = std::time::Instant::now();
    let mut sim = Simulation::new(build_problem(cfg)?)?;
    let ps_per_unit = cfg.scales.time_s / 1e-12;
    let t_end = cfg.run.final_time_ps / ps_per_unit;
    let every = cfg.run.output_every_ps / ps_per_unit;
    let mut snapshots = vec![Snapshot::capture(&sim)];
    let mut rec = Recorder { mass: vec![MassRow { t_ps: 0.0, relative_mass: 1.0 }], ps_per_unit, progress_every: cfg.run.progress_every, log };
    let mut k = 1usize;
    loop {
        let target = (k as f64 * every).min(t_end);
        sim.advance_to(target, &mut rec)?;
        snapshots.push(Snapshot::capture(&sim));
        if target >= t_end {
            break;
        }
        k += 1;
    }
    let max_dev = rec.mass.iter().map(|m| (m.relative_mass - 1.0).abs()).fold(0.0, f64::max);
    let metadata = RunMetadata {
        solver_version: env!("CARGO_PKG_VERSION").to_string(),
        steps: sim.steps,
        final_time_ps: sim.time * ps_per_unit,
        final_relative_mass: sim.relative_mass(),
        max_relative_mass_deviation: max_dev,
        wall_clock_s: started.elapsed().as_secs_f64(),
        config: cfg.to_toml(),
    };
    Ok(RunOutputs { snapshots, mass: rec.mass, metadata })
}

fn create(path: &Path) -> Result<fs::File> {
    fs::File::create(path).map_err(|e| Error::io(format!("creating {}", path.display()), e))
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    let io = match e.into_kind() {
        csv::ErrorKind::Io(io) => io,
        other => std::io::Error::other(format!("{other:?}")),
    };
    Error::io(format!("accessing {}", path.display()), io)
}

pub fn write_moments_csv(snapshots: &[Snapshot], path: &Path) -> Result<()> {
    if snapshots.is_empty() {
        return Err(Error::Step("no snapshots to write".into()));
    }
    let mut w = csv::Writer::from_writer(create(path)?);
    for s in snapshots {
        for r in &s.rows {
            w.serialize(r).map_err(|e| csv_err(path, e))?;
        }
    }
    w.flush().map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

pub fn read_moments_csv(path: &Path) -> Result<Vec<MomentRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    r.deserialize().map(|row| row.map_err(|e| csv_err(path, e))).collect()
}

pub fn write_mass_csv(mass: &[MassRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    for m in mass {
        w.serialize(m).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

/// Legacy-format VTK rectilinear grid with the cell means of one snapshot.
pub fn write_vtk(s: &Snapshot, path: &Path) -> Result<()> {
    let mut out = String::new();
    let coords = |v: &[f64]| v.iter().map(|x| format!("{x:e}")).collect::<Vec<_>>().join(" ");
    out.push_str("# vtk DataFile Version 3.0\n");
    out.push_str(&format!("moments at t = {} ps\nASCII\nDATASET RECTILINEAR_GRID\n", s.t_ps));
    out.push_str(&format!("DIMENSIONS {} {} 1\n", s.nx + 1, s.ny + 1));
    out.push_str(&format!("X_COORDINATES {} double\n{}\n", s.nx + 1, coords(&s.x_edges_um)));
    out.push_str(&format!("Y_COORDINATES {} double\n{}\n", s.ny + 1, coords(&s.y_edges_um)));
    out.push_str("Z_COORDINATES 1 double\n0\n");
    out.push_str(&format!("CELL_DATA {}\n", s.nx * s.ny));
    let fields: [(&str, fn(&MomentRow) -> f64); 9] = [
        ("rho_cm3", |r| r.rho_cm3),
        ("energy_eV", |r| r.energy_ev),
        ("Ux", |r| r.ux),
        ("Uy", |r| r.uy),
        ("Vx_cms", |r| r.vx_cms),
        ("Vy_cms", |r| r.vy_cms),
        ("Ex_kVcm", |r| r.ex_kvcm),
        ("Ey_kVcm", |r| r.ey_kvcm),
        ("V_volts", |r| r.v_volts),
    ];
    for (name, get) in fields {
        out.push_str(&format!("SCALARS {name} double 1\nLOOKUP_TABLE default\n"));
        // VTK cell order runs x fastest.
        for j in 0..s.ny {
            let line: Vec<String> = (0..s.nx).map(|i| format!("{:e}", get(&s.rows[i * s.ny + j]))).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
    }
    fs::write(path, out).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

impl RunOutputs {
    /// Writes `moments.csv`, `mass.csv`, `run.json`, `config.toml` and, when
    /// requested, one VTK file per snapshot.
    pub fn write(&self, dir: &Path, vtk: bool) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
        write_moments_csv(&self.snapshots, &dir.join("moments.csv"))?;
        write_mass_csv(&self.mass, &dir.join("mass.csv"))?;
        let json = serde_json::to_string_pretty(&self.metadata).expect("metadata serialises");
        fs::write(dir.join("run.json"), json).map_err(|e| Error::io("writing run.json", e))?;
        fs::write(dir.join("config.toml"), &self.metadata.config).map_err(|e| Error::io("writing config.toml", e))?;
        if vtk {
            for (k, s) in self.snapshots.iter().enumerate() {
                write_vtk(s, &dir.join(format!("moments_{k:04}.vtk")))?;
            }
        }
        Ok(())
    }
}
