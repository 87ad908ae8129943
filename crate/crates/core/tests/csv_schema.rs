//! Golden schema of the CSV files consumed by the plotting pipeline.

use bte_dg::config::RunConfig;
use bte_dg::output::{self, MASS_HEADER, MOMENTS_HEADER};

const GOLDEN_MOMENTS: &str = "t_ps,x_um,y_um,rho_cm3,energy_eV,Ux,Uy,Vx_cms,Vy_cms,Ex_kVcm,Ey_kVcm,V_volts";
const GOLDEN_MASS: &str = "t_ps,relative_mass";

const TINY: &str = "[grid]\nnx = 4\nny = 2\nnw = 6\nnmu = 2\nnphi = 2\n[run]\nfinal_time_ps = 0.004\noutput_every_ps = 0.002\nprogress_every = 0\nvtk = true\n";

#[test]
fn header_constants_match_golden() {
    assert_eq!(MOMENTS_HEADER, GOLDEN_MOMENTS);
    assert_eq!(MASS_HEADER, GOLDEN_MASS);
}

#[test]
fn written_files_follow_the_schema() {
    let dir = std::env::temp_dir().join(format!("bte-dg-schema-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    let cfg = RunConfig::parse(TINY).unwrap();
    let out = output::run(&cfg, &mut std::io::sink()).unwrap();
    out.write(&dir, cfg.run.vtk).unwrap();

    let moments = std::fs::read_to_string(dir.join("moments.csv")).unwrap();
    let mut lines = moments.lines();
    assert_eq!(lines.next(), Some(GOLDEN_MOMENTS));
    let columns = GOLDEN_MOMENTS.split(',').count();
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), out.snapshots.len() * 4 * 2);
    for row in &rows {
        let fields: Vec<f64> = row.split(',').map(|f| f.parse().unwrap()).collect();
        assert_eq!(fields.len(), columns);
        assert!(fields.iter().all(|v| v.is_finite()));
    }
    let times: Vec<f64> = rows.iter().map(|r| r.split(',').next().unwrap().parse().unwrap()).collect();
    assert!(times.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(times[0], 0.0);

    let mass = std::fs::read_to_string(dir.join("mass.csv")).unwrap();
    let mut lines = mass.lines();
    assert_eq!(lines.next(), Some(GOLDEN_MASS));
    let first: Vec<f64> = lines.next().unwrap().split(',').map(|f| f.parse().unwrap()).collect();
    assert_eq!(first, vec![0.0, 1.0]);

    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("run.json")).unwrap()).unwrap();
    for key in ["solver_version", "steps", "final_time_ps", "final_relative_mass", "max_relative_mass_deviation", "config"] {
        assert!(meta.get(key).is_some(), "run.json lacks {key}");
    }
    assert!(dir.join("config.toml").is_file());
    assert!(dir.join("moments_0000.vtk").is_file());
    let _ = std::fs::remove_dir_all(&dir);
}
