use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const TINY: &str = "[grid]\nnx = 6\nny = 2\nnw = 6\nnmu = 2\nnphi = 2\n[run]\nfinal_time_ps = 0.02\noutput_every_ps = 0.01\nprogress_every = 0\n";

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bte-dg")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("bte-dg-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_reports_key_path_and_exit_code() {
    let dir = scratch("validate");
    let bad = dir.join("bad.toml");
    std::fs::write(&bad, "[grid]\nnx = \"many\"\n").unwrap();
    let out = bin(&["validate", path(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("grid.nx"), "{err}");

    let good = dir.join("good.toml");
    std::fs::write(&good, TINY).unwrap();
    assert!(bin(&["validate", path(&good)]).status.success());
}

#[test]
fn missing_config_is_a_config_error() {
    let out = bin(&["validate", "/nonexistent/run.toml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn run_writes_outputs_and_echoed_config_reproduces_them() {
    let dir = scratch("run");
    let cfg = dir.join("tiny.toml");
    std::fs::write(&cfg, TINY).unwrap();
    let first = dir.join("first");
    let out = bin(&["run", path(&cfg), "--out", path(&first), "--threads", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["moments.csv", "mass.csv", "run.json", "config.toml"] {
        assert!(first.join(f).is_file(), "missing {f}");
    }
    let moments = std::fs::read_to_string(first.join("moments.csv")).unwrap();
    assert!(moments.starts_with("t_ps,x_um,y_um,rho_cm3,energy_eV,"));

    let second = dir.join("second");
    let echoed = first.join("config.toml");
    let out = bin(&["run", path(&echoed), "--out", path(&second), "--threads", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::read(first.join("moments.csv")).unwrap(), std::fs::read(second.join("moments.csv")).unwrap());
    assert_eq!(std::fs::read(first.join("mass.csv")).unwrap(), std::fs::read(second.join("mass.csv")).unwrap());
}

#[test]
fn tables_lists_all_momentum_cells() {
    let dir = scratch("tables");
    let cfg = dir.join("tiny.toml");
    std::fs::write(&cfg, TINY).unwrap();
    let out = bin(&["tables", path(&cfg)]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("# energy cells"));
    assert_eq!(text.lines().filter(|l| l.starts_with(char::is_numeric)).count(), 1 + 6 + 2 + 2);
}

#[test]
fn poisson_convergence_suite_passes() {
    let out = bin(&["convergence", "poisson"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
}
