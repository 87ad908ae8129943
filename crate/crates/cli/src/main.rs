use bte_dg::config::RunConfig;
use bte_dg::convergence::{poisson_study, transport_study, Study};
use bte_dg::device::{dimensionless, phase_grid};
use bte_dg::material::MomentumTables;
use bte_dg::output;
use clap::{Parser, Subcommand, ValueEnum};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "bte-dg", version, about = "Deterministic DG Boltzmann-Poisson device solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a device and write moments, mass history and metadata.
    Run {
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Worker threads; defaults to the rayon default.
        #[arg(long, env = "BTE_DG_THREADS")]
        threads: Option<usize>,
    },
    /// Parse and validate a configuration without running it.
    Validate { config: PathBuf },
    /// Print the dimensionless constants and momentum integral tables.
    Tables { config: PathBuf },
    /// Run a built-in order study and check the observed orders.
    Convergence { suite: Suite },
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Poisson,
    Transport,
}

/// Exit code for unreadable or invalid configurations.
const EXIT_CONFIG: u8 = 2;

fn load(path: &Path) -> Result<RunConfig, (u8, String)> {
    let text = std::fs::read_to_string(path).map_err(|e| (EXIT_CONFIG, format!("{}: {e}", path.display())))?;
    RunConfig::parse(&text).map_err(|e| (EXIT_CONFIG, format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn dispatch(command: Command) -> Result<(), (u8, String)> {
    let fail = |e: bte_dg::Error| (1, e.to_string());
    match command {
        Command::Run { config, out, threads } => {
            let cfg = load(&config)?;
            if let Some(n) = threads {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .map_err(|e| (1, format!("thread pool: {e}")))?;
            }
            println!("running {} into {}", config.display(), out.display());
            let outputs = output::run(&cfg, &mut std::io::stdout()).map_err(fail)?;
            outputs.write(&out, cfg.run.vtk).map_err(fail)?;
            let m = &outputs.metadata;
            println!(
                "done: {} steps to {:.4} ps, relative mass {:.12}, max deviation {:.3e}",
                m.steps, m.final_time_ps, m.final_relative_mass, m.max_relative_mass_deviation
            );
            Ok(())
        }
        Command::Validate { config } => {
            let cfg = load(&config)?;
            println!("{}: ok", config.display());
            print!("{}", cfg.to_toml());
            Ok(())
        }
        Command::Tables { config } => {
            let cfg = load(&config)?;
            let dims = dimensionless(&cfg).map_err(fail)?;
            let grid = phase_grid(&cfg, &dims).map_err(fail)?;
            let t = MomentumTables::new(&grid, dims.band());
            println!("# constants");
            println!("cx,ck,cv,cp,alpha,gamma,density_scale_m3");
            println!("{:e},{:e},{:e},{:e},{:e},{:e},{:e}", dims.cx, dims.ck, dims.cv, dims.cp, dims.alpha, dims.gamma, dims.density_scale_m3);
            println!("# energy cells");
            println!("k,w_lo,w_hi,speed,inv_wavenumber,maxwellian,jacobian_mean,energy_mean");
            for k in 0..grid.nw() {
                println!(
                    "{k},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                    grid.w.lo(k),
                    grid.w.hi(k),
                    t.speed[k],
                    t.inv_wavenumber[k],
                    t.maxwellian[k],
                    t.jacobian_mean[k],
                    t.energy_mean[k]
                );
            }
            println!("# polar cells");
            println!("m,mu_lo,mu_hi,mu_pos,mu_neg,sin_polar,inv_sin_polar");
            for m in 0..grid.nmu() {
                println!(
                    "{m},{:e},{:e},{:e},{:e},{:e},{:e}",
                    grid.mu.lo(m),
                    grid.mu.hi(m),
                    t.mu_pos[m],
                    t.mu_neg[m],
                    t.sin_polar[m],
                    t.inv_sin_polar[m]
                );
            }
            println!("# azimuthal cells");
            println!("n,phi_lo,phi_hi,cos_pos,cos_neg");
            for n in 0..grid.nphi() {
                println!("{n},{:e},{:e},{:e},{:e}", grid.phi.lo(n), grid.phi.hi(n), t.cos_pos[n], t.cos_neg[n]);
            }
            Ok(())
        }
        Command::Convergence { suite } => {
            let (name, study, required) = match suite {
                Suite::Poisson => ("poisson", poisson_study(&[6, 12, 24]).map_err(fail)?, 1.9),
                Suite::Transport => ("transport", transport_study(&[10, 20, 40]).map_err(fail)?, 1.8),
            };
            report(name, &study);
            let min = study.min_order();
            if min >= required {
                println!("{name}: minimum order {min:.3} >= {required}");
                Ok(())
            } else {
                Err((1, format!("{name}: minimum order {min:.3} below {required}")))
            }
        }
    }
}

fn report(name: &str, study: &Study) {
    println!("{name} study");
    println!("cells,l2_error,order");
    let orders = study.orders();
    for (k, (n, e)) in study.cells.iter().zip(&study.errors).enumerate() {
        let order = if k == 0 { String::from("-") } else { format!("{:.3}", orders[k - 1]) };
        println!("{n},{e:e},{order}");
    }
}
