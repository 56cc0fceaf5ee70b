//! Argument parsing and exit-code mapping for the `cavity-bec` binary.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands;
use crate::config::RunConfig;
use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_COMPUTATION: i32 = 2;

pub const OUT_ENV: &str = "CAVITY_BEC_OUT";
pub const DEFAULT_OUT: &str = "cavity-bec-out";

#[derive(Parser, Debug)]
#[command(name = "cavity-bec", version, about = "Driven BEC in a dissipative cavity: ground states, quenches, stability maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// JSON configuration file.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Override a configuration value, e.g. `--set params.pump=22`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory (default: $CAVITY_BEC_OUT, then `out_dir` from the config, then ./cavity-bec-out).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Stationary state by imaginary-time propagation.
    Ground(Common),
    /// Real-time evolution after switching on the pump.
    Quench(Common),
    /// Fluctuation spectra around the stationary state.
    Stability(Common),
    /// Phase diagram over a (detuning, pump) grid.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Worker threads (default: available cores).
        #[arg(long, value_name = "N")]
        parallel: Option<usize>,
        /// Continue from the checkpoint in the output directory.
        #[arg(long)]
        resume: bool,
    },
    /// Limit cycle continued adiabatically, next to the stationary state.
    Metastable(Common),
    /// SVG figure from a CSV produced by the other commands.
    Render(Common),
}

fn out_dir(flag: Option<PathBuf>, cfg: &RunConfig) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .or_else(|| cfg.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

pub fn exit_code(err: &Error) -> i32 {
    if err.is_usage_error() {
        EXIT_USAGE
    } else {
        EXIT_COMPUTATION
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let (common, parallel, resume) = match &cli.command {
        Command::Ground(c)
        | Command::Quench(c)
        | Command::Stability(c)
        | Command::Metastable(c)
        | Command::Render(c) => (c.clone(), None, false),
        Command::Sweep {
            common,
            parallel,
            resume,
        } => (common.clone(), *parallel, *resume),
    };
    let cfg = match RunConfig::load(common.config.as_deref(), &common.set) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    if parallel == Some(0) {
        eprintln!("error: --parallel must be at least 1");
        return EXIT_USAGE;
    }
    let out = out_dir(common.out, &cfg);
    match dispatch(&cli.command, &cfg, &out, parallel, resume) {
        Ok(msg) => {
            println!("{msg}");
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(
    command: &Command,
    cfg: &RunConfig,
    out: &std::path::Path,
    parallel: Option<usize>,
    resume: bool,
) -> crate::Result<String> {
    match command {
        Command::Ground(_) => {
            let g = commands::cmd_ground(cfg, out)?;
            Ok(format!(
                "ground state: |Theta| = {:.6}, |alpha0|^2 = {:.6e}, {} iterations -> {}",
                g.abs_theta(),
                g.intensity(),
                g.iterations,
                out.display()
            ))
        }
        Command::Quench(_) => {
            let s = commands::cmd_quench(cfg, out)?;
            let lines: Vec<String> = s
                .closures
                .iter()
                .map(|e| match &e.limit_cycle {
                    Some(lc) => format!(
                        "{}: periodic = {}, period = {:.4}, acf = {:.3}",
                        e.closure, lc.is_periodic, lc.period, lc.autocorrelation_peak
                    ),
                    None => format!("{}: {}", e.closure, e.error.as_deref().unwrap_or("no report")),
                })
                .collect();
            Ok(format!("{}\n-> {}", lines.join("\n"), out.display()))
        }
        Command::Stability(_) => {
            let (s, _) = commands::cmd_stability(cfg, out)?;
            let lines: Vec<String> = s
                .reports
                .iter()
                .map(|r| format!("{}: Im(omega_crit) = {:.4e}, label {}", r.matrix, r.im_omega_crit, r.label))
                .collect();
            Ok(format!("{}\n-> {}", lines.join("\n"), out.display()))
        }
        Command::Sweep { .. } => {
            let threads = parallel.unwrap_or_else(|| {
                std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
            });
            let o = commands::cmd_sweep(cfg, out, threads, resume)?;
            Ok(format!(
                "grid {}x{}: {} points evaluated in {:.1} s -> {}",
                o.spec.rows(),
                o.spec.cols(),
                o.evaluated_points,
                o.elapsed_seconds,
                out.join("grid.csv").display()
            ))
        }
        Command::Metastable(_) => {
            let s = commands::cmd_metastable(cfg, out)?;
            Ok(format!(
                "limit cycle period {:.4} -> {:.4} after continuation; stationary deviation {:.2e} -> {}",
                s.quench.period,
                s.continuation.period,
                s.stationary_max_rel_deviation,
                out.display()
            ))
        }
        Command::Render(_) => {
            let path = commands::cmd_render(cfg, out)?;
            Ok(format!("wrote {}", path.display()))
        }
    }
}
