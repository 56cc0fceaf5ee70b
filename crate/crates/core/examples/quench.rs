//! Quench from the homogeneous condensate under the three field closures,
//! side by side.
//!
//! cargo run --release --example quench -- [delta_c] [pump] [t_final]

use std::path::PathBuf;

use cavity_bec::commands::{cmd_quench, window_statistics};
use cavity_bec::dynamics::run_quench;
use cavity_bec::ground::ground_state;
use cavity_bec::plot::{render, PlotSpec};
use cavity_bec::{Closure, RunConfig};

fn main() -> cavity_bec::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let delta_c = args.first().copied().unwrap_or(-2150.0);
    let pump = args.get(1).copied().unwrap_or(27.0);
    let t_final = args.get(2).copied().unwrap_or(200.0);
    let cfg = RunConfig::load(
        None,
        &[
            format!("params.delta_c_bare={delta_c}"),
            format!("params.pump={pump}"),
            format!("quench.t_final={t_final}"),
        ],
    )?;
    let out = PathBuf::from(std::env::var("CAVITY_BEC_OUT").unwrap_or_else(|_| "cavity-bec-out".into()))
        .join(format!("quench_{}_{}", -delta_c as i64, pump as i64));

    let summary = cmd_quench(&cfg, &out)?;
    if let Ok(g) = ground_state(&cfg.params, &cfg.itpm) {
        println!("stationary |alpha0|^2 = {:.6e}", g.intensity());
    }
    for e in &summary.closures {
        println!(
            "{:10} late mean {:.6e}  std {:.3e}  periodic {}",
            e.closure.as_str(),
            e.mean_intensity.unwrap_or(f64::NAN),
            e.std_intensity.unwrap_or(f64::NAN),
            e.limit_cycle.map(|l| l.is_periodic).unwrap_or(false)
        );
        for w in &e.warnings {
            println!("  warning: {w}");
        }
    }

    // The library call behind the command, for a single closure.
    let integ = cfg.quench.integrator(Closure::Adiabatic, t_final.min(50.0));
    let traj = run_quench(&cfg.params, &integ)?;
    let (m, s) = window_statistics(&traj, 0.25);
    println!("adiabatic to t = {}: mean {m:.4e}, std {s:.3e}", traj.t_end());

    for c in Closure::ALL {
        let mut plot = PlotSpec::timeseries(out.join(format!("quench_{c}.csv")), "intensity");
        plot.title = Some(format!("{c} at ({delta_c}, {pump})"));
        plot.y_label = Some("|alpha|^2".into());
        render(&plot)?;
    }
    println!("CSVs and SVGs in {}", out.display());
    Ok(())
}
