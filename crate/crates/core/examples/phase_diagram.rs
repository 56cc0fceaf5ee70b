//! Ground-state phase diagram over (detuning, pump), rendered as heatmaps of
//! |Theta| and delta_c/kappa.
//!
//! cargo run --release --example phase_diagram -- [points_per_axis] [threads]

use std::path::PathBuf;

use cavity_bec::plot::{render, PlotSpec};
use cavity_bec::sweep::{run_grid, write_grid_outputs, AxisRange, GridOptions, GridSpec, GridTask};

fn main() -> cavity_bec::Result<()> {
    let mut args = std::env::args().skip(1).filter_map(|a| a.parse::<usize>().ok());
    let n = args.next().unwrap_or(20);
    let threads = args.next().unwrap_or(1);
    let spec = GridSpec {
        delta_c_range: AxisRange::new(-3200.0, -300.0, n),
        pump_range: AxisRange::new(0.0, 90.0, n),
        tasks: vec![GridTask::Ground],
        ..GridSpec::default()
    };
    let out = PathBuf::from(std::env::var("CAVITY_BEC_OUT").unwrap_or_else(|_| "cavity-bec-out".into()))
        .join("phase_diagram");
    let outcome = run_grid(
        &spec,
        &GridOptions {
            parallelism: threads,
            checkpoint: Some(out.join("grid_checkpoint.json")),
            stop_after_rows: None,
        },
    )?;
    let csv = write_grid_outputs(&out, &outcome, threads)?;
    println!("{n}x{n} grid in {:.1} s -> {}", outcome.elapsed_seconds, csv.display());

    for (z, title) in [("abs_theta", "|Theta|"), ("delta_c_over_kappa", "delta_c / kappa")] {
        let mut plot = PlotSpec::heatmap(&csv, z);
        plot.title = Some(title.into());
        plot.x_label = Some("pump".into());
        plot.y_label = Some("Delta_c".into());
        plot.output = Some(out.join(format!("{z}.svg")));
        println!("wrote {}", render(&plot)?.display());
    }
    Ok(())
}
