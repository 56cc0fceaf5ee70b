//! SVG figures from CSVs already written by the other commands.
//!
//! cargo run --release --example render_figures -- <dir>
//!
//! Renders every `quench_*.csv`, `metastable_*.csv`, `*_momentum.csv`,
//! `*_spectrum.csv` and `grid.csv` found in `<dir>` (default `$CAVITY_BEC_OUT` or `cavity-bec-out`).

use std::path::PathBuf;

use cavity_bec::plot::{render, ColorScale, PlotSpec};

fn main() -> cavity_bec::Result<()> {
    let dir = std::env::args()
        .nth(1)
        .or_else(|| std::env::var("CAVITY_BEC_OUT").ok())
        .map(PathBuf::from)
        .unwrap_or_else(|| "cavity-bec-out".into());
    let entries = std::fs::read_dir(&dir)
        .map_err(|e| cavity_bec::Error::Config(format!("{}: {e}", dir.display())))?;
    let mut names: Vec<String> = entries
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".csv"))
        .collect();
    names.sort();
    for name in names {
        let path = dir.join(&name);
        let specs = if name == "grid.csv" {
            let mut m1 = PlotSpec::heatmap(&path, "im_omega_crit_m1");
            m1.scale = ColorScale::Log;
            m1.clamp = Some([1e-4, 10.0]);
            m1.output = Some(dir.join("grid_m1.svg"));
            let mut theta = PlotSpec::heatmap(&path, "abs_theta");
            theta.output = Some(dir.join("grid_theta.svg"));
            vec![m1, theta]
        } else if name.ends_with("_momentum.csv") {
            let mut s = PlotSpec::timeseries(&path, "population");
            s.x = Some("n".into());
            vec![s]
        } else if name.ends_with("_spectrum.csv") {
            vec![PlotSpec::spectrum(&path)]
        } else if name.starts_with("quench_") || name.starts_with("metastable_") {
            vec![PlotSpec::timeseries(&path, "intensity")]
        } else {
            continue;
        };
        for s in specs {
            match render(&s) {
                Ok(p) => println!("wrote {}", p.display()),
                Err(e) => println!("skipped {name}: {e}"),
            }
        }
    }
    Ok(())
}
