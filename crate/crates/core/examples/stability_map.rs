//! Fluctuation spectra (with and without cavity fluctuations) at the four
//! reference points of the phase diagram.
//!
//! cargo run --release --example stability_map

use std::path::PathBuf;

use cavity_bec::ground::{ground_state, ItpmConfig};
use cavity_bec::io::write_stability;
use cavity_bec::plot::{render, PlotSpec};
use cavity_bec::stability::{analyze, MatrixKind};
use cavity_bec::ModelParams;

fn main() -> cavity_bec::Result<()> {
    let out = PathBuf::from(std::env::var("CAVITY_BEC_OUT").unwrap_or_else(|_| "cavity-bec-out".into()))
        .join("stability_map");
    let points = [(-700.0, 80.0), (-2150.0, 27.0), (-1900.0, 22.0), (-1450.0, 60.0)];
    for (delta_c, pump) in points {
        let params = ModelParams::reference(delta_c, pump);
        let g = ground_state(&params, &ItpmConfig::default())?;
        print!("({delta_c:6.0}, {pump:4.0})  |Theta| {:.4}", g.abs_theta());
        for kind in MatrixKind::ALL {
            let r = analyze(kind, &params, &g)?;
            print!("  {kind}: Im {:.3e} {:8}", r.im_omega_crit, r.phase_label.as_str());
            let stem = format!("{}_{}_{}", -delta_c as i64, pump as i64, kind.as_str().to_lowercase());
            write_stability(&out, &stem, &r)?;
            let mut plot = PlotSpec::spectrum(out.join(format!("{stem}_spectrum.csv")));
            plot.title = Some(format!("{kind} at ({delta_c}, {pump})"));
            render(&plot)?;
        }
        println!();
    }
    println!("spectra and SVGs in {}", out.display());
    Ok(())
}
