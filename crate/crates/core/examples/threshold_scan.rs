//! Pump scan at fixed detuning: locates the onset of self-organization and
//! compares it with the closed-form threshold.
//!
//! cargo run --release --example threshold_scan -- [delta_c]

use cavity_bec::commands::pump_scan;
use cavity_bec::stability::{critical_pump, ORGANIZATION_THRESHOLD};
use cavity_bec::RunConfig;

fn main() -> cavity_bec::Result<()> {
    let delta_c: f64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(-2150.0);
    let cfg = RunConfig::load(None, &[format!("params.delta_c_bare={delta_c}")])?;
    let pc = critical_pump(&cfg.params)?;

    let pumps: Vec<f64> = (0..41).map(|i| 15.0 + 0.5 * i as f64).collect();
    let results = pump_scan(&cfg, &pumps)?;
    let mut onset = None;
    for (p, g) in pumps.iter().zip(&results) {
        let organized = g.abs_theta() >= ORGANIZATION_THRESHOLD;
        println!("pump {p:5.1}  |Theta| {:.4e}  iterations {:7}{}", g.abs_theta(), g.iterations, if g.converged { "" } else { "  (not converged)" });
        if organized && onset.is_none() {
            onset = Some(*p);
        }
    }
    match onset {
        Some(p) => println!(
            "onset {p:.2} vs formula {pc:.3}: relative deviation {:.2}%",
            100.0 * (p - pc) / pc
        ),
        None => println!("no organized point in the scan (formula {pc:.3})"),
    }
    Ok(())
}
