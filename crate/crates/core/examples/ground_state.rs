//! Stationary state by imaginary-time propagation and its momentum
//! distribution.
//!
//! cargo run --release --example ground_state -- [delta_c] [pump]

use cavity_bec::ground::{ground_state, ItpmConfig};
use cavity_bec::io::write_ground_state;
use cavity_bec::stability::critical_pump;
use cavity_bec::ModelParams;

fn main() -> cavity_bec::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let delta_c = args.first().copied().unwrap_or(-2150.0);
    let pump = args.get(1).copied().unwrap_or(27.0);
    let params = ModelParams::reference(delta_c, pump);

    let g = ground_state(&params, &ItpmConfig::default())?;
    match critical_pump(&params) {
        Ok(pc) => println!("critical pump {pc:.3} (pump / critical = {:.3})", pump / pc),
        Err(e) => println!("{e}"),
    }
    println!(
        "|Theta| = {:.6}, B = {:.6}, |alpha0|^2 = {:.6e}, delta_c/kappa = {:.4}, mu = {:.4}",
        g.abs_theta(),
        g.observables.bunching,
        g.intensity(),
        g.observables.delta_c_eff / params.kappa,
        g.chemical_potential
    );
    println!("converged after {} iterations (residual {:.2e})", g.iterations, g.residual);
    for n in -4..=4 {
        println!("  n = {n:+}: population {:.3e}", g.state.amplitude(n).norm_sqr());
    }

    let out = std::path::PathBuf::from(
        std::env::var("CAVITY_BEC_OUT").unwrap_or_else(|_| "cavity-bec-out".into()),
    );
    write_ground_state(&out, "example_ground", &g)?;
    println!("wrote {}", out.join("example_ground.json").display());
    Ok(())
}
