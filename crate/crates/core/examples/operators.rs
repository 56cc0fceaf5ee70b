//! Momentum-ladder operators and the three cavity-field closures for a
//! small hand-made state.
//!
//! cargo run --release --example operators

use cavity_bec::physics::{
    adiabatic_field, bunching_matrix, corrected_field, observable_derivatives, theta_matrix,
};
use cavity_bec::{ModelParams, MomentumState};
use num_complex::Complex64 as C64;

fn main() -> cavity_bec::Result<()> {
    let n_max = 3;
    let theta = theta_matrix(n_max).to_dense();
    let bunch = bunching_matrix(n_max).to_dense();
    println!("Theta on n = -3..3 (real parts):");
    for i in 0..theta.rows() {
        let row: Vec<String> = theta.row(i).iter().map(|z| format!("{:5.2}", z.re)).collect();
        println!("  {}", row.join(" "));
    }
    println!("B on n = -3..3 (real parts):");
    for i in 0..bunch.rows() {
        let row: Vec<String> = bunch.row(i).iter().map(|z| format!("{:5.2}", z.re)).collect();
        println!("  {}", row.join(" "));
    }

    // A running superposition of n = 0 and n = +-1 with a relative phase, so
    // the density grating moves and the derivatives are non-zero.
    let mut c = vec![C64::new(0.0, 0.0); 2 * n_max + 1];
    c[n_max] = C64::new(0.9, 0.0);
    c[n_max + 1] = C64::from_polar(0.3, 0.4);
    c[n_max - 1] = C64::from_polar(0.3, -0.2);
    let state = MomentumState::from_amplitudes(c)?.normalized();
    let (th, b) = (state.theta(), state.bunching());
    let (th_dot, b_dot) = observable_derivatives(&state)?;
    println!("<Theta> = {th:.6}, <B> = {b:.6}, dTheta/dt = {th_dot:.6}, dB/dt = {b_dot:.6}");

    let params = ModelParams::reference(-2150.0, 27.0).with_n_max(n_max);
    let a0 = adiabatic_field(&params, th, b);
    let a1 = corrected_field(&params, th, b, th_dot, b_dot);
    println!("adiabatic alpha = {:.6e}, |alpha|^2 = {:.4e}", a0.alpha, a0.intensity());
    println!("corrected alpha = {:.6e}, |alpha|^2 = {:.4e}", a1.alpha, a1.intensity());
    Ok(())
}
