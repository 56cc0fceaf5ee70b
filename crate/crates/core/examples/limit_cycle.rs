//! Periodicity test on the trailing quarter of full-model and approximate
//! quenches at a limit-cycle point.
//!
//! cargo run --release --example limit_cycle -- [t_final]

use cavity_bec::dynamics::{detect_limit_cycle, run_quench, IntegratorConfig, DEFAULT_WINDOW_FRACTION};
use cavity_bec::{Closure, ModelParams};

fn main() -> cavity_bec::Result<()> {
    let t_final: f64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(1000.0);
    let params = ModelParams::reference(-1900.0, 22.0);
    for closure in Closure::ALL {
        let cfg = IntegratorConfig::new(closure).with_t_final(t_final);
        let traj = run_quench(&params, &cfg)?;
        let r = detect_limit_cycle(&traj, DEFAULT_WINDOW_FRACTION)?;
        println!(
            "{:10} periodic {:5}  period {:.4}  peak-to-peak {:.3e}  autocorrelation {:.3}",
            closure.as_str(),
            r.is_periodic,
            r.period,
            r.amplitude,
            r.autocorrelation_peak
        );
    }
    Ok(())
}
