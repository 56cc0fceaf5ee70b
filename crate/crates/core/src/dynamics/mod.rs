//! Real-time propagation of the coupled condensate and cavity field.

mod integrator;
mod limit_cycle;
mod trajectory;

pub use integrator::{
    continue_with_closure, propagate, run_quench, step_adiabatic, step_corrected, step_full,
    IntegratorConfig, DEFAULT_SEED_EPSILON,
};
pub use limit_cycle::{
    detect_limit_cycle, detect_periodicity, LimitCycleReport, DEFAULT_WINDOW_FRACTION,
    PERIODICITY_THRESHOLD,
};
pub use trajectory::Trajectory;
