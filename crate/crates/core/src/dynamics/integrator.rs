use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::Trajectory;
use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::physics::{
    adiabatic_alpha, apply_hamiltonian, corrected_alpha, derivatives_fast, effective_detuning,
    expect_bunching, expect_theta, field_couplings, normalize_slice, CavityAmplitude, Closure,
    MomentumState, Observables, EDGE_POPULATION_WARNING,
};

/// Amplitude placed on `n = +-1` to break the symmetry of `|p = 0>`.
pub const DEFAULT_SEED_EPSILON: f64 = 1e-3;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const MINUS_I: C64 = C64 { re: 0.0, im: -1.0 };

/// Largest full-ODE step as a fraction of the cavity lifetime.
const STIFFNESS_FRACTION: f64 = 0.1;
/// Renormalization factors further than this from one are flagged.
const NORM_DRIFT_WARNING: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    /// Fixed RK4 step (1/omega_r).
    pub dt: f64,
    /// Length of the run (1/omega_r).
    pub t_final: f64,
    pub closure: Closure,
    /// Record every `record_stride` steps.
    pub record_stride: usize,
    pub seed_epsilon: f64,
}

impl IntegratorConfig {
    /// Defaults: `dt = 1e-4` for the full model, `1e-3` otherwise; samples every 0.01.
    pub fn new(closure: Closure) -> Self {
        let (dt, record_stride) = match closure {
            Closure::FullOde => (1e-4, 100),
            Closure::Adiabatic | Closure::Corrected => (1e-3, 10),
        };
        Self {
            dt,
            t_final: 200.0,
            closure,
            record_stride,
            seed_epsilon: DEFAULT_SEED_EPSILON,
        }
    }

    pub fn with_t_final(self, t_final: f64) -> Self {
        Self { t_final, ..self }
    }

    pub fn with_dt(self, dt: f64) -> Self {
        Self { dt, ..self }
    }

    pub fn with_record_stride(self, record_stride: usize) -> Self {
        Self {
            record_stride,
            ..self
        }
    }

    pub fn with_seed_epsilon(self, seed_epsilon: f64) -> Self {
        Self {
            seed_epsilon,
            ..self
        }
    }

    /// Same settings (step size included) under another closure.
    pub fn with_closure(self, closure: Closure) -> Self {
        Self { closure, ..self }
    }

    pub fn steps(&self) -> usize {
        (self.t_final / self.dt).round() as usize
    }

    pub fn validate(&self, params: &ModelParams) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid("integrator.dt", "must be positive and finite"));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(Error::invalid("integrator.t_final", "must be >= 0 and finite"));
        }
        if self.record_stride == 0 {
            return Err(Error::invalid("integrator.record_stride", "must be >= 1"));
        }
        if !(self.seed_epsilon >= 0.0 && self.seed_epsilon < 0.5f64.sqrt()) {
            return Err(Error::invalid(
                "integrator.seed_epsilon",
                "must be in [0, 1/sqrt(2))",
            ));
        }
        if self.closure == Closure::FullOde {
            check_stiffness(params, self.dt)?;
        }
        Ok(())
    }
}

fn check_stiffness(params: &ModelParams, dt: f64) -> Result<()> {
    let bound = STIFFNESS_FRACTION / params.kappa;
    if dt > bound * (1.0 + 1e-12) {
        Err(Error::StepTooLarge { dt, bound })
    } else {
        Ok(())
    }
}

/// RK4 stepper with preallocated stage buffers.
pub(crate) struct Stepper {
    params: ModelParams,
    closure: Closure,
    k: [Vec<C64>; 4],
    ka: [C64; 4],
    stage: Vec<C64>,
}

impl Stepper {
    pub(crate) fn new(params: ModelParams, closure: Closure) -> Self {
        let dim = params.dim();
        Self {
            params,
            closure,
            k: std::array::from_fn(|_| vec![ZERO; dim]),
            ka: [ZERO; 4],
            stage: vec![ZERO; dim],
        }
    }

    /// Field seen by the atoms in state `c` (the carried amplitude for the full model).
    #[inline]
    fn closure_field(&self, c: &[C64], carried: C64) -> C64 {
        match self.closure {
            Closure::FullOde => carried,
            Closure::Adiabatic => adiabatic_alpha(&self.params, expect_theta(c), expect_bunching(c)),
            Closure::Corrected => {
                let (td, bd) = derivatives_fast(c, self.params.n_max);
                corrected_alpha(&self.params, expect_theta(c), expect_bunching(c), td, bd)
            }
        }
    }

    /// Time derivative of `(c, alpha)`; `dalpha` is zero unless the cavity is dynamical.
    #[inline]
    fn rhs(&self, c: &[C64], alpha: C64, dc: &mut [C64]) -> C64 {
        let field = self.closure_field(c, alpha);
        let (stark, drive) = field_couplings(&self.params, field);
        apply_hamiltonian(c, stark, drive, self.params.n_max, dc);
        dc.iter_mut().for_each(|z| *z *= MINUS_I);
        if self.closure == Closure::FullOde {
            let p = &self.params;
            let detuning = effective_detuning(p, expect_bunching(c));
            C64::new(-p.kappa, detuning) * alpha + MINUS_I * (p.pump * expect_theta(c))
        } else {
            ZERO
        }
    }

    /// One RK4 step followed by renormalization. Returns `|norm - 1|` before
    /// renormalization.
    pub(crate) fn step(&mut self, c: &mut [C64], alpha: &mut C64, dt: f64) -> f64 {
        let dim = c.len();
        let half = 0.5 * dt;

        let mut k = std::mem::take(&mut self.k);
        let mut stage = std::mem::take(&mut self.stage);

        self.ka[0] = self.rhs(c, *alpha, &mut k[0]);
        for i in 0..dim {
            stage[i] = c[i] + k[0][i] * half;
        }
        self.ka[1] = self.rhs(&stage, *alpha + self.ka[0] * half, &mut k[1]);
        for i in 0..dim {
            stage[i] = c[i] + k[1][i] * half;
        }
        self.ka[2] = self.rhs(&stage, *alpha + self.ka[1] * half, &mut k[2]);
        for i in 0..dim {
            stage[i] = c[i] + k[2][i] * dt;
        }
        self.ka[3] = self.rhs(&stage, *alpha + self.ka[2] * dt, &mut k[3]);

        let sixth = dt / 6.0;
        for i in 0..dim {
            c[i] += (k[0][i] + (k[1][i] + k[2][i]) * 2.0 + k[3][i]) * sixth;
        }
        if self.closure == Closure::FullOde {
            *alpha += (self.ka[0] + (self.ka[1] + self.ka[2]) * 2.0 + self.ka[3]) * sixth;
        }

        self.k = k;
        self.stage = stage;
        let norm = normalize_slice(c);
        (norm - 1.0).abs()
    }

    /// Cavity amplitude reported alongside state `c`.
    pub(crate) fn reported_field(&self, c: &[C64], carried: C64) -> CavityAmplitude {
        CavityAmplitude::new(self.closure_field(c, carried), self.closure)
    }
}

fn all_finite(c: &[C64], alpha: C64) -> bool {
    alpha.re.is_finite()
        && alpha.im.is_finite()
        && c.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

fn check_dims(params: &ModelParams, state: &MomentumState) -> Result<()> {
    if state.n_max() != params.n_max {
        return Err(Error::invalid(
            "state",
            format!(
                "momentum cutoff {} does not match params.n_max = {}",
                state.n_max(),
                params.n_max
            ),
        ));
    }
    Ok(())
}

fn single_step(
    params: &ModelParams,
    closure: Closure,
    state: &MomentumState,
    alpha: C64,
    dt: f64,
) -> Result<(MomentumState, CavityAmplitude)> {
    check_dims(params, state)?;
    let mut stepper = Stepper::new(*params, closure);
    let mut next = state.clone();
    let mut a = alpha;
    stepper.step(next.amplitudes_mut(), &mut a, dt);
    if !all_finite(next.amplitudes(), a) {
        return Err(Error::NonFinite { time: dt });
    }
    let field = stepper.reported_field(next.amplitudes(), a);
    Ok((next, field))
}

/// One RK4 step of the atoms coupled to the dynamical cavity field.
pub fn step_full(
    params: &ModelParams,
    state: &MomentumState,
    alpha: CavityAmplitude,
    dt: f64,
) -> Result<(MomentumState, CavityAmplitude)> {
    check_stiffness(params, dt)?;
    single_step(params, Closure::FullOde, state, alpha.alpha, dt)
}

/// One RK4 step with the cavity replaced by its instantaneous stationary field.
pub fn step_adiabatic(params: &ModelParams, state: &MomentumState, dt: f64) -> Result<MomentumState> {
    single_step(params, Closure::Adiabatic, state, ZERO, dt).map(|(s, _)| s)
}

/// One RK4 step with the retardation-corrected field.
pub fn step_corrected(params: &ModelParams, state: &MomentumState, dt: f64) -> Result<MomentumState> {
    single_step(params, Closure::Corrected, state, ZERO, dt).map(|(s, _)| s)
}

/// Quench from the seeded zero-momentum state with an empty cavity.
pub fn run_quench(params: &ModelParams, config: &IntegratorConfig) -> Result<Trajectory> {
    params.validate()?;
    config.validate(params)?;
    let state = MomentumState::seeded(params.n_max, config.seed_epsilon);
    propagate(params, config, state, ZERO, 0.0)
}

/// Restarts from the end of `traj` under `new_closure`, with the remaining
/// settings taken from `config`.
pub fn continue_with_closure(
    traj: &Trajectory,
    new_closure: Closure,
    config: &IntegratorConfig,
) -> Result<Trajectory> {
    let config = config.with_closure(new_closure);
    let t0 = traj.times.last().copied().unwrap_or(0.0);
    propagate(
        &traj.params,
        &config,
        traj.final_state.clone(),
        traj.final_field.alpha,
        t0,
    )
}

/// Integrates `config.steps()` RK4 steps from `(state, alpha)` starting at `t0`.
///
/// `alpha` is only used by the full model; the approximate closures derive the
/// field from the state.
pub fn propagate(
    params: &ModelParams,
    config: &IntegratorConfig,
    state: MomentumState,
    alpha: C64,
    t0: f64,
) -> Result<Trajectory> {
    params.validate()?;
    config.validate(params)?;
    check_dims(params, &state)?;

    let steps = config.steps();
    let capacity = steps / config.record_stride + 1;
    let mut stepper = Stepper::new(*params, config.closure);
    let mut c = state.into_amplitudes();
    normalize_slice(&mut c);
    let mut alpha = alpha;

    let mut traj = Trajectory::with_capacity(*params, *config, capacity);
    let mut edge_warned = false;
    let mut drift_warned = false;
    let mut window_drift: f64 = 0.0;

    let record = |traj: &mut Trajectory, c: &[C64], alpha: C64, t: f64, drift: f64, stepper: &Stepper| {
        let field = stepper.reported_field(c, alpha);
        let state = MomentumState::from_amplitudes(c.to_vec()).expect("ladder length is odd");
        let obs = Observables::measure(params, &state, field.alpha);
        let edge = state.edge_population();
        traj.push_sample(t, obs, field, drift, edge);
        edge
    };

    let edge = record(&mut traj, &c, alpha, t0, 0.0, &stepper);
    if edge > EDGE_POPULATION_WARNING {
        traj.warnings.push(edge_warning(t0, edge));
        edge_warned = true;
    }

    for step in 1..=steps {
        let drift = stepper.step(&mut c, &mut alpha, config.dt);
        window_drift = window_drift.max(drift);
        let t = t0 + step as f64 * config.dt;
        if !all_finite(&c, alpha) {
            return Err(Error::NonFinite { time: t });
        }
        if drift > NORM_DRIFT_WARNING && !drift_warned {
            traj.warnings.push(format!(
                "renormalization factor deviates from 1 by {drift:.3e} at t = {t:.6}"
            ));
            drift_warned = true;
        }
        if step % config.record_stride == 0 {
            let edge = record(&mut traj, &c, alpha, t, window_drift, &stepper);
            window_drift = 0.0;
            if edge > EDGE_POPULATION_WARNING && !edge_warned {
                traj.warnings.push(edge_warning(t, edge));
                edge_warned = true;
            }
        }
    }

    let final_field = stepper.reported_field(&c, alpha);
    traj.final_state = MomentumState::from_amplitudes(c).expect("ladder length is odd");
    traj.final_field = final_field;
    Ok(traj)
}

fn edge_warning(t: f64, edge: f64) -> String {
    format!(
        "edge population {edge:.3e} exceeds {EDGE_POPULATION_WARNING:e} at t = {t:.6}; momentum cutoff may be too small"
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_momentum_is_a_fixed_point_of_every_closure() {
        let p = ModelParams::reference(-2150.0, 27.0);
        let s = MomentumState::zero_momentum(p.n_max);
        let (next, field) = step_full(&p, &s, CavityAmplitude::empty(Closure::FullOde), 1e-4).unwrap();
        assert!(next
            .amplitudes()
            .iter()
            .zip(s.amplitudes())
            .all(|(a, b)| (a - b).norm() < 1e-14));
        assert!(field.alpha.norm() < 1e-14);
        for step in [step_adiabatic, step_corrected] {
            let next = step(&p, &s, 1e-3).unwrap();
            assert!((next.amplitude(0) - 1.0).norm() < 1e-14);
        }
    }

    #[test]
    fn stiffness_bound_is_enforced() {
        let p = ModelParams::reference(-2150.0, 27.0);
        let s = MomentumState::zero_momentum(p.n_max);
        let err = step_full(&p, &s, CavityAmplitude::empty(Closure::FullOde), 1e-3).unwrap_err();
        assert!(matches!(err, Error::StepTooLarge { .. }));
        let cfg = IntegratorConfig::new(Closure::FullOde).with_dt(1e-3);
        assert!(cfg.validate(&p).is_err());
        // the approximate closures have no such bound
        assert!(IntegratorConfig::new(Closure::Adiabatic).with_dt(1e-2).validate(&p).is_ok());
    }

    #[test]
    fn free_cavity_decays_analytically() {
        // without the Stark shift the atoms stay put and the field is a damped rotation
        let p = ModelParams { nu0: 0.0, ..ModelParams::reference(-2150.0, 0.0) };
        let s = MomentumState::zero_momentum(p.n_max);
        let alpha0 = C64::new(0.3, -0.1);
        let dt = 1e-5;
        let cfg = IntegratorConfig::new(Closure::FullOde)
            .with_dt(dt)
            .with_t_final(10.0 / p.kappa)
            .with_record_stride(1);
        let traj = propagate(&p, &cfg, s, alpha0, 0.0).unwrap();
        let rate = C64::new(-p.kappa, effective_detuning(&p, 0.5));
        for (t, f) in traj.times.iter().zip(&traj.fields) {
            let exact = alpha0 * (rate * t).exp();
            assert!((f.alpha - exact).norm() < 1e-8, "t={t}");
        }
    }

    #[test]
    fn norm_drift_per_step_is_tiny() {
        let p = ModelParams::reference(-2150.0, 27.0);
        let mut stepper = Stepper::new(p, Closure::FullOde);
        let mut c = MomentumState::seeded(p.n_max, 0.1).into_amplitudes();
        let mut a = C64::new(0.01, 0.002);
        for _ in 0..1000 {
            let drift = stepper.step(&mut c, &mut a, 1e-4);
            assert!(drift < 1e-12, "{drift}");
        }
    }

    #[test]
    fn sample_count_and_times() {
        let p = ModelParams::reference(-3000.0, 5.0);
        let cfg = IntegratorConfig::new(Closure::Adiabatic)
            .with_t_final(1.0)
            .with_record_stride(7);
        let traj = run_quench(&p, &cfg).unwrap();
        assert_eq!(traj.len(), 1000 / 7 + 1);
        assert!(traj.times.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn mismatched_cutoff_is_rejected() {
        let p = ModelParams::reference(-2150.0, 27.0);
        let s = MomentumState::zero_momentum(5);
        assert!(step_adiabatic(&p, &s, 1e-3).is_err());
    }
}
