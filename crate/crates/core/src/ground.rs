//! Self-consistent stationary states by imaginary-time propagation with the
//! adiabatically eliminated cavity.
//!
//! Each explicit Euler step applies `psi <- psi - dtau (H_mf(alpha0) - <H_mf(alpha0)>) psi`
//! with `alpha0` recomputed from the current state, then renormalizes. The
//! iteration stops once the update rate `||psi_{k+1} - psi_k|| / dtau` falls
//! below the tolerance.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::physics::{
    adiabatic_alpha, adiabatic_field, apply_hamiltonian, expect_bunching, expect_theta,
    field_couplings, mean_field_energy, normalize_slice, CavityAmplitude, MomentumState,
    Observables,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ItpmConfig {
    pub dtau: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// Seed amplitude on `n = +-1`.
    pub seed_epsilon: f64,
}

impl Default for ItpmConfig {
    fn default() -> Self {
        Self {
            dtau: 1e-3,
            tol: 1e-9,
            max_iter: 2_000_000,
            seed_epsilon: 0.1,
        }
    }
}

impl ItpmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dtau > 0.0 && self.dtau.is_finite()) {
            return Err(Error::invalid("itpm.dtau", "must be positive and finite"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::invalid("itpm.tol", "must be positive"));
        }
        if self.max_iter == 0 {
            return Err(Error::invalid("itpm.max_iter", "must be >= 1"));
        }
        if !(self.seed_epsilon > 0.0 && self.seed_epsilon < 0.5f64.sqrt()) {
            return Err(Error::invalid("itpm.seed_epsilon", "must be in (0, 1/sqrt(2))"));
        }
        Ok(())
    }
}

/// Stationary state of the eliminated-cavity mean-field equations.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroundStateResult {
    pub params: ModelParams,
    pub state: MomentumState,
    pub alpha0: CavityAmplitude,
    pub observables: Observables,
    /// `<H_mf(alpha0)>` in the final state.
    pub chemical_potential: f64,
    pub iterations: usize,
    /// Final update norm per unit imaginary time.
    pub residual: f64,
    pub converged: bool,
}

impl GroundStateResult {
    pub fn abs_theta(&self) -> f64 {
        self.observables.theta.abs()
    }

    pub fn intensity(&self) -> f64 {
        self.alpha0.intensity()
    }
}

struct ItpmWorkspace {
    h_psi: Vec<C64>,
    next: Vec<C64>,
}

/// One Euler step; returns the update norm per unit imaginary time.
fn euler_step(params: &ModelParams, c: &mut [C64], dtau: f64, ws: &mut ItpmWorkspace) -> f64 {
    let alpha0 = adiabatic_alpha(params, expect_theta(c), expect_bunching(c));
    let (stark, drive) = field_couplings(params, alpha0);
    apply_hamiltonian(c, stark, drive, params.n_max, &mut ws.h_psi);
    let norm_sqr: f64 = c.iter().map(|z| z.norm_sqr()).sum();
    let energy: f64 = c
        .iter()
        .zip(&ws.h_psi)
        .map(|(a, b)| (a.conj() * b).re)
        .sum::<f64>()
        / norm_sqr;
    for i in 0..c.len() {
        ws.next[i] = c[i] - (ws.h_psi[i] - c[i] * energy) * dtau;
    }
    normalize_slice(&mut ws.next);
    let mut diff = 0.0;
    for i in 0..c.len() {
        diff += (ws.next[i] - c[i]).norm_sqr();
        c[i] = ws.next[i];
    }
    diff.sqrt() / dtau
}

/// One imaginary-time Euler step.
pub fn itpm_step(params: &ModelParams, state: &MomentumState, dtau: f64) -> Result<MomentumState> {
    if !(dtau > 0.0) {
        return Err(Error::invalid("itpm.dtau", "must be positive"));
    }
    let mut c = state.amplitudes().to_vec();
    let mut ws = ItpmWorkspace {
        h_psi: vec![C64::new(0.0, 0.0); c.len()],
        next: vec![C64::new(0.0, 0.0); c.len()],
    };
    euler_step(params, &mut c, dtau, &mut ws);
    let next = MomentumState::from_amplitudes(c)?;
    if !next.is_finite() {
        return Err(Error::NonFinite { time: dtau });
    }
    Ok(next)
}

/// Runs imaginary-time propagation and reports the last iterate whether or not
/// it converged (see [`GroundStateResult::converged`]).
pub fn itpm_run(
    params: &ModelParams,
    seed: &MomentumState,
    config: &ItpmConfig,
) -> Result<GroundStateResult> {
    params.validate()?;
    config.validate()?;
    if seed.n_max() != params.n_max {
        return Err(Error::invalid("itpm.seed", "momentum cutoff differs from params.n_max"));
    }
    let mut c = seed.amplitudes().to_vec();
    normalize_slice(&mut c);
    let mut ws = ItpmWorkspace {
        h_psi: vec![C64::new(0.0, 0.0); c.len()],
        next: vec![C64::new(0.0, 0.0); c.len()],
    };
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < config.max_iter {
        residual = euler_step(params, &mut c, config.dtau, &mut ws);
        iterations += 1;
        if !residual.is_finite() {
            return Err(Error::NonFinite {
                time: iterations as f64 * config.dtau,
            });
        }
        if residual < config.tol {
            break;
        }
    }
    let converged = residual < config.tol;

    let mut state = MomentumState::from_amplitudes(c)?;
    if state.theta() > 0.0 {
        state = state.parity_flipped();
    }
    let alpha0 = adiabatic_field(params, state.theta(), state.bunching());
    let observables = Observables::measure(params, &state, alpha0.alpha);
    let chemical_potential = mean_field_energy(params, alpha0.alpha, &state);
    Ok(GroundStateResult {
        params: *params,
        state,
        alpha0,
        observables,
        chemical_potential,
        iterations,
        residual,
        converged,
    })
}

/// Imaginary-time propagation that fails with `NotConverged` when the
/// tolerance is not reached within `max_iter` steps.
pub fn itpm_solve(
    params: &ModelParams,
    seed: &MomentumState,
    config: &ItpmConfig,
) -> Result<GroundStateResult> {
    let result = itpm_run(params, seed, config)?;
    if result.converged {
        Ok(result)
    } else {
        Err(Error::NotConverged {
            iterations: result.iterations,
            residual: result.residual,
        })
    }
}

/// [`itpm_solve`] from the default seed.
pub fn ground_state(params: &ModelParams, config: &ItpmConfig) -> Result<GroundStateResult> {
    let seed = MomentumState::itpm_seed(params.n_max, config.seed_epsilon);
    itpm_solve(params, &seed, config)
}
