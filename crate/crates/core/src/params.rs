//! Model constants in recoil units (hbar = omega_r = k_c = 1).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Collective dynamical Stark shift used throughout the reference parameter set.
pub const REFERENCE_NU0: f64 = -2241.38;
/// Cavity linewidth of the reference parameter set.
pub const REFERENCE_KAPPA: f64 = 344.83;
/// Default momentum cutoff, in units of the cavity recoil momentum.
pub const DEFAULT_N_MAX: usize = 20;

/// Physical parameters of the driven atom-cavity system.
///
/// All frequencies are in units of the recoil frequency.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    /// Collective Stark shift `N U0` (negative for red atom-pump detuning).
    pub nu0: f64,
    /// Cavity field decay rate.
    pub kappa: f64,
    /// Bare pump-cavity detuning.
    pub delta_c_bare: f64,
    /// Effective pump strength `sqrt(N) eta`.
    pub pump: f64,
    /// Momentum ladder runs over `-n_max..=n_max`.
    pub n_max: usize,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self::reference(-2150.0, 27.0)
    }
}

impl ModelParams {
    pub fn new(nu0: f64, kappa: f64, delta_c_bare: f64, pump: f64, n_max: usize) -> Result<Self> {
        let params = Self {
            nu0,
            kappa,
            delta_c_bare,
            pump,
            n_max,
        };
        params.validate()?;
        Ok(params)
    }

    /// Reference Stark shift, linewidth and cutoff with the given detuning and pump.
    pub fn reference(delta_c_bare: f64, pump: f64) -> Self {
        Self {
            nu0: REFERENCE_NU0,
            kappa: REFERENCE_KAPPA,
            delta_c_bare,
            pump,
            n_max: DEFAULT_N_MAX,
        }
    }

    pub fn with_pump(self, pump: f64) -> Self {
        Self { pump, ..self }
    }

    pub fn with_delta_c(self, delta_c_bare: f64) -> Self {
        Self {
            delta_c_bare,
            ..self
        }
    }

    pub fn with_n_max(self, n_max: usize) -> Self {
        Self { n_max, ..self }
    }

    /// Dimension of the momentum ladder, `2 n_max + 1`.
    pub fn dim(&self) -> usize {
        2 * self.n_max + 1
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_at("params")
    }

    pub(crate) fn validate_at(&self, prefix: &str) -> Result<()> {
        let finite = [
            ("nu0", self.nu0),
            ("kappa", self.kappa),
            ("delta_c_bare", self.delta_c_bare),
            ("pump", self.pump),
        ];
        for (name, value) in finite {
            if !value.is_finite() {
                return Err(Error::invalid(format!("{prefix}.{name}"), "must be finite"));
            }
        }
        if self.kappa <= 0.0 {
            return Err(Error::invalid(
                format!("{prefix}.kappa"),
                format!("must be > 0 (got {})", self.kappa),
            ));
        }
        if self.pump < 0.0 {
            return Err(Error::invalid(
                format!("{prefix}.pump"),
                format!("must be >= 0 (got {})", self.pump),
            ));
        }
        if self.n_max < 2 {
            return Err(Error::invalid(
                format!("{prefix}.n_max"),
                format!("must be >= 2 (got {})", self.n_max),
            ));
        }
        Ok(())
    }
}
