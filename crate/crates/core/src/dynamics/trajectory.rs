use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::IntegratorConfig;
use crate::params::ModelParams;
use crate::physics::{CavityAmplitude, MomentumState, Observables};

/// Recorded real-time evolution.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Trajectory {
    pub params: ModelParams,
    pub config: IntegratorConfig,
    pub times: Vec<f64>,
    pub observables: Vec<Observables>,
    pub fields: Vec<CavityAmplitude>,
    /// Largest per-step `|norm - 1|` (before renormalization) since the previous sample.
    pub norm_errors: Vec<f64>,
    pub final_state: MomentumState,
    pub final_field: CavityAmplitude,
    pub max_edge_population: f64,
    pub warnings: Vec<String>,
}

impl Trajectory {
    pub(crate) fn with_capacity(params: ModelParams, config: IntegratorConfig, n: usize) -> Self {
        Self {
            params,
            config,
            times: Vec::with_capacity(n),
            observables: Vec::with_capacity(n),
            fields: Vec::with_capacity(n),
            norm_errors: Vec::with_capacity(n),
            final_state: MomentumState::zero_momentum(params.n_max),
            final_field: CavityAmplitude::new(C64::new(0.0, 0.0), config.closure),
            max_edge_population: 0.0,
            warnings: Vec::new(),
        }
    }

    pub(crate) fn push_sample(
        &mut self,
        t: f64,
        obs: Observables,
        field: CavityAmplitude,
        norm_error: f64,
        edge: f64,
    ) {
        self.times.push(t);
        self.observables.push(obs);
        self.fields.push(field);
        self.norm_errors.push(norm_error);
        self.max_edge_population = self.max_edge_population.max(edge);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `|alpha|^2` per sample.
    pub fn intensities(&self) -> Vec<f64> {
        self.fields.iter().map(|f| f.intensity()).collect()
    }

    pub fn max_norm_error(&self) -> f64 {
        self.norm_errors.iter().copied().fold(0.0, f64::max)
    }

    pub fn t_end(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    /// Samples with `t >= t_start`.
    pub fn tail_intensities(&self, t_start: f64) -> Vec<f64> {
        self.times
            .iter()
            .zip(&self.fields)
            .filter(|(t, _)| **t >= t_start)
            .map(|(_, f)| f.intensity())
            .collect()
    }
}
