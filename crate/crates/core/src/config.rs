//! Run configuration: one JSON document plus `--set path=value` overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dynamics::{IntegratorConfig, DEFAULT_SEED_EPSILON, DEFAULT_WINDOW_FRACTION};
use crate::error::{Error, Result};
use crate::ground::ItpmConfig;
use crate::params::ModelParams;
use crate::physics::Closure;
use crate::plot::PlotSpec;
use crate::stability::MatrixKind;
use crate::sweep::GridSpec;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuenchConfig {
    pub closures: Vec<Closure>,
    pub t_final: f64,
    /// Step size for every closure; `None` keeps each closure's default.
    pub dt: Option<f64>,
    /// Time between recorded samples (rounded to a whole number of steps).
    pub sample_interval: f64,
    pub seed_epsilon: f64,
    pub window_fraction: f64,
}

impl Default for QuenchConfig {
    fn default() -> Self {
        Self {
            closures: Closure::ALL.to_vec(),
            t_final: 200.0,
            dt: None,
            sample_interval: 0.01,
            seed_epsilon: DEFAULT_SEED_EPSILON,
            window_fraction: DEFAULT_WINDOW_FRACTION,
        }
    }
}

impl QuenchConfig {
    pub fn integrator(&self, closure: Closure, t_final: f64) -> IntegratorConfig {
        let base = IntegratorConfig::new(closure);
        let dt = self.dt.unwrap_or(base.dt);
        let stride = ((self.sample_interval / dt).round() as usize).max(1);
        base.with_dt(dt)
            .with_t_final(t_final)
            .with_record_stride(stride)
            .with_seed_epsilon(self.seed_epsilon)
    }

    fn validate(&self, params: &ModelParams) -> Result<()> {
        if self.closures.is_empty() {
            return Err(Error::invalid("quench.closures", "at least one closure is required"));
        }
        if !(self.sample_interval > 0.0 && self.sample_interval.is_finite()) {
            return Err(Error::invalid("quench.sample_interval", "must be positive"));
        }
        if !(self.window_fraction > 0.0 && self.window_fraction <= 0.5) {
            return Err(Error::invalid("quench.window_fraction", "must lie in (0, 0.5]"));
        }
        for &c in &self.closures {
            self.integrator(c, self.t_final)
                .validate(params)
                .map_err(|e| rename_field(e, "integrator", "quench"))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StabilityConfig {
    pub matrices: Vec<MatrixKind>,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        Self {
            matrices: MatrixKind::ALL.to_vec(),
        }
    }
}

/// Settings of the switching protocol: a full-model quench onto the limit
/// cycle, then adiabatic continuations of its final state and of the
/// stationary state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MetastableConfig {
    pub quench_t_final: f64,
    pub continuation_t_final: f64,
    pub window_fraction: f64,
}

impl Default for MetastableConfig {
    fn default() -> Self {
        Self {
            quench_t_final: 1000.0,
            continuation_t_final: 100.0,
            window_fraction: 0.5,
        }
    }
}

impl MetastableConfig {
    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("metastable.quench_t_final", self.quench_t_final),
            ("metastable.continuation_t_final", self.continuation_t_final),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, "must be positive"));
            }
        }
        if !(self.window_fraction > 0.0 && self.window_fraction <= 0.5) {
            return Err(Error::invalid("metastable.window_fraction", "must lie in (0, 0.5]"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub params: ModelParams,
    pub itpm: ItpmConfig,
    pub quench: QuenchConfig,
    pub stability: StabilityConfig,
    pub grid: GridSpec,
    pub metastable: MetastableConfig,
    pub render: PlotSpec,
    pub out_dir: Option<PathBuf>,
}

impl RunConfig {
    /// Reads `path` (if any), applies `KEY=VALUE` overrides and validates.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut doc = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?;
                serde_json::from_str::<Value>(&text)
                    .map_err(|e| Error::Config(format!("{}: {e}", p.display())))?
            }
            None => Value::Object(Default::default()),
        };
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        let mut merged = serde_json::to_value(RunConfig::default())?;
        merge(&mut merged, doc);
        let cfg: RunConfig =
            serde_json::from_value(merged).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.itpm.validate()?;
        self.quench.validate(&self.params)?;
        if self.stability.matrices.is_empty() {
            return Err(Error::invalid("stability.matrices", "at least one matrix is required"));
        }
        self.grid.validate()?;
        self.metastable.validate()?;
        Ok(())
    }
}

fn rename_field(e: Error, from: &str, to: &str) -> Error {
    match e {
        Error::InvalidParameter { field, message } => Error::InvalidParameter {
            field: field.replacen(from, to, 1),
            message,
        },
        other => other,
    }
}

/// Overlays `patch` onto `base`, descending into objects present in both.
fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

/// Sets `doc[a][b]...` from `a.b...=value`. The value is parsed as JSON when
/// possible and kept as a string otherwise.
pub fn apply_override(doc: &mut Value, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got {assignment:?}")))?;
    let key = key.trim();
    if key.is_empty() || key.split('.').any(str::is_empty) {
        return Err(Error::Config(format!("malformed key in --set {assignment:?}")));
    }
    let value = serde_json::from_str::<Value>(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = doc;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        if !node.is_object() {
            *node = Value::Object(Default::default());
        }
        let map = node.as_object_mut().expect("object");
        if i + 1 == parts.len() {
            map.insert(part.to_string(), value);
            return Ok(());
        }
        node = map
            .entry(part.to_string())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    Ok(())
}
