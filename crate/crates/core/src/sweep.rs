//! Parameter grids over `(Delta_c, pump)` with checkpointing.
//!
//! Rows run over `Delta_c`, columns over the pump. Points inside a row are
//! evaluated concurrently; the checkpoint is rewritten atomically after every
//! completed row. Each point starts from the same fixed imaginary-time seed, so
//! the output does not depend on scheduling or on the number of workers.

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::ground::{itpm_run, ItpmConfig};
use crate::io::{fmt_f64, write_csv, write_json, CODE_VERSION};
use crate::params::ModelParams;
use crate::physics::MomentumState;
use crate::stability::{analyze, MatrixKind, PhaseLabel};

pub const CHECKPOINT_FORMAT: &str = "cavity-bec-grid-checkpoint/1";

pub const GRID_HEADER: [&str; 14] = [
    "delta_c",
    "pump",
    "intensity",
    "abs_theta",
    "bunching",
    "delta_c_over_kappa",
    "mu",
    "iterations",
    "im_omega_crit_m1",
    "im_omega_crit_m2",
    "label_m1",
    "label_m2",
    "status",
    "message",
];

/// Inclusive, evenly spaced axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisRange {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl AxisRange {
    pub fn new(min: f64, max: f64, count: usize) -> Self {
        Self { min, max, count }
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            return self.max;
        }
        self.min + (self.max - self.min) * i as f64 / (self.count - 1) as f64
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.value(i)).collect()
    }

    fn validate(&self, field: &str) -> Result<()> {
        if self.count < 2 {
            return Err(Error::invalid(format!("{field}.count"), "must be >= 2"));
        }
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(Error::invalid(field, "bounds must be finite"));
        }
        if !(self.min < self.max) {
            return Err(Error::invalid(field, "min must be < max"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridTask {
    Ground,
    StabilityM1,
    StabilityM2,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Rows.
    pub delta_c_range: AxisRange,
    /// Columns.
    pub pump_range: AxisRange,
    /// Template for everything except `delta_c_bare` and `pump`.
    pub fixed: ModelParams,
    #[serde(default = "default_tasks")]
    pub tasks: Vec<GridTask>,
    #[serde(default)]
    pub itpm: ItpmConfig,
}

fn default_tasks() -> Vec<GridTask> {
    vec![GridTask::Ground, GridTask::StabilityM1, GridTask::StabilityM2]
}

impl Default for GridSpec {
    /// 40 x 40 over `Delta_c in [-3200, -300]`, pump in `[0, 90]`.
    fn default() -> Self {
        Self {
            delta_c_range: AxisRange::new(-3200.0, -300.0, 40),
            pump_range: AxisRange::new(0.0, 90.0, 40),
            fixed: ModelParams::default(),
            tasks: default_tasks(),
            itpm: ItpmConfig::default(),
        }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        self.delta_c_range.validate("grid.delta_c_range")?;
        self.pump_range.validate("grid.pump_range")?;
        if self.pump_range.min < 0.0 {
            return Err(Error::invalid("grid.pump_range.min", "pump must be >= 0"));
        }
        self.fixed.validate_at("grid.fixed")?;
        self.itpm.validate()?;
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.delta_c_range.count
    }

    pub fn cols(&self) -> usize {
        self.pump_range.count
    }

    pub fn len(&self) -> usize {
        self.rows() * self.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn has(&self, task: GridTask) -> bool {
        self.tasks.contains(&task)
    }

    pub fn point(&self, index: usize) -> ModelParams {
        let (row, col) = (index / self.cols(), index % self.cols());
        ModelParams {
            delta_c_bare: self.delta_c_range.value(row),
            pump: self.pump_range.value(col),
            ..self.fixed
        }
    }

    /// SHA-256 of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("grid spec serializes");
        let digest = Sha256::digest(&bytes);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointStatus {
    Ok,
    NotConverged,
    Error,
}

impl fmt::Display for PointStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PointStatus::Ok => "ok",
            PointStatus::NotConverged => "not-converged",
            PointStatus::Error => "error",
        })
    }
}

/// Result at one grid point. Quantities that were not computed are `None`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridRecord {
    pub delta_c: f64,
    pub pump: f64,
    pub intensity: Option<f64>,
    pub abs_theta: Option<f64>,
    pub bunching: Option<f64>,
    pub delta_c_over_kappa: Option<f64>,
    pub mu: Option<f64>,
    pub iterations: Option<usize>,
    pub im_omega_crit_m1: Option<f64>,
    pub im_omega_crit_m2: Option<f64>,
    pub label_m1: Option<PhaseLabel>,
    pub label_m2: Option<PhaseLabel>,
    pub status: PointStatus,
    pub message: String,
}

impl GridRecord {
    fn empty(params: &ModelParams) -> Self {
        Self {
            delta_c: params.delta_c_bare,
            pump: params.pump,
            intensity: None,
            abs_theta: None,
            bunching: None,
            delta_c_over_kappa: None,
            mu: None,
            iterations: None,
            im_omega_crit_m1: None,
            im_omega_crit_m2: None,
            label_m1: None,
            label_m2: None,
            status: PointStatus::Ok,
            message: String::new(),
        }
    }

    fn csv_row(&self) -> Vec<String> {
        let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
        vec![
            fmt_f64(self.delta_c),
            fmt_f64(self.pump),
            opt(self.intensity),
            opt(self.abs_theta),
            opt(self.bunching),
            opt(self.delta_c_over_kappa),
            opt(self.mu),
            self.iterations.map(|i| i.to_string()).unwrap_or_default(),
            opt(self.im_omega_crit_m1),
            opt(self.im_omega_crit_m2),
            self.label_m1.map(|l| l.to_string()).unwrap_or_default(),
            self.label_m2.map(|l| l.to_string()).unwrap_or_default(),
            self.status.to_string(),
            self.message.clone(),
        ]
    }
}

/// Ground state and the requested stability analyses at one point.
pub fn evaluate_point(spec: &GridSpec, params: &ModelParams) -> GridRecord {
    let mut rec = GridRecord::empty(params);
    let seed = MomentumState::itpm_seed(params.n_max, spec.itpm.seed_epsilon);
    let ground = match itpm_run(params, &seed, &spec.itpm) {
        Ok(g) => g,
        Err(e) => {
            rec.status = PointStatus::Error;
            rec.message = e.to_string();
            return rec;
        }
    };
    rec.intensity = Some(ground.intensity());
    rec.abs_theta = Some(ground.abs_theta());
    rec.bunching = Some(ground.observables.bunching);
    rec.delta_c_over_kappa = Some(ground.observables.delta_c_eff / params.kappa);
    rec.mu = Some(ground.chemical_potential);
    rec.iterations = Some(ground.iterations);
    if !ground.converged {
        rec.status = PointStatus::NotConverged;
        rec.message = format!("residual {:e} after {} iterations", ground.residual, ground.iterations);
        return rec;
    }
    for (task, kind) in [
        (GridTask::StabilityM1, MatrixKind::M1),
        (GridTask::StabilityM2, MatrixKind::M2),
    ] {
        if !spec.has(task) {
            continue;
        }
        match analyze(kind, params, &ground) {
            Ok(r) => match kind {
                MatrixKind::M1 => {
                    rec.im_omega_crit_m1 = Some(r.im_omega_crit);
                    rec.label_m1 = Some(r.phase_label);
                }
                MatrixKind::M2 => {
                    rec.im_omega_crit_m2 = Some(r.im_omega_crit);
                    rec.label_m2 = Some(r.phase_label);
                }
            },
            Err(e) => {
                rec.status = PointStatus::Error;
                rec.message = format!("{kind}: {e}");
            }
        }
    }
    rec
}

/// On-disk checkpoint: manifest, completed-point bitmap and records.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub code_version: String,
    pub spec_hash: String,
    pub spec: GridSpec,
    /// One character per point in row-major order, `1` when complete.
    pub completed: String,
    pub records: Vec<Option<GridRecord>>,
}

impl Checkpoint {
    fn new(spec: &GridSpec) -> Self {
        Self {
            format: CHECKPOINT_FORMAT.to_string(),
            code_version: CODE_VERSION.to_string(),
            spec_hash: spec.hash(),
            spec: spec.clone(),
            completed: "0".repeat(spec.len()),
            records: vec![None; spec.len()],
        }
    }

    pub fn completed_points(&self) -> usize {
        self.records.iter().filter(|r| r.is_some()).count()
    }

    pub fn is_complete(&self) -> bool {
        self.records.iter().all(|r| r.is_some())
    }

    fn sync_bitmap(&mut self) {
        self.completed = self
            .records
            .iter()
            .map(|r| if r.is_some() { '1' } else { '0' })
            .collect();
    }

    /// Loads and checks internal consistency.
    pub fn load(path: &Path) -> Result<Self> {
        let mismatch = |reason: String| Error::SpecMismatch {
            path: path.to_path_buf(),
            reason,
        };
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let ck: Checkpoint =
            serde_json::from_str(&text).map_err(|e| mismatch(format!("unreadable checkpoint: {e}")))?;
        if ck.format != CHECKPOINT_FORMAT {
            return Err(mismatch(format!("unknown format {:?}", ck.format)));
        }
        if ck.spec.hash() != ck.spec_hash {
            return Err(mismatch("stored hash does not match the stored spec".into()));
        }
        let n = ck.spec.len();
        if ck.records.len() != n || ck.completed.chars().count() != n {
            return Err(mismatch(format!("expected {n} points")));
        }
        for (i, (bit, rec)) in ck.completed.chars().zip(&ck.records).enumerate() {
            let ok = match (bit, rec) {
                ('1', Some(r)) => {
                    let p = ck.spec.point(i);
                    r.delta_c == p.delta_c_bare && r.pump == p.pump
                }
                ('0', None) => true,
                _ => false,
            };
            if !ok {
                return Err(mismatch(format!("bitmap and records disagree at point {i}")));
            }
        }
        Ok(ck)
    }

    fn save(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }
}

#[derive(Clone, Debug, Default)]
pub struct GridOptions {
    /// Worker threads; 0 means one.
    pub parallelism: usize,
    pub checkpoint: Option<PathBuf>,
    /// Stop after this many newly completed rows (used to exercise resume).
    pub stop_after_rows: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct GridOutcome {
    pub spec: GridSpec,
    /// Row-major; `None` for points not reached before a stop.
    pub records: Vec<Option<GridRecord>>,
    pub evaluated_points: usize,
    pub elapsed_seconds: f64,
}

impl GridOutcome {
    pub fn is_complete(&self) -> bool {
        self.records.iter().all(|r| r.is_some())
    }

    pub fn complete_records(&self) -> Option<Vec<GridRecord>> {
        self.records.iter().cloned().collect()
    }
}

/// Evaluates the grid from scratch (overwriting any checkpoint at the given path).
pub fn run_grid(spec: &GridSpec, options: &GridOptions) -> Result<GridOutcome> {
    spec.validate()?;
    run_from(Checkpoint::new(spec), options)
}

/// Continues from a checkpoint, recomputing missing points and points whose
/// status is `error`. When `expected` is given its hash must match.
pub fn resume_grid(
    checkpoint: &Path,
    expected: Option<&GridSpec>,
    options: &GridOptions,
) -> Result<GridOutcome> {
    let mut ck = Checkpoint::load(checkpoint)?;
    if let Some(spec) = expected {
        if spec.hash() != ck.spec_hash {
            return Err(Error::SpecMismatch {
                path: checkpoint.to_path_buf(),
                reason: "checkpoint was written for a different grid specification".into(),
            });
        }
    }
    for r in ck.records.iter_mut() {
        if matches!(r, Some(rec) if rec.status == PointStatus::Error) {
            *r = None;
        }
    }
    ck.sync_bitmap();
    let options = GridOptions {
        checkpoint: Some(checkpoint.to_path_buf()),
        ..options.clone()
    };
    run_from(ck, &options)
}

fn run_from(mut ck: Checkpoint, options: &GridOptions) -> Result<GridOutcome> {
    let start = Instant::now();
    let spec = ck.spec.clone();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.parallelism.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let cols = spec.cols();
    let mut rows_done = 0;
    let mut evaluated = 0;
    if let Some(path) = &options.checkpoint {
        ck.save(path)?;
    }
    for row in 0..spec.rows() {
        let missing: Vec<usize> = (row * cols..(row + 1) * cols)
            .filter(|&i| ck.records[i].is_none())
            .collect();
        if missing.is_empty() {
            continue;
        }
        if options.stop_after_rows.is_some_and(|n| rows_done >= n) {
            break;
        }
        let results: Vec<(usize, GridRecord)> = pool.install(|| {
            missing
                .par_iter()
                .map(|&i| (i, evaluate_point(&spec, &spec.point(i))))
                .collect()
        });
        evaluated += results.len();
        for (i, rec) in results {
            ck.records[i] = Some(rec);
        }
        ck.sync_bitmap();
        if let Some(path) = &options.checkpoint {
            ck.save(path)?;
        }
        rows_done += 1;
    }
    Ok(GridOutcome {
        spec,
        records: ck.records,
        evaluated_points: evaluated,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    })
}

pub fn write_grid_csv(path: &Path, records: &[GridRecord]) -> Result<()> {
    write_csv(path, &GRID_HEADER, records.iter().map(GridRecord::csv_row))
}

#[derive(Serialize, Deserialize)]
pub struct GridManifest {
    pub code_version: String,
    pub spec_hash: String,
    pub spec: GridSpec,
    pub points: usize,
    pub evaluated_points: usize,
    pub not_converged: usize,
    pub errors: usize,
    pub parallelism: usize,
    pub elapsed_seconds: f64,
}

/// `grid.csv` and `grid_manifest.json` for a complete outcome.
pub fn write_grid_outputs(dir: &Path, outcome: &GridOutcome, parallelism: usize) -> Result<PathBuf> {
    let records = outcome
        .complete_records()
        .ok_or_else(|| Error::Config("grid is incomplete; resume it before writing outputs".into()))?;
    let csv_path = dir.join("grid.csv");
    write_grid_csv(&csv_path, &records)?;
    let count = |s: PointStatus| records.iter().filter(|r| r.status == s).count();
    write_json(
        &dir.join("grid_manifest.json"),
        &GridManifest {
            code_version: CODE_VERSION.to_string(),
            spec_hash: outcome.spec.hash(),
            spec: outcome.spec.clone(),
            points: records.len(),
            evaluated_points: outcome.evaluated_points,
            not_converged: count(PointStatus::NotConverged),
            errors: count(PointStatus::Error),
            parallelism,
            elapsed_seconds: outcome.elapsed_seconds,
        },
    )?;
    Ok(csv_path)
}

pub fn read_checkpoint(path: &Path) -> Result<Checkpoint> {
    Checkpoint::load(path)
}
