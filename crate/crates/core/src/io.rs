//! CSV and JSON artifacts.
//!
//! Floats are written with Rust's shortest round-trip formatting so that
//! identical results give byte-identical files.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{IntegratorConfig, LimitCycleReport, Trajectory};
use crate::error::{Error, Result};
use crate::ground::GroundStateResult;
use crate::params::ModelParams;
use crate::stability::StabilityReport;

pub const CODE_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

pub const TRAJECTORY_HEADER: [&str; 9] = [
    "t",
    "theta",
    "bunching",
    "delta_c_eff",
    "re_alpha",
    "im_alpha",
    "intensity",
    "energy",
    "norm_error",
];

pub const SPECTRUM_HEADER: [&str; 2] = ["re_omega", "im_omega"];

pub const MOMENTUM_HEADER: [&str; 4] = ["n", "re_c", "im_c", "population"];

pub(crate) fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    ensure_dir(&dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| Error::io(&dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.into_inner()
        .map_err(|e| Error::Config(format!("csv buffer: {e}")))
}

pub(crate) fn write_csv(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<()> {
    write_atomic(path, &csv_bytes(header, rows)?)
}

pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

pub fn trajectory_rows(traj: &Trajectory) -> Vec<Vec<String>> {
    (0..traj.len())
        .map(|k| {
            let o = &traj.observables[k];
            let a = traj.fields[k].alpha;
            vec![
                fmt_f64(traj.times[k]),
                fmt_f64(o.theta),
                fmt_f64(o.bunching),
                fmt_f64(o.delta_c_eff),
                fmt_f64(a.re),
                fmt_f64(a.im),
                fmt_f64(o.intensity),
                fmt_f64(o.energy),
                fmt_f64(traj.norm_errors[k]),
            ]
        })
        .collect()
}

pub fn write_trajectory_csv(path: &Path, traj: &Trajectory) -> Result<()> {
    write_csv(path, &TRAJECTORY_HEADER, trajectory_rows(traj))
}

/// JSON sidecar next to a trajectory CSV.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrajectoryMetadata {
    pub code_version: String,
    pub params: ModelParams,
    pub config: IntegratorConfig,
    pub samples: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub max_norm_error: f64,
    pub max_edge_population: f64,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub limit_cycle: Option<LimitCycleReport>,
}

impl TrajectoryMetadata {
    pub fn new(traj: &Trajectory, limit_cycle: Option<LimitCycleReport>) -> Self {
        Self {
            code_version: CODE_VERSION.to_string(),
            params: traj.params,
            config: traj.config,
            samples: traj.len(),
            t_start: traj.times.first().copied().unwrap_or(0.0),
            t_end: traj.t_end(),
            max_norm_error: traj.max_norm_error(),
            max_edge_population: traj.max_edge_population,
            warnings: traj.warnings.clone(),
            limit_cycle,
        }
    }
}

/// Writes `<stem>.csv` and `<stem>.json` into `dir`; returns the CSV path.
pub fn write_trajectory(
    dir: &Path,
    stem: &str,
    traj: &Trajectory,
    limit_cycle: Option<LimitCycleReport>,
) -> Result<PathBuf> {
    let csv_path = dir.join(format!("{stem}.csv"));
    write_trajectory_csv(&csv_path, traj)?;
    write_json(
        &dir.join(format!("{stem}.json")),
        &TrajectoryMetadata::new(traj, limit_cycle),
    )?;
    Ok(csv_path)
}

#[derive(Serialize)]
struct GroundSummary<'a> {
    code_version: &'a str,
    #[serde(flatten)]
    result: &'a GroundStateResult,
    abs_theta: f64,
    delta_c_over_kappa: f64,
}

/// `<stem>.json` with the full result and `<stem>_momentum.csv` with the
/// amplitudes on the ladder.
pub fn write_ground_state(dir: &Path, stem: &str, ground: &GroundStateResult) -> Result<()> {
    write_json(
        &dir.join(format!("{stem}.json")),
        &GroundSummary {
            code_version: CODE_VERSION,
            result: ground,
            abs_theta: ground.abs_theta(),
            delta_c_over_kappa: ground.observables.delta_c_eff / ground.params.kappa,
        },
    )?;
    let rows = ground.state.momenta().map(|n| {
        let c = ground.state.amplitude(n);
        vec![n.to_string(), fmt_f64(c.re), fmt_f64(c.im), fmt_f64(c.norm_sqr())]
    });
    write_csv(&dir.join(format!("{stem}_momentum.csv")), &MOMENTUM_HEADER, rows)
}

pub fn spectrum_rows(eigenvalues: &[C64]) -> Vec<Vec<String>> {
    eigenvalues
        .iter()
        .map(|w| vec![fmt_f64(w.re), fmt_f64(w.im)])
        .collect()
}

#[derive(Serialize)]
struct StabilitySummary<'a> {
    code_version: &'a str,
    matrix_kind: String,
    omega_crit: C64,
    im_omega_crit: f64,
    unstable: bool,
    label: String,
    residual_max: f64,
    dimension: usize,
}

/// `<stem>_spectrum.csv` and `<stem>_report.json`.
pub fn write_stability(dir: &Path, stem: &str, report: &StabilityReport) -> Result<()> {
    write_csv(
        &dir.join(format!("{stem}_spectrum.csv")),
        &SPECTRUM_HEADER,
        spectrum_rows(&report.eigenvalues),
    )?;
    write_json(
        &dir.join(format!("{stem}_report.json")),
        &StabilitySummary {
            code_version: CODE_VERSION,
            matrix_kind: report.matrix_kind.to_string(),
            omega_crit: report.omega_crit,
            im_omega_crit: report.im_omega_crit,
            unstable: report.unstable,
            label: report.phase_label.to_string(),
            residual_max: report.residual_max,
            dimension: report.eigenvalues.len(),
        },
    )
}

/// Header and rows of a CSV file as strings.
pub fn read_csv_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut r = csv::Reader::from_path(path).map_err(|e| match e.kind() {
        csv::ErrorKind::Io(_) => Error::Config(format!("cannot read {}: {e}", path.display())),
        _ => Error::Csv(e),
    })?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(rec?.iter().map(str::to_string).collect());
    }
    Ok((header, rows))
}
