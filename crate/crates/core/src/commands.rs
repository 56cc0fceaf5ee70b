//! Workflows behind the command-line subcommands. Each writes its artifacts
//! into an output directory and returns a short summary.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::dynamics::{
    continue_with_closure, detect_limit_cycle, propagate, run_quench, IntegratorConfig,
    LimitCycleReport, Trajectory,
};
use crate::error::{Error, Result};
use crate::ground::{ground_state, itpm_run, GroundStateResult};
use crate::io::{ensure_dir, write_ground_state, write_json, write_stability, write_trajectory, CODE_VERSION};
use crate::physics::{Closure, MomentumState};
use crate::plot;
use crate::stability::{analyze, critical_pump, MatrixKind, StabilityReport};
use crate::sweep::{resume_grid, run_grid, write_grid_outputs, GridOptions, GridOutcome};

/// Writes `ground.json` and `ground_momentum.csv`. The files are written even
/// when the propagation did not converge; the error is returned afterwards.
pub fn cmd_ground(cfg: &RunConfig, out: &Path) -> Result<GroundStateResult> {
    ensure_dir(out)?;
    let seed = MomentumState::itpm_seed(cfg.params.n_max, cfg.itpm.seed_epsilon);
    let ground = itpm_run(&cfg.params, &seed, &cfg.itpm)?;
    write_ground_state(out, "ground", &ground)?;
    if !ground.converged {
        return Err(Error::NotConverged {
            iterations: ground.iterations,
            residual: ground.residual,
        });
    }
    Ok(ground)
}

#[derive(Clone, Debug, Serialize)]
pub struct QuenchEntry {
    pub closure: Closure,
    pub csv: Option<PathBuf>,
    pub limit_cycle: Option<LimitCycleReport>,
    pub mean_intensity: Option<f64>,
    pub std_intensity: Option<f64>,
    pub warnings: Vec<String>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct QuenchSummary {
    pub code_version: &'static str,
    pub delta_c: f64,
    pub pump: f64,
    pub t_final: f64,
    pub window_fraction: f64,
    pub closures: Vec<QuenchEntry>,
}

/// Mean and standard deviation of `|alpha|^2` over the trailing `fraction` of the samples.
pub fn window_statistics(traj: &Trajectory, fraction: f64) -> (f64, f64) {
    let i = traj.intensities();
    let n = ((i.len() as f64) * fraction).floor().max(1.0) as usize;
    let w = &i[i.len() - n.min(i.len())..];
    let mean = w.iter().sum::<f64>() / w.len() as f64;
    let var = w.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / w.len() as f64;
    (mean, var.sqrt())
}

fn quench_entry(
    closure: Closure,
    result: &Result<Trajectory>,
    csv: Option<PathBuf>,
    fraction: f64,
) -> QuenchEntry {
    match result {
        Ok(traj) => {
            let (limit_cycle, lc_error) = match detect_limit_cycle(traj, fraction) {
                Ok(r) => (Some(r), None),
                Err(e) => (None, Some(e.to_string())),
            };
            let (mean, std) = window_statistics(traj, fraction);
            QuenchEntry {
                closure,
                csv,
                limit_cycle,
                mean_intensity: Some(mean),
                std_intensity: Some(std),
                warnings: traj.warnings.clone(),
                error: lc_error,
            }
        }
        Err(e) => QuenchEntry {
            closure,
            csv: None,
            limit_cycle: None,
            mean_intensity: None,
            std_intensity: None,
            warnings: Vec::new(),
            error: Some(e.to_string()),
        },
    }
}

/// One `quench_<closure>.csv/.json` pair per requested closure and a combined
/// `quench_summary.json`. A failed closure does not stop the others; the
/// first failure is returned after the summary is written.
pub fn cmd_quench(cfg: &RunConfig, out: &Path) -> Result<QuenchSummary> {
    ensure_dir(out)?;
    let q = &cfg.quench;
    let mut entries = Vec::new();
    let mut first_error = None;
    for &closure in &q.closures {
        let integ = q.integrator(closure, q.t_final);
        let result = run_quench(&cfg.params, &integ);
        let csv = match &result {
            Ok(traj) => {
                let lc = detect_limit_cycle(traj, q.window_fraction).ok();
                Some(write_trajectory(out, &format!("quench_{closure}"), traj, lc)?)
            }
            Err(_) => None,
        };
        entries.push(quench_entry(closure, &result, csv, q.window_fraction));
        if let Err(e) = result {
            first_error.get_or_insert(e);
        }
    }
    let summary = QuenchSummary {
        code_version: CODE_VERSION,
        delta_c: cfg.params.delta_c_bare,
        pump: cfg.params.pump,
        t_final: q.t_final,
        window_fraction: q.window_fraction,
        closures: entries,
    };
    write_json(&out.join("quench_summary.json"), &summary)?;
    match first_error {
        Some(e) => Err(e),
        None => Ok(summary),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilitySummary {
    pub code_version: &'static str,
    pub delta_c: f64,
    pub pump: f64,
    pub critical_pump: Option<f64>,
    pub abs_theta: f64,
    pub intensity: f64,
    pub reports: Vec<StabilityEntry>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilityEntry {
    pub matrix: MatrixKind,
    pub im_omega_crit: f64,
    pub unstable: bool,
    pub label: String,
    pub residual_max: f64,
}

impl From<&StabilityReport> for StabilityEntry {
    fn from(r: &StabilityReport) -> Self {
        Self {
            matrix: r.matrix_kind,
            im_omega_crit: r.im_omega_crit,
            unstable: r.unstable,
            label: r.phase_label.to_string(),
            residual_max: r.residual_max,
        }
    }
}

/// Ground state, then `stability_<m>_spectrum.csv` and `stability_<m>_report.json`
/// per matrix, and `stability_summary.json`.
pub fn cmd_stability(cfg: &RunConfig, out: &Path) -> Result<(StabilitySummary, Vec<StabilityReport>)> {
    ensure_dir(out)?;
    let ground = ground_state(&cfg.params, &cfg.itpm)?;
    write_ground_state(out, "ground", &ground)?;
    let mut reports = Vec::new();
    for &kind in &cfg.stability.matrices {
        let r = analyze(kind, &cfg.params, &ground)?;
        write_stability(out, &format!("stability_{}", kind.as_str().to_lowercase()), &r)?;
        reports.push(r);
    }
    let summary = StabilitySummary {
        code_version: CODE_VERSION,
        delta_c: cfg.params.delta_c_bare,
        pump: cfg.params.pump,
        critical_pump: critical_pump(&cfg.params).ok(),
        abs_theta: ground.abs_theta(),
        intensity: ground.intensity(),
        reports: reports.iter().map(StabilityEntry::from).collect(),
    };
    write_json(&out.join("stability_summary.json"), &summary)?;
    Ok((summary, reports))
}

pub const CHECKPOINT_FILE: &str = "grid_checkpoint.json";

/// Grid sweep with a checkpoint in `out`. With `resume`, an existing
/// checkpoint is continued (and must match the configured grid).
pub fn cmd_sweep(cfg: &RunConfig, out: &Path, parallelism: usize, resume: bool) -> Result<GridOutcome> {
    ensure_dir(out)?;
    let checkpoint = out.join(CHECKPOINT_FILE);
    let options = GridOptions {
        parallelism,
        checkpoint: Some(checkpoint.clone()),
        stop_after_rows: None,
    };
    let outcome = if resume && checkpoint.exists() {
        resume_grid(&checkpoint, Some(&cfg.grid), &options)?
    } else {
        run_grid(&cfg.grid, &options)?
    };
    write_grid_outputs(out, &outcome, parallelism)?;
    Ok(outcome)
}

#[derive(Clone, Debug, Serialize)]
pub struct MetastableSummary {
    pub code_version: &'static str,
    pub delta_c: f64,
    pub pump: f64,
    /// Stage (a): full model from the seeded homogeneous state.
    pub quench: LimitCycleReport,
    /// Stage (b): adiabatic continuation of the final state of (a).
    pub continuation: LimitCycleReport,
    pub period_rel_change: f64,
    pub amplitude_rel_change: f64,
    /// Stage (c): stationary state.
    pub ground_intensity: f64,
    pub ground_converged: bool,
    /// Stage (d): largest `| |alpha|^2 / |alpha0|^2 - 1 |` under adiabatic evolution of (c).
    pub stationary_max_rel_deviation: f64,
}

fn rel_change(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        if b == 0.0 { 0.0 } else { f64::INFINITY }
    } else {
        (b - a).abs() / a.abs()
    }
}

/// Four-stage switching protocol, written as `metastable_a` to `metastable_d`
/// plus `metastable_summary.json`.
pub fn cmd_metastable(cfg: &RunConfig, out: &Path) -> Result<MetastableSummary> {
    ensure_dir(out)?;
    let m = &cfg.metastable;
    let q = &cfg.quench;

    let cfg_a = q.integrator(Closure::FullOde, m.quench_t_final);
    let a = run_quench(&cfg.params, &cfg_a)?;
    let lc_a = detect_limit_cycle(&a, q.window_fraction)?;
    write_trajectory(out, "metastable_a", &a, Some(lc_a))?;

    let cfg_b = q.integrator(Closure::Adiabatic, m.continuation_t_final);
    let b = continue_with_closure(&a, Closure::Adiabatic, &cfg_b)?;
    let lc_b = detect_limit_cycle(&b, m.window_fraction)?;
    write_trajectory(out, "metastable_b", &b, Some(lc_b))?;

    let ground = ground_state(&cfg.params, &cfg.itpm)?;
    write_ground_state(out, "metastable_c", &ground)?;

    let cfg_d: IntegratorConfig = q.integrator(Closure::Adiabatic, m.continuation_t_final);
    let d = propagate(&cfg.params, &cfg_d, ground.state.clone(), ground.alpha0.alpha, 0.0)?;
    let lc_d = detect_limit_cycle(&d, m.window_fraction).ok();
    write_trajectory(out, "metastable_d", &d, lc_d)?;
    let i0 = ground.intensity();
    let dev = d
        .intensities()
        .iter()
        .map(|&i| rel_change(i0, i))
        .fold(0.0, f64::max);

    let summary = MetastableSummary {
        code_version: CODE_VERSION,
        delta_c: cfg.params.delta_c_bare,
        pump: cfg.params.pump,
        quench: lc_a,
        continuation: lc_b,
        period_rel_change: rel_change(lc_a.period, lc_b.period),
        amplitude_rel_change: rel_change(lc_a.amplitude, lc_b.amplitude),
        ground_intensity: i0,
        ground_converged: ground.converged,
        stationary_max_rel_deviation: dev,
    };
    write_json(&out.join("metastable_summary.json"), &summary)?;
    Ok(summary)
}

/// Renders `cfg.render`; without an explicit output the SVG goes into `out`
/// named after the input file.
pub fn cmd_render(cfg: &RunConfig, out: &Path) -> Result<PathBuf> {
    let mut spec = cfg.render.clone();
    if spec.output.is_none() {
        let input = spec
            .input
            .as_ref()
            .ok_or_else(|| Error::invalid("render.input", "an input CSV is required"))?;
        let stem = input
            .file_stem()
            .ok_or_else(|| Error::invalid("render.input", "path has no file name"))?;
        let mut name = stem.to_os_string();
        name.push(".svg");
        spec.output = Some(out.join(name));
    }
    plot::render(&spec)
}

/// Runs `itpm_run` for a sequence of pump values at fixed detuning. Used by
/// the threshold scan example and acceptance checks.
pub fn pump_scan(cfg: &RunConfig, pumps: &[f64]) -> Result<Vec<GroundStateResult>> {
    pumps
        .iter()
        .map(|&p| {
            let params = cfg.params.with_pump(p);
            let seed = MomentumState::itpm_seed(params.n_max, cfg.itpm.seed_epsilon);
            itpm_run(&params, &seed, &cfg.itpm)
        })
        .collect()
}
