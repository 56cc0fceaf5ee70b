//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion with the
//! measured values. Exits non-zero on a failure only when
//! `CAVITY_BEC_ACCEPTANCE_STRICT=1`, so the remaining test targets still run.
//!
//! cargo test --release --test acceptance

mod common;

use std::time::Instant;

use cavity_bec::commands::{cmd_metastable, pump_scan, window_statistics};
use cavity_bec::dynamics::{detect_limit_cycle, run_quench, DEFAULT_WINDOW_FRACTION};
use cavity_bec::ground::ground_state;
use cavity_bec::physics::EDGE_POPULATION_WARNING;
use cavity_bec::stability::{analyze, critical_pump, MatrixKind, ORGANIZATION_THRESHOLD};
use cavity_bec::sweep::{run_grid, AxisRange, GridOptions, GridSpec, GridTask, PointStatus};
use cavity_bec::{Closure, ModelParams, RunConfig};
use common::*;

const QUENCH_T_FINAL: f64 = 1000.0;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn quench(delta_c: f64, pump: f64, closure: Closure) -> cavity_bec::dynamics::Trajectory {
    let p = ModelParams::reference(delta_c, pump);
    let cfg = RunConfig::default().quench.integrator(closure, QUENCH_T_FINAL);
    run_quench(&p, &cfg).expect("quench")
}

fn threshold() -> Outcome {
    let cfg = RunConfig::load(None, &["params.delta_c_bare=-2150".into()]).unwrap();
    let pc = critical_pump(&cfg.params).unwrap();
    let pumps: Vec<f64> = (0..41).map(|i| 15.0 + 0.5 * i as f64).collect();
    let scan = pump_scan(&cfg, &pumps).unwrap();
    let onset = pumps
        .iter()
        .zip(&scan)
        .find(|(_, g)| g.abs_theta() >= ORGANIZATION_THRESHOLD)
        .map(|(p, _)| *p);
    match onset {
        Some(p) => {
            let rel = (p - pc).abs() / pc;
            outcome(rel <= 0.05, format!("onset {p:.2} vs formula {pc:.3} (rel {rel:.4}, tol 0.05)"))
        }
        None => outcome(false, format!("no organized point (formula {pc:.3})")),
    }
}

fn phase_diagram() -> Outcome {
    let base = ModelParams::reference(-2150.0, 0.0);
    let spec = GridSpec {
        delta_c_range: AxisRange::new(-3200.0, -300.0, 40),
        pump_range: AxisRange::new(0.0, 90.0, 40),
        fixed: base,
        tasks: vec![GridTask::Ground],
        ..GridSpec::default()
    };
    let threads = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let grid = run_grid(&spec, &GridOptions { parallelism: threads, ..Default::default() }).unwrap();
    let records: Vec<_> = grid.records.into_iter().map(|r| r.unwrap()).collect();
    let dpump = spec.pump_range.value(1) - spec.pump_range.value(0);
    let nu0 = base.nu0;

    let mut failed_points = 0;
    let (mut outside, mut outside_ok) = (0, 0);
    let (mut plateau, mut plateau_ok) = (0, 0);
    let (mut deep, mut deep_ok) = (0, 0);
    let mut worst_outside: f64 = 0.0;
    for r in &records {
        if r.status != PointStatus::Ok {
            failed_points += 1;
            continue;
        }
        let theta = r.abs_theta.unwrap();
        let pc = critical_pump(&ModelParams::reference(r.delta_c, 0.0)).ok();
        // One grid step of margin below the contour: the scan resolves the
        // onset only to the pump spacing.
        if pc.is_none_or(|pc| r.pump < pc - dpump) {
            outside += 1;
            worst_outside = worst_outside.max(theta);
            if theta < ORGANIZATION_THRESHOLD {
                outside_ok += 1;
            }
        }
        if theta >= ORGANIZATION_THRESHOLD && r.delta_c > nu0 && r.delta_c < nu0 / 2.0 {
            plateau += 1;
            if r.delta_c_over_kappa.unwrap().abs() < 0.2 {
                plateau_ok += 1;
            }
        }
        if r.delta_c < nu0 && pc.is_some_and(|pc| r.pump > pc) {
            deep += 1;
            if theta > 0.9 {
                deep_ok += 1;
            }
        }
    }
    let plateau_frac = plateau_ok as f64 / plateau.max(1) as f64;
    let deep_frac = deep_ok as f64 / deep.max(1) as f64;
    let pass = outside_ok == outside && plateau_frac >= 0.5 && deep_ok == deep;
    outcome(
        pass,
        format!(
            "below contour |Theta|<1e-3 at {outside_ok}/{outside} (max {worst_outside:.2e}); \
             plateau |dc/kappa|<0.2 at {plateau_ok}/{plateau} ({plateau_frac:.3}, need 0.5); \
             |Theta|>0.9 for dc<NU0 above threshold at {deep_ok}/{deep} ({deep_frac:.3}, need 1.0); \
             {failed_points} points not converged"
        ),
    )
}

fn stability_map() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (dc, pump, want_m1) in [(-1900.0, 22.0, true), (-2150.0, 27.0, false), (-700.0, 80.0, true)] {
        let start = Instant::now();
        let p = ModelParams::reference(dc, pump);
        let g = ground_state(&p, &cavity_bec::ground::ItpmConfig::default()).unwrap();
        let m1 = analyze(MatrixKind::M1, &p, &g).unwrap();
        let m2 = analyze(MatrixKind::M2, &p, &g).unwrap();
        let secs = start.elapsed().as_secs_f64();
        let ok = m1.unstable == want_m1 && !m2.unstable && secs <= 60.0;
        pass &= ok;
        parts.push(format!(
            "({dc}, {pump}): M1 Im {:.3e} {}, M2 Im {:.3e} {} [{secs:.1} s]",
            m1.im_omega_crit, m1.phase_label, m2.im_omega_crit, m2.phase_label
        ));
    }
    outcome(pass, parts.join("; "))
}

fn quench_relaxation() -> Outcome {
    let (_, g) = ground(-2150.0, 27.0);
    let i0 = g.intensity();
    let full = quench(-2150.0, 27.0, Closure::FullOde);
    let corr = quench(-2150.0, 27.0, Closure::Corrected);
    let adia = quench(-2150.0, 27.0, Closure::Adiabatic);
    let (mf, sf) = window_statistics(&full, DEFAULT_WINDOW_FRACTION);
    let (mc, _) = window_statistics(&corr, DEFAULT_WINDOW_FRACTION);
    let (_, sa) = window_statistics(&adia, DEFAULT_WINDOW_FRACTION);
    let (rf, rc) = ((mf - i0).abs() / i0, (mc - i0).abs() / i0);
    let ratio = sa / sf;
    outcome(
        rf <= 0.01 && rc <= 0.01 && ratio > 10.0,
        format!(
            "|alpha0|^2 {i0:.6e}; full late mean rel {rf:.2e}, corrected {rc:.2e} (tol 1e-2); \
             late std adiabatic/full {ratio:.3e} (need > 10)"
        ),
    )
}

fn limit_cycle() -> Outcome {
    let report = |c| detect_limit_cycle(&quench(-1900.0, 22.0, c), DEFAULT_WINDOW_FRACTION).unwrap();
    let full = report(Closure::FullOde);
    let corr = report(Closure::Corrected);
    let adia = report(Closure::Adiabatic);
    let rel = (corr.period - full.period).abs() / full.period;
    outcome(
        full.is_periodic && corr.is_periodic && rel <= 0.05 && !adia.is_periodic,
        format!(
            "full acf {:.3} T {:.4}; corrected acf {:.3} T {:.4} (rel {rel:.2e}, tol 0.05); adiabatic acf {:.3} periodic {}",
            full.autocorrelation_peak, full.period, corr.autocorrelation_peak, corr.period,
            adia.autocorrelation_peak, adia.is_periodic
        ),
    )
}

fn metastability() -> Outcome {
    let cfg = RunConfig::load(
        Some(concat!(env!("CARGO_MANIFEST_DIR"), "/configs/metastable.json").as_ref()),
        &[],
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let s = cmd_metastable(&cfg, dir.path()).unwrap();
    outcome(
        s.quench.is_periodic
            && s.continuation.is_periodic
            && s.period_rel_change <= 0.05
            && s.amplitude_rel_change <= 0.05
            && s.ground_converged
            && s.stationary_max_rel_deviation <= 1e-6,
        format!(
            "period {:.4} -> {:.4} (rel {:.2e}), peak-to-peak rel {:.2e} (tol 0.05); \
             stationary drift {:.2e} (tol 1e-6)",
            s.quench.period, s.continuation.period, s.period_rel_change, s.amplitude_rel_change,
            s.stationary_max_rel_deviation
        ),
    )
}

fn properties() -> Outcome {
    let mut checks: Vec<(String, bool)> = Vec::new();
    let mut check = |name: String, ok: bool| checks.push((name, ok));

    let random = random_state_norm_drift(4, 11);
    check(format!("random-state norm drift {random:.1e}"), random <= 1e-8);
    for (dc, pump) in [(-2150.0, 27.0), (-1900.0, 22.0)] {
        for c in Closure::ALL {
            let (d, _) = quench_norm_drift(dc, pump, c, 20.0);
            check(format!("norm ({dc},{pump}) {c} {d:.1e}"), d <= 1e-8);
        }
    }
    for (dc, pump) in [(-2150.0, 27.0), (-1900.0, 22.0), (-700.0, 80.0)] {
        let (p, g) = ground(dc, pump);
        for kind in MatrixKind::ALL {
            let spec = spectrum(kind, &p, &g);
            let e = pairing_error(&spec);
            check(format!("pairing ({dc},{pump}) {kind} {e:.1e}"), e <= 1e-8);
            if g.abs_theta() >= ORGANIZATION_THRESHOLD {
                let (w, _) = zero_mode(kind, &p, &g);
                check(format!("zero mode ({dc},{pump}) {kind} {w:.1e}"), w <= 1e-6);
            }
        }
        let s = s_conjugate_identity_error(&p, &g);
        check(format!("S identity ({dc},{pump}) {s:.1e}"), s <= 1e-12);
    }
    let q = operator_quadrature_error(20);
    check(format!("quadrature {q:.1e}"), q <= 1e-10);
    let fd = derivative_fd_error(25, 7);
    check(format!("derivatives {fd:.1e}"), fd <= 1e-6);
    let (c1, a1) = corrected_field_oracle(1.0);
    check(format!("corrected field {c1:.1e} (adiabatic {a1:.1e})"), c1 <= 1e-5 && a1 / c1 > 100.0);
    for (c, dt, t) in [
        (Closure::Adiabatic, 0.004, 1.0),
        (Closure::Corrected, 0.004, 1.0),
        (Closure::FullOde, 2.5e-4, 0.1),
    ] {
        let r = rk4_order_ratio(c, dt, t);
        check(format!("rk4 {c} ratio {r:.2}"), (r - 16.0).abs() <= 2.0);
    }
    let failed: Vec<&str> = checks.iter().filter(|(_, ok)| !ok).map(|(n, _)| n.as_str()).collect();
    let detail = if failed.is_empty() {
        format!("{} checks", checks.len())
    } else {
        format!("{} of {} checks failed: {}", failed.len(), checks.len(), failed.join("; "))
    };
    outcome(failed.is_empty(), detail)
}

fn chaos() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for c in Closure::ALL {
        let traj = quench(-1450.0, 60.0, c);
        let r = detect_limit_cycle(&traj, DEFAULT_WINDOW_FRACTION).unwrap();
        pass &= !r.is_periodic;
        let mut part = format!("{c} acf {:.3} periodic {}", r.autocorrelation_peak, r.is_periodic);
        if c == Closure::FullOde {
            let warned = traj.warnings.iter().any(|w| w.contains("edge"));
            pass &= traj.max_edge_population.is_finite()
                && warned == (traj.max_edge_population > EDGE_POPULATION_WARNING);
            part += &format!(
                ", max edge population {:.2e} (warning {})",
                traj.max_edge_population,
                if warned { "raised" } else { "not raised" }
            );
        }
        parts.push(part);
    }
    outcome(pass, parts.join("; "))
}

fn main() {
    let criteria: [(&str, f64, fn() -> Outcome); 8] = [
        ("1 threshold reproduction", 120.0, threshold),
        ("2 phase-diagram structure", 1800.0, phase_diagram),
        ("3 stability-map dichotomy", 180.0, stability_map),
        ("4 quench relaxation", 600.0, quench_relaxation),
        ("5 limit cycle", 600.0, limit_cycle),
        ("6 metastability protocol", 300.0, metastability),
        ("7 property suite", 120.0, properties),
        ("8 chaotic regime", 600.0, chaos),
    ];
    let mut failures = 0;
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let o = run();
        let secs = start.elapsed().as_secs_f64();
        let pass = o.pass && secs <= budget;
        if !pass {
            failures += 1;
        }
        println!(
            "{} criterion {name}: {} [{secs:.1} s, budget {budget:.0} s]",
            if pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!("acceptance: {} of 8 criteria passed", 8 - failures);
    if failures > 0 && std::env::var("CAVITY_BEC_ACCEPTANCE_STRICT").as_deref() == Ok("1") {
        std::process::exit(1);
    }
}
