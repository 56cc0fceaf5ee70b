//! Independent reference computations shared by the oracle and acceptance
//! tests. Each returns a measured error so callers can assert or report it.

#![allow(dead_code)]

use std::f64::consts::PI;

use cavity_bec::dynamics::{propagate, run_quench, IntegratorConfig, Trajectory};
use cavity_bec::ground::{ground_state, GroundStateResult, ItpmConfig};
use cavity_bec::linalg::{vec_norm, DenseMatrix};
use cavity_bec::physics::{
    bunching_matrix, corrected_field, adiabatic_field, observable_derivatives, theta_matrix,
};
use cavity_bec::stability::{
    build_m1, build_m2, build_matrix, fluctuation_spectrum, phase_mode, s_operator, MatrixKind,
};
use cavity_bec::{Closure, ModelParams, MomentumState};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const QUADRATURE_POINTS: usize = 2048;

pub fn ground(delta_c: f64, pump: f64) -> (ModelParams, GroundStateResult) {
    let p = ModelParams::reference(delta_c, pump);
    let g = ground_state(&p, &ItpmConfig::default()).expect("ground state converges");
    (p, g)
}

/// `<n| f(x) |m>` for plane waves `e^{i n x}` by the trapezoid rule on one period.
fn quadrature_matrix(n_max: usize, f: impl Fn(f64) -> f64) -> Vec<Vec<C64>> {
    let dim = 2 * n_max + 1;
    let xs: Vec<f64> = (0..QUADRATURE_POINTS)
        .map(|j| 2.0 * PI * j as f64 / QUADRATURE_POINTS as f64)
        .collect();
    let fx: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut m = vec![vec![C64::new(0.0, 0.0); dim]; dim];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            let dn = j as f64 - i as f64;
            let mut acc = C64::new(0.0, 0.0);
            for (x, v) in xs.iter().zip(&fx) {
                acc += C64::from_polar(*v, dn * x);
            }
            *entry = acc / QUADRATURE_POINTS as f64;
        }
    }
    m
}

/// Largest entrywise deviation of the ladder operators from quadrature.
pub fn operator_quadrature_error(n_max: usize) -> f64 {
    let theta = theta_matrix(n_max).to_dense();
    let bunch = bunching_matrix(n_max).to_dense();
    let q_theta = quadrature_matrix(n_max, f64::cos);
    let q_bunch = quadrature_matrix(n_max, |x| x.cos().powi(2));
    let mut err: f64 = 0.0;
    for i in 0..theta.rows() {
        for j in 0..theta.cols() {
            err = err.max((theta[(i, j)] - q_theta[i][j]).norm());
            err = err.max((bunch[(i, j)] - q_bunch[i][j]).norm());
        }
    }
    err
}

pub fn random_state(rng: &mut ChaCha8Rng, n_max: usize, occupied: usize) -> MomentumState {
    let mut c = vec![C64::new(0.0, 0.0); 2 * n_max + 1];
    for n in -(occupied as i64)..=(occupied as i64) {
        let idx = (n + n_max as i64) as usize;
        c[idx] = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    }
    MomentumState::from_amplitudes(c).unwrap().normalized()
}

/// Free kinetic evolution `c_n -> c_n exp(-i n^2 t)`, exact on the ladder.
fn evolve_kinetic(state: &MomentumState, t: f64) -> MomentumState {
    let n_max = state.n_max() as i64;
    let c: Vec<C64> = state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(i, z)| {
            let n = i as i64 - n_max;
            z * C64::from_polar(1.0, -((n * n) as f64) * t)
        })
        .collect();
    MomentumState::from_amplitudes(c).unwrap()
}

/// Largest relative deviation of `(dTheta/dt, dB/dt)` from a fourth-order
/// central difference along the exact kinetic flow. Only the kinetic term
/// fails to commute with `Theta` and `B`, so this flow carries the full rate.
pub fn derivative_fd_error(samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = 1e-4;
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let s = random_state(&mut rng, 12, 8);
        let (th_dot, b_dot) = observable_derivatives(&s).unwrap();
        let at = |t: f64| {
            let e = evolve_kinetic(&s, t);
            (e.theta(), e.bunching())
        };
        let (p1, m1, p2, m2) = (at(h), at(-h), at(2.0 * h), at(-2.0 * h));
        let fd_theta = (-p2.0 + 8.0 * p1.0 - 8.0 * m1.0 + m2.0) / (12.0 * h);
        let fd_b = (-p2.1 + 8.0 * p1.1 - 8.0 * m1.1 + m2.1) / (12.0 * h);
        let scale = th_dot.abs().max(b_dot.abs()).max(1e-12);
        worst = worst.max((th_dot - fd_theta).abs() / scale);
        worst = worst.max((b_dot - fd_b).abs() / scale);
    }
    worst
}

/// Prescribed slow drive `Theta(t)`, `B(t)` fed to the exact cavity equation
/// `d alpha/dt = (i delta_c(t) - kappa) alpha - i g Theta(t)`, integrated with
/// a fine RK4 independent of the library. Returns the largest relative
/// deviations `(corrected, adiabatic)` after transients have decayed.
pub fn corrected_field_oracle(nu: f64) -> (f64, f64) {
    let p = ModelParams::reference(-2150.0, 27.0);
    let theta = |t: f64| -0.6 + 0.2 * (nu * t).sin();
    let theta_dot = |t: f64| 0.2 * nu * (nu * t).cos();
    let bunch = |t: f64| 0.7 + 0.1 * (nu * t + 0.3).sin();
    let b_dot = |t: f64| 0.1 * nu * (nu * t + 0.3).cos();
    let rhs = |t: f64, a: C64| {
        let dc = p.delta_c_bare - p.nu0 * bunch(t);
        C64::new(-p.kappa, dc) * a - C64::new(0.0, p.pump * theta(t))
    };
    let dt = 1e-5;
    let mut t = 0.0;
    let mut a = adiabatic_field(&p, theta(0.0), bunch(0.0)).alpha;
    let mut worst = (0.0f64, 0.0f64);
    let settle = 0.2;
    let t_end = settle + 2.0 * PI / nu;
    let mut step = 0usize;
    while t < t_end {
        let k1 = rhs(t, a);
        let k2 = rhs(t + dt / 2.0, a + k1 * (dt / 2.0));
        let k3 = rhs(t + dt / 2.0, a + k2 * (dt / 2.0));
        let k4 = rhs(t + dt, a + k3 * dt);
        a += (k1 + (k2 + k3) * 2.0 + k4) * (dt / 6.0);
        step += 1;
        t = step as f64 * dt;
        if t > settle && step % 100 == 0 {
            let c = corrected_field(&p, theta(t), bunch(t), theta_dot(t), b_dot(t)).alpha;
            let z = adiabatic_field(&p, theta(t), bunch(t)).alpha;
            worst.0 = worst.0.max((c - a).norm() / a.norm());
            worst.1 = worst.1.max((z - a).norm() / a.norm());
        }
    }
    worst
}

fn final_amplitudes(p: &ModelParams, closure: Closure, dt: f64, t: f64) -> (Vec<C64>, C64) {
    let cfg = IntegratorConfig::new(closure)
        .with_dt(dt)
        .with_t_final(t)
        .with_record_stride(usize::MAX / 2)
        .with_seed_epsilon(0.05);
    let traj = run_quench(p, &cfg).unwrap();
    (traj.final_state.amplitudes().to_vec(), traj.final_field.alpha)
}

fn distance(a: &(Vec<C64>, C64), b: &(Vec<C64>, C64)) -> f64 {
    let d: f64 = a.0.iter().zip(&b.0).map(|(x, y)| (x - y).norm_sqr()).sum();
    (d + (a.1 - b.1).norm_sqr()).sqrt()
}

/// Richardson ratio `|y(h) - y(h/2)| / |y(h/2) - y(h/4)|`, 16 for a
/// fourth-order method.
pub fn rk4_order_ratio(closure: Closure, dt: f64, t: f64) -> f64 {
    let p = ModelParams::reference(-1900.0, 22.0);
    let y1 = final_amplitudes(&p, closure, dt, t);
    let y2 = final_amplitudes(&p, closure, dt / 2.0, t);
    let y4 = final_amplitudes(&p, closure, dt / 4.0, t);
    distance(&y1, &y2) / distance(&y2, &y4)
}

/// Largest distance from `-conj(w)` to the spectrum, over all eigenvalues `w`.
pub fn pairing_error(eigenvalues: &[C64]) -> f64 {
    eigenvalues
        .iter()
        .map(|w| {
            let target = -w.conj();
            eigenvalues
                .iter()
                .map(|v| (v - target).norm())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

pub fn spectrum(kind: MatrixKind, p: &ModelParams, g: &GroundStateResult) -> Vec<C64> {
    let m = build_matrix(kind, p, g).unwrap();
    fluctuation_spectrum(kind, &m, g).unwrap().eigenvalues
}

/// `(second smallest |omega|, ||M v|| / ||v||)` for the phase mode `v`.
pub fn zero_mode(kind: MatrixKind, p: &ModelParams, g: &GroundStateResult) -> (f64, f64) {
    let mut mags: Vec<f64> = spectrum(kind, p, g).iter().map(|w| w.norm()).collect();
    mags.sort_by(f64::total_cmp);
    let m = build_matrix(kind, p, g).unwrap();
    let v = phase_mode(kind, g);
    (mags[1], vec_norm(&m.matvec(&v)) / vec_norm(&v))
}

/// `|| M2 - (D - C A^-1 B) ||_max` with `M1 = [[A, B], [C, D]]` split after the
/// two cavity rows.
pub fn schur_complement_error(p: &ModelParams, g: &GroundStateResult) -> f64 {
    let m1 = build_m1(p, g).unwrap();
    let m2 = build_m2(p, g).unwrap();
    let n = m2.rows();
    let a = m1.block(0, 0, 2, 2);
    let b = m1.block(0, 2, 2, n);
    let c = m1.block(2, 0, n, 2);
    let d = m1.block(2, 2, n, n);
    let det = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
    let mut a_inv = DenseMatrix::zeros(2, 2);
    a_inv[(0, 0)] = a[(1, 1)] / det;
    a_inv[(1, 1)] = a[(0, 0)] / det;
    a_inv[(0, 1)] = -a[(0, 1)] / det;
    a_inv[(1, 0)] = -a[(1, 0)] / det;
    let schur = d.sub(&c.matmul(&a_inv).matmul(&b));
    schur.sub(&m2).max_abs() / m2.max_abs()
}

/// `|| conj(S) - S^dag ||_max` for the coupling operator at the stationary field.
pub fn s_conjugate_identity_error(p: &ModelParams, g: &GroundStateResult) -> f64 {
    let s = s_operator(p, g.alpha0.alpha);
    s.conj().sub(&s.adjoint()).max_abs()
}

/// Largest per-step `|norm - 1|` before renormalization over a quench.
pub fn quench_norm_drift(delta_c: f64, pump: f64, closure: Closure, t_final: f64) -> (f64, Trajectory) {
    let p = ModelParams::reference(delta_c, pump);
    let traj = run_quench(&p, &IntegratorConfig::new(closure).with_t_final(t_final)).unwrap();
    (traj.max_norm_error(), traj)
}

/// Per-step norm drift from random smooth states, all closures.
pub fn random_state_norm_drift(samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = ModelParams::reference(-2150.0, 27.0);
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let s = random_state(&mut rng, p.n_max, 6);
        for closure in Closure::ALL {
            let cfg = IntegratorConfig::new(closure).with_t_final(IntegratorConfig::new(closure).dt * 20.0);
            let traj = propagate(&p, &cfg, s.clone(), C64::new(0.0, 0.0), 0.0).unwrap();
            worst = worst.max(traj.max_norm_error());
        }
    }
    worst
}
