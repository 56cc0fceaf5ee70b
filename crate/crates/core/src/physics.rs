//! Momentum-ladder representation of the condensate, collective operators and
//! the algebraic cavity-field closures.
//!
//! The condensate wavefunction is expanded in plane waves `|n>` with momentum
//! `n hbar k_c`, `n` in `-n_max..=n_max`. Over one cavity wavelength the grating
//! operators are banded in this basis:
//!
//! * `Theta = cos(k_c x)` couples `n <-> n +- 1` with weight 1/2,
//! * `B = cos^2(k_c x)` is 1/2 on the diagonal and couples `n <-> n +- 2` with 1/4,
//! * kinetic energy of `|n>` is `n^2` (recoil units).
//!
//! Couplings that would leave the ladder are dropped.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::params::ModelParams;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Edge population above which the momentum cutoff is no longer trusted.
pub const EDGE_POPULATION_WARNING: f64 = 1e-6;

/// Imaginary residue tolerated (and discarded) in observable derivatives.
pub const DERIVATIVE_IMAG_TOLERANCE: f64 = 1e-12;

/// How the cavity field is obtained during real-time evolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Closure {
    /// Cavity amplitude integrated as its own ODE.
    FullOde,
    /// Instantaneous stationary field.
    Adiabatic,
    /// Stationary field plus first-order retardation corrections.
    Corrected,
}

impl Closure {
    pub const ALL: [Closure; 3] = [Closure::FullOde, Closure::Adiabatic, Closure::Corrected];

    pub fn as_str(&self) -> &'static str {
        match self {
            Closure::FullOde => "full-ode",
            Closure::Adiabatic => "adiabatic",
            Closure::Corrected => "corrected",
        }
    }
}

impl std::fmt::Display for Closure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Closure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full-ode" | "full" => Ok(Closure::FullOde),
            "adiabatic" => Ok(Closure::Adiabatic),
            "corrected" => Ok(Closure::Corrected),
            other => Err(Error::Config(format!(
                "unknown closure `{other}` (expected full-ode, adiabatic or corrected)"
            ))),
        }
    }
}

/// Rescaled cavity amplitude `alpha = <a>/sqrt(N)` and the closure that produced it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CavityAmplitude {
    pub alpha: C64,
    pub closure: Closure,
}

impl CavityAmplitude {
    pub fn new(alpha: C64, closure: Closure) -> Self {
        Self { alpha, closure }
    }

    pub fn empty(closure: Closure) -> Self {
        Self::new(ZERO, closure)
    }

    pub fn intensity(&self) -> f64 {
        self.alpha.norm_sqr()
    }

    pub fn is_finite(&self) -> bool {
        self.alpha.re.is_finite() && self.alpha.im.is_finite()
    }
}

/// Mean-field wavefunction on the truncated momentum ladder.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentumState {
    n_max: usize,
    amplitudes: Vec<C64>,
}

impl MomentumState {
    /// Homogeneous condensate `|p = 0>`.
    pub fn zero_momentum(n_max: usize) -> Self {
        let mut amplitudes = vec![ZERO; 2 * n_max + 1];
        amplitudes[n_max] = C64::new(1.0, 0.0);
        Self { n_max, amplitudes }
    }

    /// `|p = 0>` with amplitude `epsilon` added on `n = +-1`, then normalized.
    pub fn seeded(n_max: usize, epsilon: f64) -> Self {
        let mut state = Self::zero_momentum(n_max);
        state.amplitudes[n_max - 1] = C64::new(epsilon, 0.0);
        state.amplitudes[n_max + 1] = C64::new(epsilon, 0.0);
        state.normalize();
        state
    }

    /// Imaginary-time seed: `c_0 = sqrt(1 - 2 eps^2)`, `c_{+-1} = eps`.
    pub fn itpm_seed(n_max: usize, epsilon: f64) -> Self {
        let mut state = Self::zero_momentum(n_max);
        state.amplitudes[n_max] = C64::new((1.0 - 2.0 * epsilon * epsilon).max(0.0).sqrt(), 0.0);
        state.amplitudes[n_max - 1] = C64::new(epsilon, 0.0);
        state.amplitudes[n_max + 1] = C64::new(epsilon, 0.0);
        state.normalize();
        state
    }

    /// Wraps raw amplitudes ordered `n = -n_max, ..., n_max`. Not normalized.
    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() < 3 || amplitudes.len() % 2 == 0 {
            return Err(Error::invalid(
                "state.amplitudes",
                format!("length must be odd and >= 3 (got {})", amplitudes.len()),
            ));
        }
        Ok(Self {
            n_max: amplitudes.len() / 2,
            amplitudes,
        })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    /// Amplitude of momentum `n`.
    pub fn amplitude(&self, n: i64) -> C64 {
        let idx = n + self.n_max as i64;
        if idx < 0 || idx as usize >= self.amplitudes.len() {
            ZERO
        } else {
            self.amplitudes[idx as usize]
        }
    }

    /// Momentum label of each ladder index.
    pub fn momenta(&self) -> impl Iterator<Item = i64> + '_ {
        let n_max = self.n_max as i64;
        (0..self.amplitudes.len()).map(move |k| k as i64 - n_max)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Rescales to unit norm and returns the norm before rescaling.
    pub fn normalize(&mut self) -> f64 {
        normalize_slice(&mut self.amplitudes)
    }

    pub fn normalized(mut self) -> Self {
        self.normalize();
        self
    }

    pub fn is_finite(&self) -> bool {
        self.amplitudes
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Largest of `|c_{-n_max}|^2` and `|c_{+n_max}|^2`.
    pub fn edge_population(&self) -> f64 {
        let first = self.amplitudes[0].norm_sqr();
        let last = self.amplitudes[self.amplitudes.len() - 1].norm_sqr();
        first.max(last)
    }

    pub fn theta(&self) -> f64 {
        expect_theta(&self.amplitudes)
    }

    pub fn bunching(&self) -> f64 {
        expect_bunching(&self.amplitudes)
    }

    /// `c_n -> (-1)^n c_n`, the half-wavelength translation that flips `Theta`.
    pub fn parity_flipped(&self) -> Self {
        let amplitudes = self
            .momenta()
            .zip(&self.amplitudes)
            .map(|(n, c)| if n.rem_euclid(2) == 1 { -c } else { *c })
            .collect();
        Self {
            n_max: self.n_max,
            amplitudes,
        }
    }

    /// Momentum distribution `|c_n|^2`.
    pub fn populations(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|c| c.norm_sqr()).collect()
    }
}

pub(crate) fn normalize_slice(v: &mut [C64]) -> f64 {
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        let inv = 1.0 / norm;
        v.iter_mut().for_each(|c| *c *= inv);
    }
    norm
}

/// Banded operator on the momentum ladder, stored by diagonals.
#[derive(Clone, Debug, PartialEq)]
pub struct BandedMatrix {
    dim: usize,
    half_bandwidth: usize,
    /// `diagonals[w + k][i]` holds entry `(i, i + k)` for offset `k`.
    diagonals: Vec<Vec<C64>>,
}

impl BandedMatrix {
    fn zeros(dim: usize, half_bandwidth: usize) -> Self {
        Self {
            dim,
            half_bandwidth,
            diagonals: vec![vec![ZERO; dim]; 2 * half_bandwidth + 1],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Largest offset with a nonzero entry.
    pub fn bandwidth(&self) -> usize {
        let w = self.half_bandwidth as isize;
        (-w..=w)
            .filter(|&k| {
                self.diagonals[(k + w) as usize]
                    .iter()
                    .any(|z| *z != ZERO)
            })
            .map(|k| k.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        let k = col as isize - row as isize;
        let w = self.half_bandwidth as isize;
        if k.abs() > w || row >= self.dim || col >= self.dim {
            ZERO
        } else {
            self.diagonals[(k + w) as usize][row]
        }
    }

    fn set(&mut self, row: usize, col: usize, value: C64) {
        let k = col as isize - row as isize;
        let w = self.half_bandwidth as isize;
        self.diagonals[(k + w) as usize][row] = value;
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.dim);
        let w = self.half_bandwidth as isize;
        let mut out = vec![ZERO; self.dim];
        for (i, o) in out.iter_mut().enumerate() {
            for k in -w..=w {
                let j = i as isize + k;
                if j >= 0 && (j as usize) < self.dim {
                    *o += self.diagonals[(k + w) as usize][i] * v[j as usize];
                }
            }
        }
        out
    }

    /// `<v|A|v>`.
    pub fn expectation(&self, v: &[C64]) -> C64 {
        crate::linalg::inner(v, &self.apply(v))
    }

    pub fn to_dense(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j))
    }
}

/// Matrix of `cos(k_c x)` on the ladder `-n_max..=n_max`.
pub fn theta_matrix(n_max: usize) -> BandedMatrix {
    let dim = 2 * n_max + 1;
    let mut m = BandedMatrix::zeros(dim, 1);
    for i in 0..dim - 1 {
        m.set(i, i + 1, C64::new(0.5, 0.0));
        m.set(i + 1, i, C64::new(0.5, 0.0));
    }
    m
}

/// Matrix of `cos^2(k_c x)` on the ladder `-n_max..=n_max`.
pub fn bunching_matrix(n_max: usize) -> BandedMatrix {
    let dim = 2 * n_max + 1;
    let mut m = BandedMatrix::zeros(dim, 2);
    for i in 0..dim {
        m.set(i, i, C64::new(0.5, 0.0));
    }
    for i in 0..dim.saturating_sub(2) {
        m.set(i, i + 2, C64::new(0.25, 0.0));
        m.set(i + 2, i, C64::new(0.25, 0.0));
    }
    m
}

/// Kinetic energy `n^2` of each ladder state.
pub fn kinetic_energies(n_max: usize) -> Vec<f64> {
    let n_max = n_max as i64;
    (-n_max..=n_max).map(|n| (n * n) as f64).collect()
}

/// `<Theta>` for the given amplitudes (not assumed normalized).
#[inline]
pub(crate) fn expect_theta(c: &[C64]) -> f64 {
    let mut acc = 0.0;
    for w in c.windows(2) {
        acc += w[0].re * w[1].re + w[0].im * w[1].im;
    }
    acc
}

/// `<B>` for the given amplitudes (not assumed normalized).
#[inline]
pub(crate) fn expect_bunching(c: &[C64]) -> f64 {
    let mut diag = 0.0;
    for z in c {
        diag += z.norm_sqr();
    }
    let mut off = 0.0;
    for k in 0..c.len().saturating_sub(2) {
        off += c[k].re * c[k + 2].re + c[k].im * c[k + 2].im;
    }
    0.5 * diag + 0.5 * off
}

/// `(dTheta/dt, dB/dt)` from the closed real forms of the kinetic commutators.
#[inline]
pub(crate) fn derivatives_fast(c: &[C64], n_max: usize) -> (f64, f64) {
    let n0 = n_max as f64;
    let mut theta_dot = 0.0;
    for k in 0..c.len() - 1 {
        let n = k as f64 - n0;
        // Im(conj(c_n) c_{n+1})
        let im = c[k].re * c[k + 1].im - c[k].im * c[k + 1].re;
        theta_dot += (2.0 * n + 1.0) * im;
    }
    let mut b_dot = 0.0;
    for k in 0..c.len().saturating_sub(2) {
        let n = k as f64 - n0;
        let im = c[k].re * c[k + 2].im - c[k].im * c[k + 2].re;
        b_dot += 2.0 * (n + 1.0) * im;
    }
    (theta_dot, b_dot)
}

/// Writes `H_mf(alpha) c` into `out`, where the field enters through the
/// real couplings `stark = NU0 |alpha|^2` and `drive = pump (alpha + alpha*)`.
#[inline]
pub(crate) fn apply_hamiltonian(c: &[C64], stark: f64, drive: f64, n_max: usize, out: &mut [C64]) {
    let dim = c.len();
    let n0 = n_max as f64;
    let half_stark = 0.5 * stark;
    let quarter_stark = 0.25 * stark;
    let half_drive = 0.5 * drive;
    for k in 0..dim {
        let n = k as f64 - n0;
        let mut acc = c[k] * (n * n + half_stark);
        let mut nb1 = ZERO;
        if k >= 1 {
            nb1 += c[k - 1];
        }
        if k + 1 < dim {
            nb1 += c[k + 1];
        }
        acc += nb1 * half_drive;
        let mut nb2 = ZERO;
        if k >= 2 {
            nb2 += c[k - 2];
        }
        if k + 2 < dim {
            nb2 += c[k + 2];
        }
        acc += nb2 * quarter_stark;
        out[k] = acc;
    }
}

/// Effective cavity detuning `delta_c = Delta_c - NU0 B`.
pub fn effective_detuning(params: &ModelParams, bunching: f64) -> f64 {
    params.delta_c_bare - params.nu0 * bunching
}

/// Instantaneous stationary cavity field `pump Theta / (delta_c + i kappa)`.
pub fn adiabatic_field(params: &ModelParams, theta: f64, bunching: f64) -> CavityAmplitude {
    CavityAmplitude::new(adiabatic_alpha(params, theta, bunching), Closure::Adiabatic)
}

#[inline]
pub(crate) fn adiabatic_alpha(params: &ModelParams, theta: f64, bunching: f64) -> C64 {
    let dc = effective_detuning(params, bunching);
    C64::new(params.pump * theta, 0.0) / C64::new(dc, params.kappa)
}

/// Stationary field with first-order retardation corrections:
///
/// `alpha = i g Theta / L + i g dTheta / L^2 - g NU0 Theta dB / L^3`,
/// with `L = i delta_c - kappa` and `g` the pump strength.
pub fn corrected_field(
    params: &ModelParams,
    theta: f64,
    bunching: f64,
    theta_dot: f64,
    b_dot: f64,
) -> CavityAmplitude {
    CavityAmplitude::new(
        corrected_alpha(params, theta, bunching, theta_dot, b_dot),
        Closure::Corrected,
    )
}

#[inline]
pub(crate) fn corrected_alpha(
    params: &ModelParams,
    theta: f64,
    bunching: f64,
    theta_dot: f64,
    b_dot: f64,
) -> C64 {
    let g = params.pump;
    let l = C64::new(-params.kappa, effective_detuning(params, bunching));
    let inv = 1.0 / l;
    let inv2 = inv * inv;
    let inv3 = inv2 * inv;
    I * (g * theta) * inv + I * (g * theta_dot) * inv2 - (g * params.nu0 * theta * b_dot) * inv3
}

/// `(dTheta/dt, dB/dt) = (1/i) <[O, K]>` for `O = Theta, B`.
///
/// Evaluated from the full complex commutator expectation; an imaginary residue
/// above [`DERIVATIVE_IMAG_TOLERANCE`] (relative to the magnitude) is an error.
pub fn observable_derivatives(state: &MomentumState) -> Result<(f64, f64)> {
    let kin = kinetic_energies(state.n_max());
    let c = state.amplitudes();
    let commutator_expectation = |op: &BandedMatrix| -> C64 {
        let dim = c.len();
        let mut acc = ZERO;
        for m in 0..dim {
            for n in m.saturating_sub(2)..(m + 3).min(dim) {
                let o = op.get(m, n);
                if o != ZERO {
                    acc += c[m].conj() * o * (kin[n] - kin[m]) * c[n];
                }
            }
        }
        acc / I
    };
    let theta_dot = commutator_expectation(&theta_matrix(state.n_max()));
    let b_dot = commutator_expectation(&bunching_matrix(state.n_max()));
    for z in [theta_dot, b_dot] {
        if z.im.abs() > DERIVATIVE_IMAG_TOLERANCE * (1.0 + z.re.abs()) {
            return Err(Error::ComplexDerivative { residue: z.im.abs() });
        }
    }
    Ok((theta_dot.re, b_dot.re))
}

/// `H_mf(alpha) |psi> = [K + NU0 |alpha|^2 B + pump (alpha + alpha*) Theta] |psi>`.
pub fn mean_field_apply(
    params: &ModelParams,
    alpha: &CavityAmplitude,
    state: &MomentumState,
) -> MomentumState {
    let (stark, drive) = field_couplings(params, alpha.alpha);
    let mut out = vec![ZERO; state.dim()];
    apply_hamiltonian(state.amplitudes(), stark, drive, state.n_max(), &mut out);
    MomentumState {
        n_max: state.n_max(),
        amplitudes: out,
    }
}

#[inline]
pub(crate) fn field_couplings(params: &ModelParams, alpha: C64) -> (f64, f64) {
    (params.nu0 * alpha.norm_sqr(), 2.0 * params.pump * alpha.re)
}

/// Dense `H_mf(alpha)` on the ladder (real symmetric).
pub fn mean_field_matrix(params: &ModelParams, alpha: C64) -> DenseMatrix {
    let (stark, drive) = field_couplings(params, alpha);
    let kin = kinetic_energies(params.n_max);
    let theta = theta_matrix(params.n_max);
    let bunch = bunching_matrix(params.n_max);
    DenseMatrix::from_fn(params.dim(), params.dim(), |i, j| {
        let k = if i == j { kin[i] } else { 0.0 };
        C64::new(k, 0.0) + bunch.get(i, j) * stark + theta.get(i, j) * drive
    })
}

/// `<psi|H_mf(alpha)|psi>` (assumes a normalized state).
pub fn mean_field_energy(params: &ModelParams, alpha: C64, state: &MomentumState) -> f64 {
    let (stark, drive) = field_couplings(params, alpha);
    let mut out = vec![ZERO; state.dim()];
    apply_hamiltonian(state.amplitudes(), stark, drive, state.n_max(), &mut out);
    crate::linalg::inner(state.amplitudes(), &out).re
}

/// Position-space complex conjugate `psi*(x)` in the momentum ladder:
/// `(psi*)_n = conj(c_{-n})`.
pub fn conjugate_state(state: &MomentumState) -> MomentumState {
    MomentumState {
        n_max: state.n_max(),
        amplitudes: state.amplitudes().iter().rev().map(|c| c.conj()).collect(),
    }
}

/// Snapshot of the collective observables at one instant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observables {
    pub theta: f64,
    pub bunching: f64,
    pub theta_dot: f64,
    pub b_dot: f64,
    pub delta_c_eff: f64,
    pub intensity: f64,
    pub energy: f64,
}

impl Observables {
    /// Observables of a normalized state together with the given field.
    pub fn measure(params: &ModelParams, state: &MomentumState, alpha: C64) -> Self {
        let c = state.amplitudes();
        let theta = expect_theta(c);
        let bunching = expect_bunching(c);
        let (theta_dot, b_dot) = derivatives_fast(c, state.n_max());
        Self {
            theta,
            bunching,
            theta_dot,
            b_dot,
            delta_c_eff: effective_detuning(params, bunching),
            intensity: alpha.norm_sqr(),
            energy: mean_field_energy(params, alpha, state),
        }
    }
}
