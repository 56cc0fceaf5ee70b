//! Linear fluctuation analysis around stationary states.
//!
//! Fluctuations are ordered as `(da, da*, dpsi+, dpsi-)` for the full matrix
//! and `(dpsi+, dpsi-)` once the cavity is eliminated. Conjugate vectors such
//! as `psi0*` are the position-space conjugate from
//! [`conjugate_state`](crate::physics::conjugate_state).

use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ground::GroundStateResult;
use crate::linalg::{eigen_spectrum, eigen_spectrum_deflated, DenseMatrix, Spectrum};
use crate::params::ModelParams;
use crate::physics::{
    bunching_matrix, conjugate_state, effective_detuning, mean_field_matrix, theta_matrix,
};

/// `Im(omega_crit)` above which a state counts as unstable.
pub const INSTABILITY_THRESHOLD: f64 = 1e-4;
/// `|Theta|` separating organized from unorganized states.
pub const ORGANIZATION_THRESHOLD: f64 = 1e-3;
/// Largest `||M v|| / ||M||_F` for which the phase mode `v` is deflated exactly.
pub const PHASE_MODE_DEFLATION_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MatrixKind {
    /// Atoms plus cavity fluctuations.
    M1,
    /// Cavity adiabatically eliminated.
    M2,
}

impl MatrixKind {
    pub const ALL: [MatrixKind; 2] = [MatrixKind::M1, MatrixKind::M2];

    pub fn as_str(&self) -> &'static str {
        match self {
            MatrixKind::M1 => "M1",
            MatrixKind::M2 => "M2",
        }
    }
}

impl fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PhaseLabel {
    /// Unorganized and stable.
    US,
    /// Organized and stable.
    OS,
    #[serde(rename = "UNSTABLE")]
    Unstable,
}

impl PhaseLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            PhaseLabel::US => "US",
            PhaseLabel::OS => "OS",
            PhaseLabel::Unstable => "UNSTABLE",
        }
    }
}

impl fmt::Display for PhaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StabilityReport {
    pub matrix_kind: MatrixKind,
    pub eigenvalues: Vec<C64>,
    pub omega_crit: C64,
    /// Raw `Im(omega_crit)`, kept so maps can be re-thresholded.
    pub im_omega_crit: f64,
    pub unstable: bool,
    pub phase_label: PhaseLabel,
    pub residual_max: f64,
}

/// `S = pump Theta + NU0 alpha0 B` on the ladder.
pub fn s_operator(params: &ModelParams, alpha0: C64) -> DenseMatrix {
    let theta = theta_matrix(params.n_max);
    let bunch = bunching_matrix(params.n_max);
    let b_coeff = alpha0 * params.nu0;
    DenseMatrix::from_fn(params.dim(), params.dim(), |i, j| {
        theta.get(i, j) * params.pump + bunch.get(i, j) * b_coeff
    })
}

/// Pieces shared by both fluctuation matrices.
struct Linearization {
    dim: usize,
    /// `H_mf(alpha0) - mu`.
    delta_h: DenseMatrix,
    psi: Vec<C64>,
    psi_conj: Vec<C64>,
    s: DenseMatrix,
    s_dag: DenseMatrix,
    delta_c: f64,
    kappa: f64,
}

impl Linearization {
    fn new(params: &ModelParams, ground: &GroundStateResult) -> Result<Self> {
        if !ground.converged {
            return Err(Error::GroundStateNotConverged {
                residual: ground.residual,
            });
        }
        if ground.state.n_max() != params.n_max {
            return Err(Error::invalid("ground", "momentum cutoff differs from params.n_max"));
        }
        let alpha0 = ground.alpha0.alpha;
        let dim = params.dim();
        let mu = DenseMatrix::identity(dim).scale(C64::new(ground.chemical_potential, 0.0));
        let s = s_operator(params, alpha0);
        Ok(Self {
            dim,
            delta_h: mean_field_matrix(params, alpha0).sub(&mu),
            psi: ground.state.amplitudes().to_vec(),
            psi_conj: conjugate_state(&ground.state).into_amplitudes(),
            s_dag: s.adjoint(),
            s,
            delta_c: effective_detuning(params, ground.state.bunching()),
            kappa: params.kappa,
        })
    }

    /// Row vector `<v| A`.
    fn bra_times(v: &[C64], a: &DenseMatrix) -> Vec<C64> {
        let conj: Vec<C64> = v.iter().map(|z| z.conj()).collect();
        a.vecmat(&conj)
    }

    /// `X|u><w|Y / (dc + i kappa) + Y|u><w|X / (dc - i kappa)` with `X = S^dag`, `Y = S`.
    fn dyad_pair(&self, u: &[C64], w: &[C64]) -> DenseMatrix {
        let plus = 1.0 / C64::new(self.delta_c, self.kappa);
        let minus = 1.0 / C64::new(self.delta_c, -self.kappa);
        let first = outer_rows(&self.s_dag.matvec(u), &Self::bra_times(w, &self.s));
        let second = outer_rows(&self.s.matvec(u), &Self::bra_times(w, &self.s_dag));
        first.scale(plus).add(&second.scale(minus))
    }
}

/// `|u>(row)` with the row already conjugated: entries `u_i r_j`.
fn outer_rows(u: &[C64], row: &[C64]) -> DenseMatrix {
    DenseMatrix::from_fn(u.len(), row.len(), |i, j| u[i] * row[j])
}

fn neg(v: &[C64]) -> Vec<C64> {
    v.iter().map(|z| -z).collect()
}

fn column(v: &[C64]) -> DenseMatrix {
    DenseMatrix::from_fn(v.len(), 1, |i, _| v[i])
}

fn row(v: &[C64]) -> DenseMatrix {
    DenseMatrix::from_fn(1, v.len(), |_, j| v[j])
}

/// Full fluctuation matrix including cavity fluctuations; dimension `2 + 2 dim`.
pub fn build_m1(params: &ModelParams, ground: &GroundStateResult) -> Result<DenseMatrix> {
    let lin = Linearization::new(params, ground)?;
    let d = lin.dim;
    let mut m = DenseMatrix::zeros(2 + 2 * d, 2 + 2 * d);
    let (dc, kappa) = (lin.delta_c, lin.kappa);

    let mut corner = DenseMatrix::zeros(2, 2);
    corner[(0, 0)] = C64::new(-dc, -kappa);
    corner[(1, 1)] = C64::new(dc, -kappa);
    m.set_block(0, 0, &corner);

    let psi_s = Linearization::bra_times(&lin.psi, &lin.s);
    let psic_s = Linearization::bra_times(&lin.psi_conj, &lin.s);
    let psi_sd = Linearization::bra_times(&lin.psi, &lin.s_dag);
    let psic_sd = Linearization::bra_times(&lin.psi_conj, &lin.s_dag);
    m.set_block(0, 2, &row(&psi_s));
    m.set_block(0, 2 + d, &row(&psic_s));
    m.set_block(1, 2, &row(&neg(&psi_sd)));
    m.set_block(1, 2 + d, &row(&neg(&psic_sd)));

    m.set_block(2, 0, &column(&lin.s_dag.matvec(&lin.psi)));
    m.set_block(2, 1, &column(&lin.s.matvec(&lin.psi)));
    m.set_block(2 + d, 0, &column(&neg(&lin.s_dag.matvec(&lin.psi_conj))));
    m.set_block(2 + d, 1, &column(&neg(&lin.s.matvec(&lin.psi_conj))));

    m.set_block(2, 2, &lin.delta_h);
    m.set_block(2 + d, 2 + d, &lin.delta_h.scale(C64::new(-1.0, 0.0)));
    Ok(m)
}

/// Normal dyadic correction `S^dag|psi0><psi0|S/(dc+ik) + S|psi0><psi0|S^dag/(dc-ik)`.
pub fn normal_block(params: &ModelParams, ground: &GroundStateResult) -> Result<DenseMatrix> {
    let lin = Linearization::new(params, ground)?;
    Ok(lin.dyad_pair(&lin.psi, &lin.psi))
}

/// Anomalous dyadic correction `S^dag|psi0><psi0*|S/(dc+ik) + S|psi0><psi0*|S^dag/(dc-ik)`.
pub fn anomalous_block(params: &ModelParams, ground: &GroundStateResult) -> Result<DenseMatrix> {
    let lin = Linearization::new(params, ground)?;
    Ok(lin.dyad_pair(&lin.psi, &lin.psi_conj))
}

/// Fluctuation matrix with the cavity eliminated; dimension `2 dim`.
pub fn build_m2(params: &ModelParams, ground: &GroundStateResult) -> Result<DenseMatrix> {
    let lin = Linearization::new(params, ground)?;
    let d = lin.dim;
    let minus_one = C64::new(-1.0, 0.0);
    let mut m = DenseMatrix::zeros(2 * d, 2 * d);
    m.set_block(0, 0, &lin.delta_h.add(&lin.dyad_pair(&lin.psi, &lin.psi)));
    m.set_block(0, d, &lin.dyad_pair(&lin.psi, &lin.psi_conj));
    m.set_block(d, 0, &lin.dyad_pair(&lin.psi_conj, &lin.psi).scale(minus_one));
    m.set_block(
        d,
        d,
        &lin.delta_h
            .add(&lin.dyad_pair(&lin.psi_conj, &lin.psi_conj))
            .scale(minus_one),
    );
    Ok(m)
}

pub fn build_matrix(
    kind: MatrixKind,
    params: &ModelParams,
    ground: &GroundStateResult,
) -> Result<DenseMatrix> {
    match kind {
        MatrixKind::M1 => build_m1(params, ground),
        MatrixKind::M2 => build_m2(params, ground),
    }
}

/// Eigenvalue with the largest imaginary part; ties go to larger `|Re|`, then
/// to the lower index. Returns zero for an empty spectrum.
pub fn omega_crit(eigenvalues: &[C64]) -> C64 {
    let mut best: Option<C64> = None;
    for &w in eigenvalues {
        best = match best {
            None => Some(w),
            Some(b) if w.im > b.im || (w.im == b.im && w.re.abs() > b.re.abs()) => Some(w),
            keep => keep,
        };
    }
    best.unwrap_or(C64::new(0.0, 0.0))
}

pub fn classify(abs_theta: f64, unstable: bool) -> PhaseLabel {
    if unstable {
        PhaseLabel::Unstable
    } else if abs_theta < ORGANIZATION_THRESHOLD {
        PhaseLabel::US
    } else {
        PhaseLabel::OS
    }
}

/// Labels for `(M1, M2)` from precomputed reports.
pub fn classify_point(
    ground: &GroundStateResult,
    m1: &StabilityReport,
    m2: &StabilityReport,
) -> (PhaseLabel, PhaseLabel) {
    (
        classify(ground.abs_theta(), m1.unstable),
        classify(ground.abs_theta(), m2.unstable),
    )
}

pub fn report_from_spectrum(
    kind: MatrixKind,
    ground: &GroundStateResult,
    spectrum: &Spectrum,
) -> StabilityReport {
    let crit = omega_crit(&spectrum.eigenvalues);
    let unstable = crit.im > INSTABILITY_THRESHOLD;
    StabilityReport {
        matrix_kind: kind,
        eigenvalues: spectrum.eigenvalues.clone(),
        omega_crit: crit,
        im_omega_crit: crit.im,
        unstable,
        phase_label: classify(ground.abs_theta(), unstable),
        residual_max: spectrum.residual_max,
    }
}

/// Global phase direction `(0, 0, psi0, -psi0*)` for M1, `(psi0, -psi0*)` for M2.
pub fn phase_mode(kind: MatrixKind, ground: &GroundStateResult) -> Vec<C64> {
    let mut v = match kind {
        MatrixKind::M1 => vec![C64::new(0.0, 0.0); 2],
        MatrixKind::M2 => Vec::new(),
    };
    v.extend_from_slice(ground.state.amplitudes());
    v.extend(conjugate_state(&ground.state).amplitudes().iter().map(|z| -z));
    v
}

/// Spectrum of a fluctuation matrix. The phase mode is an exact null vector
/// of the linearization and sits in a Jordan block at organized states, so it
/// is deflated before the QR stage when it is null to within
/// [`PHASE_MODE_DEFLATION_TOL`].
pub fn fluctuation_spectrum(
    kind: MatrixKind,
    matrix: &DenseMatrix,
    ground: &GroundStateResult,
) -> Result<Spectrum> {
    let v = phase_mode(kind, ground);
    match eigen_spectrum_deflated(matrix, &v, PHASE_MODE_DEFLATION_TOL)? {
        Some(spectrum) => Ok(spectrum),
        None => eigen_spectrum(matrix),
    }
}

/// Builds and diagonalizes the requested fluctuation matrix.
pub fn analyze(
    kind: MatrixKind,
    params: &ModelParams,
    ground: &GroundStateResult,
) -> Result<StabilityReport> {
    let m = build_matrix(kind, params, ground)?;
    let spectrum = fluctuation_spectrum(kind, &m, ground)?;
    Ok(report_from_spectrum(kind, ground, &spectrum))
}

/// Pump strength above which the homogeneous state organizes:
/// `sqrt(((Delta_c - NU0/2)^2 + kappa^2) / (NU0 - 2 Delta_c))`.
pub fn critical_pump(params: &ModelParams) -> Result<f64> {
    let denominator = params.nu0 - 2.0 * params.delta_c_bare;
    if !(denominator > 0.0) {
        return Err(Error::NoThreshold { denominator });
    }
    let shift = params.delta_c_bare - 0.5 * params.nu0;
    Ok(((shift * shift + params.kappa * params.kappa) / denominator).sqrt())
}
