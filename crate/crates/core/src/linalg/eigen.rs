//! Dense non-Hermitian eigendecomposition.
//!
//! The matrix is reduced to upper Hessenberg form with Householder
//! reflections, then to complex Schur form `A = Z T Z^H` with single-shift QR
//! sweeps (Wilkinson shifts, Givens rotations, explicit deflation). Eigenvectors
//! come from back substitution on the triangular factor.

use num_complex::Complex64 as C64;

use super::{vec_norm, DenseMatrix};
use crate::error::{Error, Result};

/// Iteration budget per eigenvalue before reporting `NoConvergence`.
pub const MAX_QR_SWEEPS_PER_EIGENVALUE: usize = 60;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Eigenpairs of a dense complex matrix.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<C64>,
    /// Unit-norm right eigenvectors, one per eigenvalue.
    pub eigenvectors: Vec<Vec<C64>>,
    /// `max_k ||A v_k - w_k v_k|| / ||A||_F`.
    pub residual_max: f64,
}

pub fn eigen_spectrum(matrix: &DenseMatrix) -> Result<Spectrum> {
    assert!(matrix.is_square(), "eigen_spectrum needs a square matrix");
    let n = matrix.rows();
    if n == 0 {
        return Ok(Spectrum {
            eigenvalues: Vec::new(),
            eigenvectors: Vec::new(),
            residual_max: 0.0,
        });
    }

    let mut t = matrix.clone();
    let mut z = DenseMatrix::identity(n);
    hessenberg_reduce(&mut t, &mut z);
    schur_qr(&mut t, &mut z)?;

    let eigenvalues: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
    let tri_vectors = triangular_eigenvectors(&t);
    let mut eigenvectors = Vec::with_capacity(n);
    for y in &tri_vectors {
        let mut v = z.matvec(y);
        let nrm = vec_norm(&v);
        if nrm > 0.0 {
            v.iter_mut().for_each(|x| *x /= nrm);
        }
        eigenvectors.push(v);
    }

    let scale = matrix.frobenius_norm().max(f64::MIN_POSITIVE);
    let residual_max = eigenvalues
        .iter()
        .zip(&eigenvectors)
        .map(|(w, v)| {
            let av = matrix.matvec(v);
            let r: Vec<C64> = av.iter().zip(v).map(|(a, x)| a - w * x).collect();
            vec_norm(&r) / scale
        })
        .fold(0.0, f64::max);

    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
        residual_max,
    })
}

/// Eigendecomposition of `matrix` with a known (approximate) null vector
/// `null` removed exactly before the QR stage.
///
/// With a unitary reflector `P` mapping `null` onto `e1`, `P A P` has first
/// column `P A null`, which is set to zero; the remaining block is solved with
/// [`eigen_spectrum`]. This keeps a defective zero eigenvalue from splitting by
/// `sqrt(eps ||A||)`. Returns `None` when `||A null|| > tol ||A||_F`. Residuals
/// are measured against the original matrix.
pub fn eigen_spectrum_deflated(matrix: &DenseMatrix, null: &[C64], tol: f64) -> Result<Option<Spectrum>> {
    assert!(matrix.is_square(), "eigen_spectrum_deflated needs a square matrix");
    let n = matrix.rows();
    assert_eq!(null.len(), n, "null vector has the wrong length");
    let v_norm = vec_norm(null);
    let scale = matrix.frobenius_norm().max(f64::MIN_POSITIVE);
    if n < 2 || v_norm == 0.0 {
        return Ok(None);
    }
    let v: Vec<C64> = null.iter().map(|x| x / v_norm).collect();
    if vec_norm(&matrix.matvec(&v)) > tol * scale {
        return Ok(None);
    }

    // P = I - 2 w w^H / (w^H w), w = v - beta e1, P v = beta e1
    let beta = -unit_phase(v[0]);
    let mut w = v.clone();
    w[0] -= beta;
    let ww: f64 = w.iter().map(|x| x.norm_sqr()).sum();
    let reflect = |x: &[C64]| -> Vec<C64> {
        let proj = super::inner(&w, x) * (2.0 / ww);
        x.iter().zip(&w).map(|(xi, wi)| xi - wi * proj).collect()
    };
    let p = DenseMatrix::from_fn(n, n, |i, j| {
        let delta = if i == j { C64::new(1.0, 0.0) } else { ZERO };
        delta - w[i] * w[j].conj() * (2.0 / ww)
    });
    let b = p.matmul(matrix).matmul(&p);
    let first_row: Vec<C64> = b.row(0)[1..].to_vec();
    let inner = b.block(1, 1, n - 1, n - 1);
    let sub = eigen_spectrum(&inner)?;

    let tiny = f64::EPSILON * scale;
    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = Vec::with_capacity(n);
    let mut e1 = vec![ZERO; n];
    e1[0] = C64::new(1.0, 0.0);
    eigenvalues.push(ZERO);
    eigenvectors.push(v.clone());
    for (lambda, y) in sub.eigenvalues.iter().zip(&sub.eigenvectors) {
        let coupling: C64 = first_row.iter().zip(y).map(|(r, yi)| r * yi).sum();
        let mut x = if lambda.norm() <= tiny {
            e1.clone()
        } else {
            let mut x = Vec::with_capacity(n);
            x.push(coupling / lambda);
            x.extend_from_slice(y);
            x
        };
        let nrm = vec_norm(&x);
        x.iter_mut().for_each(|xi| *xi /= nrm);
        let mut x = reflect(&x);
        let nrm = vec_norm(&x);
        x.iter_mut().for_each(|xi| *xi /= nrm);
        eigenvalues.push(*lambda);
        eigenvectors.push(x);
    }
    let residual_max = eigenvalues
        .iter()
        .zip(&eigenvectors)
        .map(|(lambda, x)| {
            let ax = matrix.matvec(x);
            let r: Vec<C64> = ax.iter().zip(x).map(|(a, xi)| a - lambda * xi).collect();
            vec_norm(&r) / scale
        })
        .fold(0.0, f64::max);
    Ok(Some(Spectrum {
        eigenvalues,
        eigenvectors,
        residual_max,
    }))
}

/// In-place Householder reduction `A <- P A P`, accumulating `Z <- Z P`.
fn hessenberg_reduce(a: &mut DenseMatrix, z: &mut DenseMatrix) {
    let n = a.rows();
    if n < 3 {
        return;
    }
    let mut u = vec![ZERO; n];
    for k in 0..n - 2 {
        let x_norm = (k + 1..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        if x_norm == 0.0 {
            continue;
        }
        let phase = unit_phase(a[(k + 1, k)]);
        // u = x + phase*|x| e1, reflector P = I - 2 u u^H / (u^H u)
        for i in 0..n {
            u[i] = if i > k { a[(i, k)] } else { ZERO };
        }
        u[k + 1] += phase * x_norm;
        let uu: f64 = u[k + 1..].iter().map(|v| v.norm_sqr()).sum();
        if uu == 0.0 {
            continue;
        }
        let beta = 2.0 / uu;

        // left: A <- A - beta u (u^H A)
        for j in 0..n {
            let mut s = ZERO;
            for i in k + 1..n {
                s += u[i].conj() * a[(i, j)];
            }
            s *= beta;
            if s != ZERO {
                for i in k + 1..n {
                    a[(i, j)] -= u[i] * s;
                }
            }
        }
        // right: A <- A - beta (A u) u^H, and the same for Z
        for m in [&mut *a, &mut *z] {
            for i in 0..n {
                let mut s = ZERO;
                for j in k + 1..n {
                    s += m[(i, j)] * u[j];
                }
                s *= beta;
                if s != ZERO {
                    for j in k + 1..n {
                        m[(i, j)] -= s * u[j].conj();
                    }
                }
            }
        }
        for i in k + 2..n {
            a[(i, k)] = ZERO;
        }
    }
}

/// `z / |z|` (1 for zero), computed on a rescaled copy so subnormal inputs
/// still give a unit-modulus result.
fn unit_phase(z: C64) -> C64 {
    let m = z.re.abs().max(z.im.abs());
    if m == 0.0 {
        return C64::new(1.0, 0.0);
    }
    let w = z / m;
    w / w.norm()
}

#[derive(Clone, Copy)]
struct Givens {
    c: f64,
    s: C64,
}

impl Givens {
    /// Rotation with `[c s; -conj(s) c] [a; b] = [r; 0]`.
    fn zeroing(a: C64, b: C64) -> Self {
        let na = a.norm();
        let nb = b.norm();
        if nb == 0.0 {
            return Self {
                c: 1.0,
                s: ZERO,
            };
        }
        if na == 0.0 {
            return Self {
                c: 0.0,
                s: C64::new(1.0, 0.0),
            };
        }
        let rho = na.hypot(nb);
        Self {
            c: na / rho,
            s: unit_phase(a) * (b.conj() / rho),
        }
    }

    /// Rows `k, k+1` of `m`, columns `cols`.
    fn apply_left(&self, m: &mut DenseMatrix, k: usize, cols: std::ops::Range<usize>) {
        for j in cols {
            let x = m[(k, j)];
            let y = m[(k + 1, j)];
            m[(k, j)] = x * self.c + self.s * y;
            m[(k + 1, j)] = -self.s.conj() * x + y * self.c;
        }
    }

    /// Columns `k, k+1` of `m` times `G^H`, rows `rows`.
    fn apply_right_adjoint(&self, m: &mut DenseMatrix, k: usize, rows: std::ops::Range<usize>) {
        for i in rows {
            let x = m[(i, k)];
            let y = m[(i, k + 1)];
            m[(i, k)] = x * self.c + y * self.s.conj();
            m[(i, k + 1)] = -x * self.s + y * self.c;
        }
    }
}

/// Eigenvalue of the 2x2 block `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half_tr = (a + d) * 0.5;
    let disc = ((a - d) * 0.5).powi(2) + b * c;
    let root = disc.sqrt();
    let l1 = half_tr + root;
    let l2 = half_tr - root;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

fn schur_qr(h: &mut DenseMatrix, z: &mut DenseMatrix) -> Result<()> {
    let n = h.rows();
    let eps = f64::EPSILON;
    let norm = h.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    let budget = MAX_QR_SWEEPS_PER_EIGENVALUE * n;
    let mut rotations: Vec<Givens> = Vec::with_capacity(n);

    while hi > 0 {
        // locate the start of the unreduced block ending at `hi`
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            if diag == 0.0 {
                diag = norm;
            }
            if sub <= eps * diag {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }

        iter += 1;
        total += 1;
        if total > budget {
            return Err(Error::NoConvergence { iterations: total });
        }

        let shift = if iter % 11 == 0 {
            // exceptional shift to break cycles
            let e = h[(hi, hi - 1)].re.abs()
                + if hi >= 2 { h[(hi - 1, hi - 2)].re.abs() } else { 0.0 };
            h[(hi, hi)] + C64::new(e, 0.0)
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };

        for i in lo..=hi {
            h[(i, i)] -= shift;
        }
        rotations.clear();
        for k in lo..hi {
            let g = Givens::zeroing(h[(k, k)], h[(k + 1, k)]);
            g.apply_left(h, k, k..n);
            h[(k + 1, k)] = ZERO;
            rotations.push(g);
        }
        for (offset, g) in rotations.iter().enumerate() {
            let k = lo + offset;
            g.apply_right_adjoint(h, k, 0..(k + 2).min(hi + 1));
            g.apply_right_adjoint(z, k, 0..n);
        }
        for i in lo..=hi {
            h[(i, i)] += shift;
        }
    }

    // clean the strictly lower part
    for i in 1..n {
        for j in 0..i {
            h[(i, j)] = ZERO;
        }
    }
    Ok(())
}

/// Right eigenvectors of an upper-triangular matrix by back substitution.
fn triangular_eigenvectors(t: &DenseMatrix) -> Vec<Vec<C64>> {
    let n = t.rows();
    let small = f64::EPSILON * t.frobenius_norm().max(f64::MIN_POSITIVE);
    (0..n)
        .map(|k| {
            let lambda = t[(k, k)];
            let mut y = vec![ZERO; n];
            y[k] = C64::new(1.0, 0.0);
            for j in (0..k).rev() {
                let mut s = ZERO;
                for m in j + 1..=k {
                    s += t[(j, m)] * y[m];
                }
                let mut d = t[(j, j)] - lambda;
                if d.norm() < small {
                    d = C64::new(small, 0.0);
                }
                y[j] = -s / d;
            }
            y
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(n: usize, seed: u64) -> DenseMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DenseMatrix::from_fn(n, n, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    #[test]
    fn diagonal_matrix_returns_diagonal() {
        let diag: Vec<C64> = (0..6).map(|k| C64::new(k as f64 - 2.5, 0.3 * k as f64)).collect();
        let spec = eigen_spectrum(&DenseMatrix::from_diagonal(&diag)).unwrap();
        for d in &diag {
            assert!(spec.eigenvalues.iter().any(|w| (w - d).norm() < 1e-14));
        }
        assert!(spec.residual_max < 1e-14);
    }

    #[test]
    fn rotation_generator_has_imaginary_pair() {
        let m = DenseMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => C64::new(1.0, 0.0),
            (1, 0) => C64::new(-1.0, 0.0),
            _ => ZERO,
        });
        let spec = eigen_spectrum(&m).unwrap();
        let mut ims: Vec<f64> = spec.eigenvalues.iter().map(|w| w.im).collect();
        ims.sort_by(f64::total_cmp);
        assert!((ims[0] + 1.0).abs() < 1e-14 && (ims[1] - 1.0).abs() < 1e-14);
        assert!(spec.eigenvalues.iter().all(|w| w.re.abs() < 1e-14));
    }

    #[test]
    fn random_matrix_trace_and_residuals() {
        let m = random_matrix(84, 7);
        let spec = eigen_spectrum(&m).unwrap();
        let sum: C64 = spec.eigenvalues.iter().sum();
        assert!((sum - m.trace()).norm() < 1e-10, "{sum} vs {}", m.trace());
        assert!(spec.residual_max <= 1e-10, "{}", spec.residual_max);
    }

    #[test]
    fn jordan_block_is_handled() {
        let m = DenseMatrix::from_fn(3, 3, |i, j| {
            if i == j {
                C64::new(2.0, 0.0)
            } else if j == i + 1 {
                C64::new(1.0, 0.0)
            } else {
                ZERO
            }
        });
        let spec = eigen_spectrum(&m).unwrap();
        assert!(spec.eigenvalues.iter().all(|w| (w - 2.0).norm() < 1e-5));
        assert!(spec.residual_max < 1e-10);
    }

    #[test]
    fn subnormal_entries_keep_the_reduction_exact() {
        let mut m = random_matrix(12, 3);
        for i in 2..12 {
            m[(i, 0)] = C64::new(3e-310, -1e-311);
        }
        let s = eigen_spectrum(&m).unwrap();
        assert!(s.residual_max < 1e-13, "{}", s.residual_max);
        assert!((unit_phase(C64::new(5e-324, 5e-324)).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn deflation_keeps_a_defective_zero_pair_tight() {
        // unitary similarity of a triangular matrix with a defective zero pair
        let n = 10;
        let q = random_matrix(n, 11);
        let mut t = random_matrix(n, 12);
        for i in 0..n {
            for j in 0..i {
                t[(i, j)] = ZERO;
            }
        }
        t[(0, 0)] = ZERO;
        t[(1, 1)] = ZERO;
        t[(0, 1)] = C64::new(50.0, 0.0);
        for i in 2..n {
            t[(i, i)] += C64::new(3.0 + i as f64, 0.0);
        }
        let h = q.add(&q.adjoint());
        let u = DenseMatrix::from_fn(n, n, |i, j| eigen_spectrum(&h).unwrap().eigenvectors[j][i]);
        let a = u.matmul(&t).matmul(&u.adjoint());
        let null: Vec<C64> = (0..n).map(|i| u[(i, 0)]).collect();
        let plain = eigen_spectrum(&a).unwrap();
        let deflated = eigen_spectrum_deflated(&a, &null, 1e-10).unwrap().unwrap();
        let smallest = |s: &Spectrum| {
            let mut m: Vec<f64> = s.eigenvalues.iter().map(|w| w.norm()).collect();
            m.sort_by(f64::total_cmp);
            m[1]
        };
        assert!(smallest(&deflated) < 1e-11, "{}", smallest(&deflated));
        assert!(smallest(&deflated) <= smallest(&plain));
        assert!(deflated.residual_max < 1e-12);
        let tr: C64 = deflated.eigenvalues.iter().sum();
        assert!((tr - a.trace()).norm() < 1e-10);
        // a vector that is not null is refused
        let mut bad = null.clone();
        bad[1] += C64::new(0.5, 0.0);
        assert!(eigen_spectrum_deflated(&a, &bad, 1e-10).unwrap().is_none());
    }

    #[test]
    fn empty_and_scalar() {
        assert!(eigen_spectrum(&DenseMatrix::zeros(0, 0)).unwrap().eigenvalues.is_empty());
        let s = eigen_spectrum(&DenseMatrix::from_diagonal(&[C64::new(3.0, -1.0)])).unwrap();
        assert_eq!(s.eigenvalues, vec![C64::new(3.0, -1.0)]);
    }
}
