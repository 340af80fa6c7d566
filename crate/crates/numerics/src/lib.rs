//! Shared numerical kernels for the random-matrix lab: dense symmetric /
//! Hermitian eigendecompositions and inverses (LAPACK-backed), circular
//! convolutions on the `[N] x [N]` torus (rustfft-backed), deterministic
//! counter-style RNG streams, and a few iterative helpers (power iteration,
//! conjugate gradients) for matrix-free operator-norm estimates.
//!
//! Everything downstream funnels its heavy linear algebra through this crate
//! so the BLAS linkage lives in exactly one place.

pub mod fft;
pub mod iter;
pub mod rng;

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, Inverse, UPLO};
use num_complex::Complex64;
use thiserror::Error;

/// Complex scalar used throughout the workspace.
pub type C64 = Complex64;

/// Errors surfaced by dense linear-algebra kernels.
#[derive(Debug, Error)]
pub enum NumericsError {
    /// LAPACK (or another backend routine) failed to converge or rejected its input.
    #[error("linear algebra backend error: {0}")]
    Backend(String),
    /// The input contained NaN or infinity.
    #[error("non-finite input entry at ({0}, {1})")]
    NonFinite(usize, usize),
    /// Matrix dimensions do not match the operation.
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
}

impl From<ndarray_linalg::error::LinalgError> for NumericsError {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        NumericsError::Backend(e.to_string())
    }
}

/// Result alias for this crate.
pub type Result<T> = std::result::Result<T, NumericsError>;

fn check_finite_f64(a: &Array2<f64>) -> Result<()> {
    if let Some(((i, j), _)) = a.indexed_iter().find(|(_, v)| !v.is_finite()) {
        return Err(NumericsError::NonFinite(i, j));
    }
    Ok(())
}

fn check_finite_c64(a: &Array2<C64>) -> Result<()> {
    if let Some(((i, j), _)) = a
        .indexed_iter()
        .find(|(_, v)| !v.re.is_finite() || !v.im.is_finite())
    {
        return Err(NumericsError::NonFinite(i, j));
    }
    Ok(())
}

/// Eigenvalues of a real symmetric matrix, ascending.
pub fn sym_eigenvalues(a: &Array2<f64>) -> Result<Array1<f64>> {
    check_finite_f64(a)?;
    use ndarray_linalg::EighInto;
    let (vals, _) = a.clone().eigh_into(UPLO::Lower)?;
    Ok(vals)
}

/// Full eigendecomposition of a real symmetric matrix: `(values, vectors)`
/// with eigenvalues ascending and eigenvectors in the columns.
pub fn sym_eigen(a: &Array2<f64>) -> Result<(Array1<f64>, Array2<f64>)> {
    check_finite_f64(a)?;
    let (vals, vecs) = a.eigh(UPLO::Lower)?;
    Ok((vals, vecs))
}

/// Eigenvalues of a complex Hermitian matrix, ascending.
pub fn herm_eigenvalues(a: &Array2<C64>) -> Result<Array1<f64>> {
    check_finite_c64(a)?;
    use ndarray_linalg::EighInto;
    let (vals, _) = a.clone().eigh_into(UPLO::Lower)?;
    Ok(vals)
}

/// Full eigendecomposition of a complex Hermitian matrix.
pub fn herm_eigen(a: &Array2<C64>) -> Result<(Array1<f64>, Array2<C64>)> {
    check_finite_c64(a)?;
    let (vals, vecs) = a.eigh(UPLO::Lower)?;
    Ok((vals, vecs))
}

/// Dense inverse of a general complex matrix (LU-based).
pub fn inv_complex(a: &Array2<C64>) -> Result<Array2<C64>> {
    check_finite_c64(a)?;
    Ok(a.inv()?)
}

/// Resolvent `(h - z)^{-1}` of a real symmetric matrix at a complex spectral
/// parameter, computed by LU inversion of the shifted matrix.
pub fn resolvent_real(h: &Array2<f64>, z: C64) -> Result<Array2<C64>> {
    let n = h.nrows();
    if h.ncols() != n {
        return Err(NumericsError::DimMismatch(format!(
            "resolvent needs a square matrix, got {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    let mut shifted = h.mapv(|x| C64::new(x, 0.0));
    for i in 0..n {
        shifted[(i, i)] -= z;
    }
    inv_complex(&shifted)
}

/// Resolvent `(h - z)^{-1}` of a complex Hermitian matrix.
pub fn resolvent_complex(h: &Array2<C64>, z: C64) -> Result<Array2<C64>> {
    let n = h.nrows();
    if h.ncols() != n {
        return Err(NumericsError::DimMismatch(format!(
            "resolvent needs a square matrix, got {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    let mut shifted = h.clone();
    for i in 0..n {
        shifted[(i, i)] -= z;
    }
    inv_complex(&shifted)
}

/// Resolvent from a precomputed spectral factorization `h = Q diag(vals) Q^T`:
/// `G(z) = Q diag(1/(vals - z)) Q^T`. Returns the full dense matrix; reuses
/// one factorization across many spectral parameters.
pub fn resolvent_from_eigen(
    vals: &Array1<f64>,
    vecs: &Array2<f64>,
    z: C64,
) -> Array2<C64> {
    // Split into two real GEMMs: G = Q D_re Q^T + i Q D_im Q^T, where the
    // column scaling costs O(N^2) and each product is BLAS dgemm.
    let n = vals.len();
    let mut scaled_re = vecs.clone();
    let mut scaled_im = vecs.clone();
    for k in 0..n {
        let d = 1.0 / (C64::new(vals[k], 0.0) - z);
        let mut col_re = scaled_re.column_mut(k);
        col_re *= d.re;
        let mut col_im = scaled_im.column_mut(k);
        col_im *= d.im;
    }
    let g_re = scaled_re.dot(&vecs.t());
    let g_im = scaled_im.dot(&vecs.t());
    let mut g = Array2::<C64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = C64::new(g_re[(i, j)], g_im[(i, j)]);
        }
    }
    g
}

/// `G y` from a spectral factorization without forming `G`: costs `O(N^2)`.
pub fn resolvent_apply(
    vals: &Array1<f64>,
    vecs: &Array2<f64>,
    z: C64,
    y: &Array1<C64>,
) -> Array1<C64> {
    let n = vals.len();
    let y_re = y.mapv(|v| v.re);
    let y_im = y.mapv(|v| v.im);
    let c_re = vecs.t().dot(&y_re);
    let c_im = vecs.t().dot(&y_im);
    let mut d_re = Array1::<f64>::zeros(n);
    let mut d_im = Array1::<f64>::zeros(n);
    for k in 0..n {
        let d = 1.0 / (C64::new(vals[k], 0.0) - z);
        let c = C64::new(c_re[k], c_im[k]);
        let dc = d * c;
        d_re[k] = dc.re;
        d_im[k] = dc.im;
    }
    let out_re = vecs.dot(&d_re);
    let out_im = vecs.dot(&d_im);
    Array1::from_iter((0..n).map(|i| C64::new(out_re[i], out_im[i])))
}

/// Hilbert-Schmidt (Frobenius) norm of a complex matrix.
pub fn hs_norm(a: &Array2<C64>) -> f64 {
    a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Operator (spectral) norm of a complex matrix via Hermitian eigenvalues of
/// `A^* A`; intended for small and medium matrices.
pub fn op_norm(a: &Array2<C64>) -> Result<f64> {
    let ah = conj_transpose(a);
    let gram = ah.dot(a);
    let vals = herm_eigenvalues(&gram)?;
    Ok(vals.iter().fold(0.0f64, |m, &v| m.max(v.max(0.0))).sqrt())
}

/// Operator norm of a real matrix via `A^T A`.
pub fn op_norm_real(a: &Array2<f64>) -> Result<f64> {
    let gram = a.t().dot(a);
    let vals = sym_eigenvalues(&gram)?;
    Ok(vals.iter().fold(0.0f64, |m, &v| m.max(v.max(0.0))).sqrt())
}

/// Conjugate transpose.
pub fn conj_transpose(a: &Array2<C64>) -> Array2<C64> {
    a.t().mapv(|v| v.conj())
}

/// Maximum absolute deviation from Hermitian symmetry, `max |A - A^*|`.
pub fn hermiticity_defect(a: &Array2<C64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let d = (a[(i, j)] - a[(j, i)].conj()).norm();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn sym_eigen_matches_hand_computed_2x2() {
        // [[2, 1], [1, 2]] has eigenvalues 1 and 3.
        let a = array![[2.0, 1.0], [1.0, 2.0]];
        let vals = sym_eigenvalues(&a).unwrap();
        assert_abs_diff_eq!(vals[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(vals[1], 3.0, epsilon = 1e-12);
        let (vals2, vecs) = sym_eigen(&a).unwrap();
        let recon = vecs.dot(&Array2::from_diag(&vals2)).dot(&vecs.t());
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!(recon[(i, j)], a[(i, j)], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn resolvent_inverts_shift() {
        let h = array![[0.0, 1.0], [1.0, 0.0]];
        let z = C64::new(0.3, 0.7);
        let g = resolvent_real(&h, z).unwrap();
        // (H - z) G == Id
        let mut hz = h.mapv(|x| C64::new(x, 0.0));
        hz[(0, 0)] -= z;
        hz[(1, 1)] -= z;
        let prod = hz.dot(&g);
        assert!((prod[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-13);
        assert!((prod[(1, 0)]).norm() < 1e-13);
    }

    #[test]
    fn resolvent_from_eigen_agrees_with_lu() {
        let h = array![
            [1.0, 0.5, 0.0],
            [0.5, -0.2, 0.3],
            [0.0, 0.3, 0.8]
        ];
        let z = C64::new(0.1, 0.5);
        let g_lu = resolvent_real(&h, z).unwrap();
        let (vals, vecs) = sym_eigen(&h).unwrap();
        let g_eig = resolvent_from_eigen(&vals, &vecs, z);
        for i in 0..3 {
            for j in 0..3 {
                assert!((g_lu[(i, j)] - g_eig[(i, j)]).norm() < 1e-12);
            }
        }
        let y = Array1::from_iter((0..3).map(|i| C64::new(i as f64, 1.0)));
        let gy = resolvent_apply(&vals, &vecs, z, &y);
        let gy_dense = g_lu.dot(&y);
        for i in 0..3 {
            assert!((gy[i] - gy_dense[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn op_norm_of_diagonal_is_max_abs() {
        let a = array![
            [C64::new(-3.0, 0.0), C64::new(0.0, 0.0)],
            [C64::new(0.0, 0.0), C64::new(2.0, 0.0)]
        ];
        assert_abs_diff_eq!(op_norm(&a).unwrap(), 3.0, epsilon = 1e-12);
    }
}
