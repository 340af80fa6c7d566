//! Lower bound on the entry covariance against the full Gaussian ensembles.
//!
//! A field dominates a full Gaussian ensemble of strength λ exactly when
//! `E |Tr(B W)|² ≥ λ Tr B²` for every deterministic matrix `B` in the same
//! symmetry class.  Expanding `B` over an orthonormal basis of that class
//! turns the left side into a quadratic form; the best constant λ is the
//! smallest eigenvalue of its coefficient matrix, reported here.

use crate::tilde::ComplexPattern;
use crate::{AuditError, Result};
use ensembles::{CorrelationModel, KappaKernel, Symmetry};
use ndarray::Array2;

/// Largest dimension for which the covariance eigenproblem is assembled.
const MAX_FULLNESS_DIM: usize = 64;

/// Smallest eigenvalue of the entry covariance in an orthonormal basis of
/// the model's symmetry class; zero (up to roundoff) means some matrix
/// direction carries no noise at all.
pub fn fullness_lower_bound(model: &CorrelationModel) -> Result<f64> {
    let n = model.n();
    if n > MAX_FULLNESS_DIM {
        return Err(AuditError::InvalidArgument(format!(
            "the covariance eigenproblem is assembled densely and supports dimensions up to {MAX_FULLNESS_DIM}, got {n}"
        )));
    }
    match model.symmetry() {
        Symmetry::RealSymmetric => {
            let kernel = KappaKernel::from_model(model)?;
            // Orthonormal symmetric basis: diagonal units, then symmetrized
            // off-diagonal pairs scaled by √2.  The coefficient of basis
            // elements I, J in E|Tr(B W)|² is s_I s_J κ₂(α_I, α_J).
            let mut basis: Vec<(usize, usize, f64)> = Vec::new();
            for a in 0..n {
                basis.push((a, a, 1.0));
            }
            for a in 0..n {
                for b in (a + 1)..n {
                    basis.push((a, b, std::f64::consts::SQRT_2));
                }
            }
            let dim = basis.len();
            let mut q = Array2::<f64>::zeros((dim, dim));
            for (i, &(ai, bi, si)) in basis.iter().enumerate() {
                for (j, &(aj, bj, sj)) in basis.iter().enumerate().skip(i) {
                    let v = si * sj * kernel.kappa2((ai, bi), (aj, bj));
                    q[(i, j)] = v;
                    q[(j, i)] = v;
                }
            }
            let vals = numerics::sym_eigenvalues(&q)?;
            Ok(vals.first().copied().unwrap_or(0.0))
        }
        Symmetry::ComplexHermitian => {
            let pattern = ComplexPattern::from_model(model)?;
            // Orthonormal Hermitian basis: diagonal units, symmetrized real
            // pairs, and antisymmetrized imaginary pairs.  Tr(B W) has
            // coordinates (w_aa, √2 Re w_ab, √2 Im w_ab) in this basis.
            #[derive(Clone, Copy, PartialEq)]
            enum Comp {
                Re,
                Im,
            }
            let mut basis: Vec<(usize, usize, Comp, f64)> = Vec::new();
            for a in 0..n {
                basis.push((a, a, Comp::Re, 1.0));
            }
            for a in 0..n {
                for b in (a + 1)..n {
                    basis.push((a, b, Comp::Re, std::f64::consts::SQRT_2));
                    basis.push((a, b, Comp::Im, std::f64::consts::SQRT_2));
                }
            }
            let dim = basis.len();
            let mut q = Array2::<f64>::zeros((dim, dim));
            for (i, &(ai, bi, ci, si)) in basis.iter().enumerate() {
                for (j, &(aj, bj, cj, sj)) in basis.iter().enumerate().skip(i) {
                    let (direct, cross) = pattern.raw((ai, bi), (aj, bj));
                    let block = match (ci, cj) {
                        (Comp::Re, Comp::Re) => 0.5 * (direct + cross),
                        (Comp::Im, Comp::Im) => 0.5 * (direct - cross),
                        _ => 0.0,
                    };
                    let v = si * sj * block;
                    q[(i, j)] = v;
                    q[(j, i)] = v;
                }
            }
            let vals = numerics::sym_eigenvalues(&q)?;
            Ok(vals.first().copied().unwrap_or(0.0))
        }
    }
}
