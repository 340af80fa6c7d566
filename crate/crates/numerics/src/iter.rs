//! Matrix-free iterative helpers: power iteration for spectral radii of
//! symmetric operators and conjugate gradients for Hermitian positive
//! definite solves. Operators are passed as closures so callers can exploit
//! structured kernels without materializing large matrices.

use crate::{rng, C64};
use ndarray::Array1;

/// Largest-magnitude eigenvalue of a real symmetric operator via power
/// iteration with a deterministic start vector. Returns the Rayleigh
/// quotient after `steps` iterations or earlier on relative stagnation
/// below `tol`.
pub fn power_iteration_sym<F>(dim: usize, steps: usize, tol: f64, seed: u64, apply: F) -> f64
where
    F: Fn(&Array1<f64>) -> Array1<f64>,
{
    let mut v = rng::unit_vector(&mut rng::stream(seed, 0), dim);
    let mut lambda = 0.0f64;
    for _ in 0..steps {
        let w = apply(&v);
        let norm = w.dot(&w).sqrt();
        if norm < 1e-300 {
            return 0.0;
        }
        let next = &w / norm;
        let new_lambda = next.dot(&apply(&next));
        let stalled = (new_lambda - lambda).abs() <= tol * new_lambda.abs().max(1e-300);
        v = next;
        lambda = new_lambda;
        if stalled {
            break;
        }
    }
    lambda
}

/// Largest eigenvalue of a Hermitian positive semidefinite complex operator
/// via power iteration.
pub fn power_iteration_herm<F>(dim: usize, steps: usize, tol: f64, seed: u64, apply: F) -> f64
where
    F: Fn(&Array1<C64>) -> Array1<C64>,
{
    let mut v = rng::complex_unit_vector(&mut rng::stream(seed, 0), dim);
    let mut lambda = 0.0f64;
    for _ in 0..steps {
        let w = apply(&v);
        let norm = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return 0.0;
        }
        let next = w.mapv(|x| x / norm);
        let applied = apply(&next);
        let new_lambda = next
            .iter()
            .zip(applied.iter())
            .map(|(a, b)| (a.conj() * b).re)
            .sum::<f64>();
        let stalled = (new_lambda - lambda).abs() <= tol * new_lambda.abs().max(1e-300);
        v = next;
        lambda = new_lambda;
        if stalled {
            break;
        }
    }
    lambda
}

/// Conjugate-gradient solve of `A x = b` for a Hermitian positive definite
/// complex operator given as a closure. Returns `None` when the residual
/// fails to reach `tol * |b|` within `max_iter` iterations.
pub fn cg_solve_herm<F>(
    apply: F,
    b: &Array1<C64>,
    tol: f64,
    max_iter: usize,
) -> Option<Array1<C64>>
where
    F: Fn(&Array1<C64>) -> Array1<C64>,
{
    let inner = |x: &Array1<C64>, y: &Array1<C64>| -> C64 {
        x.iter().zip(y.iter()).map(|(a, b)| a.conj() * b).sum()
    };
    let b_norm = inner(b, b).re.sqrt();
    if b_norm == 0.0 {
        return Some(Array1::zeros(b.len()));
    }
    let mut x = Array1::<C64>::zeros(b.len());
    let mut r = b.clone();
    let mut p = r.clone();
    let mut rs = inner(&r, &r).re;
    for _ in 0..max_iter {
        if rs.sqrt() <= tol * b_norm {
            return Some(x);
        }
        let ap = apply(&p);
        let denom = inner(&p, &ap).re;
        if denom <= 0.0 || !denom.is_finite() {
            return None;
        }
        let alpha = rs / denom;
        x = &x + &p.mapv(|v| v * alpha);
        r = &r - &ap.mapv(|v| v * alpha);
        let rs_new = inner(&r, &r).re;
        let beta = rs_new / rs;
        p = &r + &p.mapv(|v| v * beta);
        rs = rs_new;
    }
    if rs.sqrt() <= tol * b_norm {
        Some(x)
    } else {
        None
    }
}
