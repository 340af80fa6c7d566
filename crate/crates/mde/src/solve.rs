//! Public solver entry points: single-parameter solves with an independent
//! residual certificate, plus a model-level convenience wrapper.

use ensembles::{expectation_matrix, ASpec, CorrelationModel, KappaKernel};
use ndarray::Array2;
use numerics::C64;

use crate::engine::{ladder_solve, Engine};
use crate::{MdeError, Result};

/// Solver controls. `init` bypasses the continuation ladder and starts the
/// damped iteration at the target parameter from the given state (used for
/// basin-of-attraction probes); it forces the dense representation.
#[derive(Debug, Clone, Default)]
pub struct SolveOpts {
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub init: Option<Array2<C64>>,
}

impl SolveOpts {
    pub fn tol(&self) -> f64 {
        self.tol.unwrap_or(1e-10)
    }
    pub fn max_iter(&self) -> usize {
        self.max_iter.unwrap_or(10_000)
    }
}

/// A converged solution of `1 + (z − A + 𝒮[M])·M = 0` with `Im M ≻ 0`.
#[derive(Debug, Clone)]
pub struct MdeSolution {
    pub z: C64,
    pub m: Array2<C64>,
    /// Max-entry residual, re-verified on the dense matrix after the solve.
    pub residual: f64,
    pub iterations: usize,
    /// Smallest eigenvalue of `(M − M†)/2i`; positive on success.
    pub im_min: f64,
}

/// Max-entry norm of `Id + (z − A + 𝒮[M])·M`, computed densely from
/// scratch. This is the independent certificate applied to every solution.
pub fn residual_norm(
    a: Option<&Array2<f64>>,
    kernel: &KappaKernel,
    z: C64,
    m: &Array2<C64>,
) -> Result<f64> {
    let n = kernel.n();
    if m.shape() != [n, n] {
        return Err(MdeError::InvalidArgument(format!(
            "matrix is {:?}, kernel dimension is {n}",
            m.shape()
        )));
    }
    let mut b = kernel.apply_s(m)?;
    for i in 0..n {
        b[(i, i)] += z;
    }
    if let Some(a) = a {
        b.zip_mut_with(a, |bv, &av| *bv -= av);
    }
    let mut r = b.dot(m);
    for i in 0..n {
        r[(i, i)] += 1.0;
    }
    Ok(r.iter().map(|x| x.norm()).fold(0.0, f64::max))
}

/// Solves the fixed-point equation at `z` (upper half-plane) for the given
/// deformation and two-point kernel. Deterministic: no randomness enters
/// the iteration.
pub fn solve_mde(
    a: Option<&Array2<f64>>,
    kernel: &KappaKernel,
    z: C64,
    opts: &SolveOpts,
) -> Result<MdeSolution> {
    if !z.re.is_finite() || !z.im.is_finite() || z.im <= 0.0 {
        return Err(MdeError::InvalidArgument(format!(
            "spectral parameter must lie in the open upper half-plane, got {z}"
        )));
    }
    let engine = Engine::new(a, kernel, opts.init.is_some())?;
    let warm = match &opts.init {
        Some(m0) => {
            if m0.shape() != [engine.n, engine.n] {
                return Err(MdeError::InvalidArgument(format!(
                    "initialization is {:?}, kernel dimension is {}",
                    m0.shape(),
                    engine.n
                )));
            }
            Some(crate::engine::Rep::Dense(m0.clone()))
        }
        None => None,
    };
    // The loop aims at half the advertised tolerance so the independent
    // dense certificate below cannot flip a success by rounding order.
    let (rep, iterations) = ladder_solve(&engine, z, warm, opts.tol() * 0.5, opts.max_iter())?;
    let m = engine.to_dense(&rep);
    let residual = residual_norm(a, kernel, z, &m)?;
    if !residual.is_finite() || residual > opts.tol() {
        return Err(MdeError::NonConvergence {
            residual,
            iterations,
        });
    }
    let im_min = engine.im_min(&rep)?;
    if im_min <= 0.0 {
        return Err(MdeError::PositivityLoss { iterations });
    }
    Ok(MdeSolution {
        z,
        m,
        residual,
        iterations,
        im_min,
    })
}

/// Builds the kernel and deformation from a correlation model and solves.
pub fn solve_for_model(model: &CorrelationModel, z: C64, opts: &SolveOpts) -> Result<MdeSolution> {
    let kernel = KappaKernel::from_model(model)?;
    let a = match model.a_spec() {
        ASpec::Zero => None,
        _ => Some(expectation_matrix(model)?),
    };
    solve_mde(a.as_ref(), &kernel, z, opts)
}
