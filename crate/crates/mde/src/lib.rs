//! Self-consistent resolvent approximation for correlated random-matrix
//! models: a damped fixed-point solver with a positivity constraint,
//! spectral-density profiles with support detection, and norm estimates for
//! the linearized stability operator.

mod artifacts;
mod density;
mod engine;
mod solve;
mod stability;

pub use artifacts::{write_density_csv, write_solution_files, SolutionMeta};
pub use density::{density_profile, support_estimate, DensityProfile, RHO_FLOOR};
pub use solve::{residual_norm, solve_for_model, solve_mde, MdeSolution, SolveOpts};
pub use stability::{stability_norm, stability_norm_dense, stability_norm_matrix_free};

use thiserror::Error;

/// Everything that can go wrong while solving or post-processing.
#[derive(Debug, Error)]
pub enum MdeError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no convergence: residual {residual:.3e} after {iterations} iterations")]
    NonConvergence { residual: f64, iterations: usize },
    #[error("imaginary part lost positivity at the damping floor after {iterations} iterations")]
    PositivityLoss { iterations: usize },
    #[error("stability operator is numerically singular")]
    SingularStability,
    #[error("density profile has empty support")]
    EmptySupport,
    #[error(transparent)]
    Numerics(#[from] numerics::NumericsError),
    #[error(transparent)]
    Ensemble(#[from] ensembles::EnsembleError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, MdeError>;
