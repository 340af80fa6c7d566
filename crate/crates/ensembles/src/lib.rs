//! Correlated random-matrix ensembles: samplers, two-point cumulant
//! kernels, the self-energy superoperator they induce, metric neighborhood
//! systems, the covariance-preserving Ornstein–Uhlenbeck flow, and the
//! binary matrix file format shared by the workspace.
//!
//! Every model describes a Hermitian matrix `H = A + W/√N` whose noise part
//! `W` has zero mean, exact Hermitian symmetry, and entry covariances given
//! by a closed-form kernel `κ(α, β)` over index pairs `α = (a, b)`.

mod io;
mod kernel;
mod model;
mod neighborhood;
mod ou;
mod sample;

pub use io::{read_matrix, write_matrix, MatrixData};
pub use kernel::{apply_s_naive, two_point_cumulant, KappaKernel, KernelAction, Label};
pub use model::{
    a_norm_warning, expectation_matrix, ASpec, CorrelationModel, ModelKind, Symmetry,
    TwoPointBlock,
};
pub use neighborhood::{neighborhood_sets, pair_distance, NeighborhoodSystem, MU_EXPONENT};
pub use ou::{ou_evolve, OuFlow};
pub use sample::{sample_complex, sample_matrix, sample_real, MatrixSample};

/// Errors shared by ensemble construction, sampling, and kernel evaluation.
#[derive(Debug, thiserror::Error)]
pub enum EnsembleError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("config parse failure: {0}")]
    Parse(String),
    #[error("numerical backend failure: {0}")]
    Numerics(#[from] numerics::NumericsError),
}

pub type Result<T> = std::result::Result<T, EnsembleError>;
