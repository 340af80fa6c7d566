//! Pointwise expansion kernels on finite discrete distributions.
//!
//! For a random variable `X` and companions `Y₁, …, Yₘ`, the kernel
//! `K(X; Y)` is a random variable whose expectation is the joint cumulant
//! `κ(X, Y)`. This crate evaluates it exactly on finite-atom distributions,
//! checks the decoupling identity that controls how the kernel splits over
//! independent variable groups, and verifies the truncated expansion of
//! `E[w_{i0} f(w)]` into cumulant and kernel terms — including the Hölder
//! remainder bound when the truncation order is below the polynomial degree.

mod decouple;
mod expansion;
mod poly;
mod precum;

pub use decouple::{decoupling_correction, decoupling_residual};
pub use expansion::{
    expansion_identity_check, remainder_bound_check, ExpansionCheck, RemainderCheck,
    MAX_REMAINDER_ORDER,
};
pub use poly::Polynomial;
pub use precum::{precumulant_eval, PrecumulantEvaluation, MAX_COMPANIONS};

/// Errors shared by the operations of this crate.
#[derive(Debug, thiserror::Error)]
pub enum PrecumulantError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("complexity limit exceeded: {0}")]
    ComplexityLimit(String),
    #[error(
        "polynomial degree {degree} is not below the truncation order {order}; \
         the remainder does not vanish — use the remainder-bound path"
    )]
    RemainderNotZero { degree: usize, order: usize },
    #[error(transparent)]
    Cumulant(#[from] cumulants::CumulantError),
}

pub type Result<T> = std::result::Result<T, PrecumulantError>;

pub(crate) fn kahan_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}
