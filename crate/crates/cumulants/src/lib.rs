//! Exact combinatorics of moments and cumulants on finite discrete
//! distributions.
//!
//! The crate provides set partitions of small ground sets, the Möbius weight
//! attached to a partition, joint cumulants of a finite-atom distribution,
//! the inverse map from a cumulant table back to raw moments, a plug-in
//! empirical cumulant estimator, and Wick (Appell) polynomial identities.
//! Everything is evaluated exactly over the atoms of the distribution, so the
//! results serve as trusted oracles for the stochastic machinery built on top.

mod cumulant;
mod dist;
mod empirical;
mod partition;
mod wick;

pub use cumulant::{
    cumulant_from_moments, joint_cumulant, moments_from_cumulants, CumulantTable,
    MAX_CUMULANT_INDICES,
};
pub use dist::{Atom, JointDistribution};
pub use empirical::{empirical_cumulant, EmpiricalCumulant};
pub use partition::{mobius_to_top, partitions_of, visit_partitions, Partition, MAX_PARTITION_N};
pub use wick::{wick_expectation_check, wick_polynomial_at, WickReport};

/// Errors shared by all operations in this crate.
#[derive(Debug, thiserror::Error)]
pub enum CumulantError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("complexity limit exceeded: {0}")]
    ComplexityLimit(String),
    #[error("cumulant table is missing an entry for {0:?}")]
    IncompleteTable(Vec<usize>),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
}

pub type Result<T> = std::result::Result<T, CumulantError>;

/// Compensated (Kahan) summation; keeps long accumulations accurate to a few
/// ulps independent of length, which the 1e-12 exactness contracts rely on.
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
