//! Numerical audit of the structural hypotheses behind the correlated
//! ensembles: two-point kernel norms in both the averaged and isotropic
//! senses, delta-supported third- and fourth-order norms, flatness and
//! fullness of the induced self-energy, and the complex-class norms that
//! split every entry into real and imaginary parts.
//!
//! All estimators are deterministic: randomized probe sets are drawn from
//! seeded streams, and every probe evaluation is independent of the others,
//! so probe loops may be reordered or parallelized without changing the
//! reported values.

mod flatness;
mod fullness;
mod higher;
mod norms;
mod probes;
mod report;
mod tilde;

pub use flatness::{flatness_bounds, FlatnessReport, FLATNESS_ZERO_TOLERANCE};
pub use fullness::fullness_lower_bound;
pub use higher::{fourth_order_av, third_order_norms, ThirdOrderNorms};
pub use norms::{iso_part_norm, kappa_norm_av2, kappa_norm_iso2, IsoSplitNorms, IsoWiring, SplitPart};
pub use probes::ProbeSet;
pub use report::{audit_model, hypothesis_checks, CheckStatus, HypothesisCheck, NormReport};
pub use tilde::{hermitian_tilde_norms, TildeNorms};

/// Errors reported by the audit estimators.
#[derive(Debug, thiserror::Error)]
pub enum AuditError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("ensemble failure: {0}")]
    Ensemble(#[from] ensembles::EnsembleError),
    #[error("numerical backend failure: {0}")]
    Numerics(#[from] numerics::NumericsError),
}

pub type Result<T> = std::result::Result<T, AuditError>;
