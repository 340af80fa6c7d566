//! Two-point norms for the complex Hermitian class.
//!
//! A complex entry field is described by the covariances of its real and
//! imaginary parts.  For every ordered label pair the four real numbers
//! `E[X w_α · Y w_β]` with `X, Y ∈ {Re, Im}` form a 2×2 block; the averaged
//! and isotropic norms are evaluated blockwise and summed over the four
//! (X, Y) assignments.

use crate::norms::{iso_part_norm, IsoWiring, SplitPart};
use crate::probes::ProbeSet;
use crate::{AuditError, Result};
use ensembles::{CorrelationModel, KappaKernel, KernelAction, Label, ModelKind, Symmetry};
use ndarray::Array2;
use serde::{Deserialize, Serialize};

/// Largest dimension for which the dense blockwise norms are evaluated.
const MAX_TILDE_DIM: usize = 32;

/// Raw two-point pattern of a complex model: for each ordered label pair,
/// the coefficient of an aligned copy (`direct`) and of a transposed copy
/// (`cross`), without any overlap deduplication.  The real/imaginary block
/// of the pair is then
/// `[[(direct+cross)/2, 0], [0, (direct−cross)/2]]`.
pub(crate) struct ComplexPattern {
    n: usize,
    kind: PatternKind,
}

enum PatternKind {
    /// Independent entries up to conjugate symmetry.
    WignerLike,
    /// Entries equal whenever their indices agree modulo the tile size.
    Block { m: usize },
    /// Stationary covariance profile on the index torus.
    Metric { cu: Array2<f64> },
}

impl ComplexPattern {
    pub(crate) fn from_model(model: &CorrelationModel) -> Result<Self> {
        if model.symmetry() != Symmetry::ComplexHermitian {
            return Err(AuditError::Unsupported(
                "the blockwise two-point pattern is defined for the complex Hermitian class"
                    .into(),
            ));
        }
        let n = model.n();
        let kind = match model.kind() {
            ModelKind::Wigner | ModelKind::Deformed => PatternKind::WignerLike,
            ModelKind::BlockCopy { n_blocks } => PatternKind::Block { m: n / n_blocks },
            ModelKind::GaussianMetricDecay { s } => {
                let kernel = KappaKernel::metric_decay(n, *s)?;
                let KernelAction::MetricDecay { cu, .. } = kernel.action() else {
                    unreachable!("a metric kernel carries its covariance profile");
                };
                PatternKind::Metric { cu: cu.clone() }
            }
            ModelKind::Fourfold | ModelKind::Custom { .. } => {
                return Err(AuditError::Unsupported(
                    "this model kind has no complex Hermitian class".into(),
                ));
            }
        };
        Ok(ComplexPattern { n, kind })
    }

    /// `(direct, cross)` coefficients for one ordered label pair.
    pub(crate) fn raw(&self, alpha: Label, beta: Label) -> (f64, f64) {
        let (a, b) = alpha;
        let (c, d) = beta;
        match &self.kind {
            PatternKind::WignerLike => {
                let direct = f64::from(a == c && b == d);
                let cross = f64::from(a == d && b == c);
                (direct, cross)
            }
            PatternKind::Block { m } => {
                let (ra, rb, rc, rd) = (a % m, b % m, c % m, d % m);
                let direct = f64::from(ra == rc && rb == rd);
                let cross = f64::from(ra == rd && rb == rc);
                (direct, cross)
            }
            PatternKind::Metric { cu } => {
                let n = self.n;
                let md = |x: usize, y: usize| (x + n - y) % n;
                (cu[(md(a, c), md(b, d))], cu[(md(a, d), md(b, c))])
            }
        }
    }
}

/// Averaged and isotropic two-point norms of a complex Hermitian model,
/// summed over the four real/imaginary component assignments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TildeNorms {
    /// Sum of the four blockwise averaged norms.
    pub av: f64,
    /// Sum of the four blockwise isotropic norms under the natural
    /// direct/cross split of each block.
    pub iso: f64,
    /// The four averaged part norms, indexed `[Re|Im of α][Re|Im of β]`.
    pub av_parts: [[f64; 2]; 2],
}

/// Evaluates the blockwise two-point norms of a complex Hermitian model.
///
/// The averaged parts are exact operator norms of the dense
/// entrywise-absolute component blocks.  The isotropic value uses the
/// probe set: each diagonal component block splits into ±half of an
/// aligned-copy pattern and a transposed-copy pattern, and for every
/// family here the transposed pattern in its adapted wiring produces the
/// same probe matrix as the aligned pattern in its own adapted wiring, so
/// one supremum serves all four coefficients.
pub fn hermitian_tilde_norms(model: &CorrelationModel, probes: &ProbeSet) -> Result<TildeNorms> {
    let n = model.n();
    if n > MAX_TILDE_DIM {
        return Err(AuditError::InvalidArgument(format!(
            "blockwise norms are evaluated densely and support dimensions up to {MAX_TILDE_DIM}, got {n}"
        )));
    }
    let pattern = ComplexPattern::from_model(model)?;
    let dim = n * n;
    let mut rere = Array2::<f64>::zeros((dim, dim));
    let mut imim = Array2::<f64>::zeros((dim, dim));
    for a in 0..n {
        for b in 0..n {
            let row = a * n + b;
            for c in 0..n {
                for d in 0..n {
                    let col = c * n + d;
                    let (direct, cross) = pattern.raw((a, b), (c, d));
                    rere[(row, col)] = 0.5 * (direct + cross);
                    imim[(row, col)] = 0.5 * (direct - cross);
                }
            }
        }
    }
    // The mixed Re/Im covariances vanish identically for these models, so
    // their two part norms are exact zeros.
    let sym_norm = |m: &Array2<f64>| -> Result<f64> {
        let vals = numerics::sym_eigenvalues(&m.mapv(f64::abs))?;
        let lo = vals.first().copied().unwrap_or(0.0);
        let hi = vals.last().copied().unwrap_or(0.0);
        Ok(lo.abs().max(hi.abs()))
    };
    let av_parts = [[sym_norm(&rere)?, 0.0], [0.0, sym_norm(&imim)?]];
    let av = av_parts[0][0] + av_parts[0][1] + av_parts[1][0] + av_parts[1][1];

    let counterpart = match model.kind() {
        ModelKind::Wigner | ModelKind::Deformed => KappaKernel::wigner(n),
        ModelKind::BlockCopy { n_blocks } => KappaKernel::block_copy(n, *n_blocks)?,
        ModelKind::GaussianMetricDecay { s } => KappaKernel::metric_decay(n, *s)?,
        ModelKind::Fourfold | ModelKind::Custom { .. } => unreachable!(
            "pattern construction rejects kinds without a complex Hermitian class"
        ),
    };
    let aligned_sup = iso_part_norm(&counterpart, SplitPart::Direct, IsoWiring::DotFirst, probes)?;
    let transposed_sup = aligned_sup;
    // Each diagonal block is (aligned ± transposed)/2; its isotropic norm
    // is bounded by half of each pattern's adapted-wiring supremum, and
    // the two off-diagonal blocks vanish.
    let iso = 2.0 * (0.5 * aligned_sup + 0.5 * transposed_sup);
    Ok(TildeNorms { av, iso, av_parts })
}
