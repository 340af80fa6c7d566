//! Third- and fourth-order cumulant norms for delta-supported kernels.
//!
//! The tile-copy and reflection families repeat one scalar random variable
//! across a whole class of matrix labels.  When that scalar has third
//! cumulant `k3` (fourth cumulant `k4`), the joint cumulant tensor is `k3`
//! (`k4`) on every triple (quadruple) of labels drawn from one class and
//! zero elsewhere.  This module evaluates the averaged third-order norm —
//! a leading operator-norm term plus part norms for a declared symmetric
//! decomposition — and the averaged fourth-order norm, both at weight `k3`
//! or `k4`.
//!
//! The families whose entries are jointly Gaussian by construction (no
//! repeated scalar beyond the symmetry) have identically vanishing
//! cumulants beyond order two, so their norms are reported as exact zeros.

use crate::{AuditError, Result};
use ensembles::{KappaKernel, KernelAction, Label};
use ndarray::Array2;
use serde::{Deserialize, Serialize};

/// Cap on the total number of ordered label triples enumerated across all
/// support classes; beyond this the evaluation is declined rather than
/// allowed to dominate the run time.
const MAX_TRIPLES: f64 = 2.0e8;

/// Averaged third-order norm pieces: the leading operator-norm term plus
/// the four part norms of the declared symmetric decomposition.
///
/// The decomposition used here puts a triple into the `dd` part when all
/// three pairwise label relations within its class are direct (equal up to
/// the class symmetry without a transposition), and into the `cc` part
/// otherwise.  Both parts are invariant under permuting the three label
/// slots, so the part norms below are well defined; the `dc` and `cd`
/// parts of this particular decomposition are identically zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThirdOrderNorms {
    /// Operator norm of the entrywise-absolute tensor summed over its
    /// first label slot.
    pub first_term: f64,
    /// Part norm of the all-direct triples in the direct-direct wiring.
    pub dd: f64,
    /// Direct-cross wiring applied to this decomposition's (empty) part.
    pub dc: f64,
    /// Cross-direct wiring applied to this decomposition's (empty) part.
    pub cd: f64,
    /// Part norm of the remaining triples in the cross-cross wiring.
    pub cc: f64,
}

impl ThirdOrderNorms {
    /// Leading term plus the sum of the four part norms.
    pub fn total(&self) -> f64 {
        self.first_term + self.dd + self.dc + self.cd + self.cc
    }

    fn zero() -> Self {
        ThirdOrderNorms {
            first_term: 0.0,
            dd: 0.0,
            dc: 0.0,
            cd: 0.0,
            cc: 0.0,
        }
    }
}

/// The label classes sharing one scalar variable, for the delta-supported
/// families.  Returns `None` for families without such structure.
fn support_classes(kernel: &KappaKernel) -> Result<Option<Vec<Vec<Label>>>> {
    let n = kernel.n();
    match kernel.action() {
        KernelAction::Zero
        | KernelAction::Flat
        | KernelAction::Wigner
        | KernelAction::MetricDecay { .. } => Ok(None),
        KernelAction::Fourfold => {
            let neg = |x: usize| (n - x) % n;
            let mut classes = Vec::new();
            for a in 0..n {
                for b in 0..n {
                    let mut orbit = vec![(a, b), (b, a), (neg(a), neg(b)), (neg(b), neg(a))];
                    orbit.sort_unstable();
                    orbit.dedup();
                    if orbit[0] == (a, b) {
                        classes.push(orbit);
                    }
                }
            }
            Ok(Some(classes))
        }
        KernelAction::BlockCopy {
            n_blocks,
            hermitian,
        } => {
            if *hermitian {
                return Err(AuditError::Unsupported(
                    "higher-order structural norms cover the real copy families only".into(),
                ));
            }
            let m = n / n_blocks;
            let mut classes = Vec::new();
            for p in 0..m {
                for q in p..m {
                    let mut members = Vec::new();
                    for i in 0..*n_blocks {
                        for j in 0..*n_blocks {
                            members.push((p + i * m, q + j * m));
                            if p != q {
                                members.push((q + i * m, p + j * m));
                            }
                        }
                    }
                    classes.push(members);
                }
            }
            Ok(Some(classes))
        }
        KernelAction::Custom { .. } => Err(AuditError::Unsupported(
            "explicit two-point tensors carry no higher-order structure".into(),
        )),
    }
}

/// Whether two labels of one class are related without a transposition.
fn direct_related(kernel: &KappaKernel, alpha: Label, beta: Label) -> bool {
    let n = kernel.n();
    match kernel.action() {
        KernelAction::Fourfold => {
            let neg = |x: usize| (n - x) % n;
            beta == alpha || beta == (neg(alpha.0), neg(alpha.1))
        }
        KernelAction::BlockCopy { n_blocks, .. } => {
            let m = n / n_blocks;
            alpha.0 % m == beta.0 % m && alpha.1 % m == beta.1 % m
        }
        _ => unreachable!("relation queries are made only for copy families"),
    }
}

/// Averaged third-order norm data for the kernel's support structure, with
/// every tensor entry equal to `weight` (the scalar third cumulant of the
/// repeated variable).  Gaussian families return exact zeros; families
/// without a usable class structure are declined.
pub fn third_order_norms(kernel: &KappaKernel, weight: f64) -> Result<ThirdOrderNorms> {
    let n = kernel.n();
    let Some(classes) = support_classes(kernel)? else {
        return Ok(ThirdOrderNorms::zero());
    };
    let triples: f64 = classes.iter().map(|k| (k.len() as f64).powi(3)).sum();
    if triples > MAX_TRIPLES {
        return Err(AuditError::Unsupported(
            "class enumeration is too large at this dimension".into(),
        ));
    }
    let w = weight.abs();

    // Leading term: summing the absolute tensor over one label slot leaves
    // a block-diagonal matrix with one constant block per class, whose
    // operator norm is the squared class size times the weight.
    let max_class = classes.iter().map(Vec::len).max().unwrap_or(0) as f64;
    let first_term = w * max_class * max_class;

    // Part norms: accumulate the declared parts onto their wiring grids.
    // dd and cc read coordinates (second of slot 2, first of slot 3);
    // dc reads (second of slot 1, first of slot 2); cd reads (second of
    // slot 3, first of slot 1).  dc and cd stay empty for this split but
    // are evaluated through the same code path for uniformity.
    let mut grid_dd = Array2::<f64>::zeros((n, n));
    let mut grid_cc = Array2::<f64>::zeros((n, n));
    let grid_dc = Array2::<f64>::zeros((n, n));
    let grid_cd = Array2::<f64>::zeros((n, n));
    for class in &classes {
        for &a1 in class {
            for &a2 in class {
                let d12 = direct_related(kernel, a1, a2);
                for &a3 in class {
                    let all_direct = d12
                        && direct_related(kernel, a1, a3)
                        && direct_related(kernel, a2, a3);
                    if all_direct {
                        grid_dd[(a2.1, a3.0)] += w;
                    } else {
                        grid_cc[(a2.1, a3.0)] += w;
                    }
                }
            }
        }
    }
    let grid_value = |g: &Array2<f64>| g.iter().map(|v| v * v).sum::<f64>().sqrt() / n as f64;
    Ok(ThirdOrderNorms {
        first_term,
        dd: grid_value(&grid_dd),
        dc: grid_value(&grid_dc),
        cd: grid_value(&grid_cd),
        cc: grid_value(&grid_cc),
    })
}

/// Averaged fourth-order norm: the normalized entrywise sum of the
/// absolute cumulant tensor, with every entry equal to `weight` on
/// quadruples drawn from one support class.
pub fn fourth_order_av(kernel: &KappaKernel, weight: f64) -> Result<f64> {
    let n = kernel.n() as f64;
    let Some(classes) = support_classes(kernel)? else {
        return Ok(0.0);
    };
    let total: f64 = classes.iter().map(|k| (k.len() as f64).powi(4)).sum();
    Ok(weight.abs() * total / (n * n))
}
