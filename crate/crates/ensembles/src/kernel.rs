//! Two-point kernels and the self-energy operator `S[V] = E[W V W] / N`.
//!
//! Every built-in correlation structure gets a closed-form action that costs
//! at most `O(N² log N)`; the quartic label-by-label sum is kept only as a
//! small-dimension oracle (`apply_s_naive`) and for explicit custom tensors.

use ndarray::Array2;
use numerics::fft::TorusFft;
use numerics::C64;

use crate::model::{CorrelationModel, ModelKind, Symmetry, TwoPointBlock};
use crate::{EnsembleError, Result};

/// An entry label `(row, column)` with both coordinates in `0..N`.
pub type Label = (usize, usize);

/// How the kernel acts; carried by [`KappaKernel`] and matched on by callers
/// that have structure-specific fast paths.
#[derive(Clone)]
pub enum KernelAction {
    /// Identically zero noise.
    Zero,
    /// `S[V] = <V> Id` exactly; pairwise `κ((a,b),(c,d)) = δ_ad δ_bc`.
    Flat,
    /// Independent entries up to transpose symmetry, diagonal variance 2.
    Wigner,
    /// Entries tied under index negation mod N as well as transposition.
    Fourfold,
    /// One shared symmetric (or Hermitian) tile repeated over an
    /// `n_blocks × n_blocks` grid.
    BlockCopy { n_blocks: usize, hermitian: bool },
    /// Moving-average Gaussian field; `cu` is the kernel autocorrelation,
    /// `cu_hat` its 2-D transform, `q_anti` its anti-diagonal sums.
    MetricDecay {
        s: f64,
        cu: Array2<f64>,
        cu_hat: Array2<C64>,
        q_anti: Vec<f64>,
        hermitian: bool,
    },
    /// Explicit tensor over flattened labels `α = a·N + b`.
    Custom { kappa: Array2<f64> },
}

/// A two-point kernel on labels together with its self-energy action.
#[derive(Clone)]
pub struct KappaKernel {
    n: usize,
    action: KernelAction,
}

impl KappaKernel {
    pub fn zero(n: usize) -> Self {
        KappaKernel {
            n,
            action: KernelAction::Zero,
        }
    }

    /// The kernel whose self-energy is exactly `V ↦ <V> Id`.
    pub fn flat(n: usize) -> Self {
        KappaKernel {
            n,
            action: KernelAction::Flat,
        }
    }

    pub fn wigner(n: usize) -> Self {
        KappaKernel {
            n,
            action: KernelAction::Wigner,
        }
    }

    pub fn fourfold(n: usize) -> Self {
        KappaKernel {
            n,
            action: KernelAction::Fourfold,
        }
    }

    pub fn block_copy(n: usize, n_blocks: usize) -> Result<Self> {
        if n_blocks == 0 || n % n_blocks != 0 {
            return Err(EnsembleError::InvalidArgument(format!(
                "block count {n_blocks} must divide the dimension {n}"
            )));
        }
        Ok(KappaKernel {
            n,
            action: KernelAction::BlockCopy {
                n_blocks,
                hermitian: false,
            },
        })
    }

    pub fn metric_decay(n: usize, s: f64) -> Result<Self> {
        if !s.is_finite() || s <= 0.0 {
            return Err(EnsembleError::InvalidArgument(format!(
                "decay exponent must be positive and finite, got {s}"
            )));
        }
        let (cu, cu_hat, q_anti) = build_metric_tables(n, s);
        Ok(KappaKernel {
            n,
            action: KernelAction::MetricDecay {
                s,
                cu,
                cu_hat,
                q_anti,
                hermitian: false,
            },
        })
    }

    pub fn custom(n: usize, kappa: Array2<f64>) -> Result<Self> {
        if kappa.shape() != [n * n, n * n] {
            return Err(EnsembleError::InvalidArgument(format!(
                "custom tensor must be {0}×{0}, got {1:?}",
                n * n,
                kappa.shape()
            )));
        }
        Ok(KappaKernel {
            n,
            action: KernelAction::Custom { kappa },
        })
    }

    /// The kernel realized by a model, taking its symmetry class into
    /// account (the complex classes carry different pairwise moments).
    pub fn from_model(model: &CorrelationModel) -> Result<Self> {
        let n = model.n();
        let hermitian = model.symmetry() == Symmetry::ComplexHermitian;
        let action = match model.kind() {
            ModelKind::Wigner | ModelKind::Deformed => {
                if hermitian {
                    KernelAction::Flat
                } else {
                    KernelAction::Wigner
                }
            }
            ModelKind::Fourfold => KernelAction::Fourfold,
            ModelKind::BlockCopy { n_blocks } => KernelAction::BlockCopy {
                n_blocks: *n_blocks,
                hermitian,
            },
            ModelKind::GaussianMetricDecay { s } => {
                let (cu, cu_hat, q_anti) = build_metric_tables(n, *s);
                KernelAction::MetricDecay {
                    s: *s,
                    cu,
                    cu_hat,
                    q_anti,
                    hermitian,
                }
            }
            ModelKind::Custom { kappa } => KernelAction::Custom {
                kappa: kappa.clone(),
            },
        };
        Ok(KappaKernel { n, action })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn action(&self) -> &KernelAction {
        &self.action
    }

    /// The pairwise second moment `E[w_α w_β]` (no conjugation); this is the
    /// quantity the self-energy and all deterministic equations consume.
    pub fn kappa2(&self, alpha: Label, beta: Label) -> f64 {
        let (dir, cross) = self.split(alpha, beta);
        dir + cross
    }

    /// The declared two-part split of the kernel: a "direct" part aligned
    /// with `(a,c) ↦ (a,c)` matchings and a "cross" part aligned with
    /// transposed matchings. They sum to [`Self::kappa2`].
    pub fn split(&self, alpha: Label, beta: Label) -> (f64, f64) {
        let n = self.n;
        let (a, b) = alpha;
        let (c, d) = beta;
        debug_assert!(a < n && b < n && c < n && d < n);
        let ind = |cond: bool| if cond { 1.0 } else { 0.0 };
        match &self.action {
            KernelAction::Zero => (0.0, 0.0),
            KernelAction::Flat => (0.0, ind(a == d && b == c)),
            KernelAction::Wigner => (ind(a == c && b == d), ind(a == d && b == c)),
            KernelAction::Fourfold => {
                let neg = |x: usize| (n - x) % n;
                let direct = ind(a == c && b == d) + ind(a == neg(c) && b == neg(d));
                let cross = ind(a == d && b == c) + ind(a == neg(d) && b == neg(c));
                (direct, cross)
            }
            KernelAction::BlockCopy {
                n_blocks,
                hermitian,
            } => {
                let m = n / n_blocks;
                let (ar, br, cr, dr) = (a % m, b % m, c % m, d % m);
                if *hermitian {
                    (0.0, ind(ar == dr && br == cr))
                } else {
                    let direct = ar == cr && br == dr;
                    let cross = ar == dr && br == cr;
                    (ind(direct), ind(cross && !direct))
                }
            }
            KernelAction::MetricDecay { cu, hermitian, .. } => {
                let md = |x: usize, y: usize| (x + n - y) % n;
                let cross = cu[(md(a, d), md(b, c))];
                if *hermitian {
                    (0.0, cross)
                } else {
                    (cu[(md(a, c), md(b, d))], cross)
                }
            }
            KernelAction::Custom { kappa } => (kappa[(a * n + b, c * n + d)], 0.0),
        }
    }

    /// The self-energy `S[V]_{ab} = (1/N) Σ_{c,d} κ((a,c),(d,b)) V_{cd}`
    /// evaluated through the structure-specific closed form.
    pub fn apply_s(&self, v: &Array2<C64>) -> Result<Array2<C64>> {
        let n = self.n;
        if v.shape() != [n, n] {
            return Err(EnsembleError::InvalidArgument(format!(
                "argument must be {n}×{n}, got {:?}",
                v.shape()
            )));
        }
        let nf = n as f64;
        let trace: C64 = (0..n).map(|i| v[(i, i)]).sum();
        let mean = trace / nf;
        match &self.action {
            KernelAction::Zero => Ok(Array2::zeros((n, n))),
            KernelAction::Flat => {
                let mut out = Array2::zeros((n, n));
                for i in 0..n {
                    out[(i, i)] = mean;
                }
                Ok(out)
            }
            KernelAction::Wigner => {
                let mut out = Array2::zeros((n, n));
                for a in 0..n {
                    for b in 0..n {
                        out[(a, b)] = v[(b, a)] / nf;
                    }
                    out[(a, a)] += mean;
                }
                Ok(out)
            }
            KernelAction::Fourfold => {
                let neg = |x: usize| (n - x) % n;
                let trace_vj: C64 = (0..n).map(|a| v[(a, neg(a))]).sum();
                let mut out = Array2::zeros((n, n));
                for a in 0..n {
                    for b in 0..n {
                        let mut val = (v[(b, a)] + v[(neg(b), neg(a))]) / nf;
                        if a == neg(b) {
                            val += trace_vj / nf;
                        }
                        if a == b {
                            val += mean;
                        }
                        out[(a, b)] = val;
                    }
                }
                Ok(out)
            }
            KernelAction::BlockCopy {
                n_blocks,
                hermitian,
            } => {
                let m = n / n_blocks;
                // Class-summed matrix F(V)_{xy} = Σ_{c≡x, d≡y} V_{cd}.
                let mut fold: Array2<C64> = Array2::zeros((m, m));
                for c in 0..n {
                    for d in 0..n {
                        fold[(c % m, d % m)] += v[(c, d)];
                    }
                }
                let tr_fold: C64 = (0..m).map(|x| fold[(x, x)]).sum();
                let mut out = Array2::zeros((n, n));
                for a in 0..n {
                    for b in 0..n {
                        let (ar, br) = (a % m, b % m);
                        out[(a, b)] = if *hermitian {
                            if ar == br {
                                tr_fold / nf
                            } else {
                                C64::new(0.0, 0.0)
                            }
                        } else {
                            let mut val = fold[(br, ar)];
                            if ar == br {
                                val += tr_fold - fold[(ar, ar)];
                            }
                            val / nf
                        };
                    }
                }
                Ok(out)
            }
            KernelAction::MetricDecay {
                cu,
                cu_hat,
                hermitian,
                ..
            } => {
                // Shifted diagonal sums s(t) = Σ_c V_{c, c−t}.
                let mut sdiag = vec![C64::new(0.0, 0.0); n];
                for (t, sd) in sdiag.iter_mut().enumerate() {
                    for c in 0..n {
                        *sd += v[(c, (c + n - t) % n)];
                    }
                }
                // wvec(δ) = Σ_t Cu(δ, t) s(t).
                let mut wvec = vec![C64::new(0.0, 0.0); n];
                for (delta, w) in wvec.iter_mut().enumerate() {
                    for (t, sd) in sdiag.iter().enumerate() {
                        *w += *sd * cu[(delta, t)];
                    }
                }
                let mut out = Array2::zeros((n, n));
                if !hermitian {
                    let fft = TorusFft::new(n);
                    let vt = v.t().to_owned();
                    out = fft.convolve2_with_hat(cu_hat, &vt);
                }
                for a in 0..n {
                    for b in 0..n {
                        out[(a, b)] = (out[(a, b)] + wvec[(a + n - b) % n]) / nf;
                    }
                }
                Ok(out)
            }
            KernelAction::Custom { .. } => {
                if n > 64 {
                    return Err(EnsembleError::Unsupported(format!(
                        "explicit-tensor self-energy is quartic in the dimension \
                         and is capped at 64; got {n}"
                    )));
                }
                apply_s_naive(self, v)
            }
        }
    }

    /// [`Self::apply_s`] on a real matrix (the action of every built-in
    /// kernel maps real matrices to real matrices).
    pub fn apply_s_real(&self, v: &Array2<f64>) -> Result<Array2<f64>> {
        let vc = v.mapv(|x| C64::new(x, 0.0));
        Ok(self.apply_s(&vc)?.mapv(|x| x.re))
    }

    /// Whether the self-energy maps circulant matrices to circulant
    /// matrices, enabling the symbol-space fixed point.
    pub fn preserves_circulants(&self) -> bool {
        matches!(
            self.action,
            KernelAction::Zero
                | KernelAction::Flat
                | KernelAction::Wigner
                | KernelAction::MetricDecay { .. }
        )
    }

    /// The self-energy acting on a circulant matrix, expressed on its
    /// symbol: `symbol[δ] = V_{c, c−δ}` for any row `c`.
    pub fn apply_s_circulant(&self, symbol: &[C64]) -> Result<Vec<C64>> {
        let n = self.n;
        if symbol.len() != n {
            return Err(EnsembleError::InvalidArgument(format!(
                "circulant symbol must have length {n}, got {}",
                symbol.len()
            )));
        }
        let nf = n as f64;
        match &self.action {
            KernelAction::Zero => Ok(vec![C64::new(0.0, 0.0); n]),
            KernelAction::Flat => {
                let mut out = vec![C64::new(0.0, 0.0); n];
                out[0] = symbol[0];
                Ok(out)
            }
            KernelAction::Wigner => {
                let mut out = vec![C64::new(0.0, 0.0); n];
                for (delta, o) in out.iter_mut().enumerate() {
                    *o = symbol[(n - delta) % n] / nf;
                }
                out[0] += symbol[0];
                Ok(out)
            }
            KernelAction::MetricDecay {
                cu,
                q_anti,
                hermitian,
                ..
            } => {
                let mut out = vec![C64::new(0.0, 0.0); n];
                for (delta, o) in out.iter_mut().enumerate() {
                    let mut acc = C64::new(0.0, 0.0);
                    for (t, &sym) in symbol.iter().enumerate() {
                        acc += sym * cu[(delta, t)];
                    }
                    if !hermitian {
                        let mut t1 = C64::new(0.0, 0.0);
                        for (u, &sym) in symbol.iter().enumerate() {
                            t1 += sym * q_anti[(u + delta) % n];
                        }
                        acc += t1 / nf;
                    }
                    *o = acc;
                }
                Ok(out)
            }
            _ => Err(EnsembleError::Unsupported(
                "this kernel does not preserve circulant matrices".into(),
            )),
        }
    }
}

/// Kernel autocorrelation tables for the moving-average structure:
/// the normalized decay profile's autocorrelation `Cu`, its 2-D transform,
/// and the anti-diagonal sums `q(w) = Σ_x Cu(x, w−x)`.
fn build_metric_tables(n: usize, s: f64) -> (Array2<f64>, Array2<C64>, Vec<f64>) {
    let fft = TorusFft::new(n);
    let k = metric_profile(n, s);
    let cu = fft.autocorrelate2(&k);
    let cu_hat = fft.fft2_real(&cu);
    let mut q_anti = vec![0.0; n];
    for x in 0..n {
        for y in 0..n {
            q_anti[(x + y) % n] += cu[(x, y)];
        }
    }
    (cu, cu_hat, q_anti)
}

/// The normalized moving-average profile on the `[n] × [n]` torus:
/// `k(x) ∝ (1 + |x|)^{−(s+2)/2}` with wrapped coordinate distances and unit
/// square sum, shared by the kernel tables and the field sampler.
pub(crate) fn metric_profile(n: usize, s: f64) -> Array2<f64> {
    let mut k = Array2::zeros((n, n));
    for x in 0..n {
        for y in 0..n {
            let dx = x.min(n - x) as f64;
            let dy = y.min(n - y) as f64;
            let r = dx.hypot(dy);
            k[(x, y)] = (1.0 + r).powf(-(s + 2.0) / 2.0);
        }
    }
    let norm = k.iter().map(|v| v * v).sum::<f64>().sqrt();
    k.mapv_inplace(|v| v / norm);
    k
}

/// Label-by-label evaluation of the self-energy, quartic in the dimension.
/// Reference implementation for cross-checking the closed forms; capped at
/// dimension 64.
pub fn apply_s_naive(kernel: &KappaKernel, v: &Array2<C64>) -> Result<Array2<C64>> {
    let n = kernel.n();
    if n > 64 {
        return Err(EnsembleError::InvalidArgument(format!(
            "label-by-label self-energy is quartic in the dimension and \
             capped at 64; got {n}"
        )));
    }
    if v.shape() != [n, n] {
        return Err(EnsembleError::InvalidArgument(format!(
            "argument must be {n}×{n}, got {:?}",
            v.shape()
        )));
    }
    let nf = n as f64;
    let mut out = Array2::zeros((n, n));
    for a in 0..n {
        for b in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for c in 0..n {
                for d in 0..n {
                    let k = kernel.kappa2((a, c), (d, b));
                    if k != 0.0 {
                        acc += v[(c, d)] * k;
                    }
                }
            }
            out[(a, b)] = acc / nf;
        }
    }
    Ok(out)
}

/// The two-point covariance of one label pair under a model: a scalar for
/// the real symmetry class, the 2×2 block over (Re, Im) parts for the
/// complex one. Convenience evaluator; bulk consumers should hold a
/// [`KappaKernel`] and call [`KappaKernel::kappa2`].
pub fn two_point_cumulant(
    model: &CorrelationModel,
    alpha: Label,
    beta: Label,
) -> Result<TwoPointBlock> {
    let n = model.n();
    let (a, b) = alpha;
    let (c, d) = beta;
    if a >= n || b >= n || c >= n || d >= n {
        return Err(EnsembleError::InvalidArgument(format!(
            "labels {alpha:?}, {beta:?} out of range for dimension {n}"
        )));
    }
    match model.symmetry() {
        Symmetry::RealSymmetric => {
            let kernel = KappaKernel::from_model(model)?;
            Ok(TwoPointBlock::Real(kernel.kappa2(alpha, beta)))
        }
        Symmetry::ComplexHermitian => {
            let block = match model.kind() {
                ModelKind::Wigner | ModelKind::Deformed => {
                    if alpha == beta && a == b {
                        [[1.0, 0.0], [0.0, 0.0]]
                    } else if alpha == beta {
                        [[0.5, 0.0], [0.0, 0.5]]
                    } else if (b, a) == beta {
                        [[0.5, 0.0], [0.0, -0.5]]
                    } else {
                        [[0.0; 2]; 2]
                    }
                }
                ModelKind::GaussianMetricDecay { .. } => {
                    let kernel = KappaKernel::from_model(model)?;
                    let KernelAction::MetricDecay { cu, .. } = kernel.action() else {
                        unreachable!("metric model builds a metric kernel");
                    };
                    let md = |x: usize, y: usize| (x + n - y) % n;
                    let direct = cu[(md(a, c), md(b, d))];
                    let cross = cu[(md(a, d), md(b, c))];
                    [
                        [(direct + cross) / 2.0, 0.0],
                        [0.0, (direct - cross) / 2.0],
                    ]
                }
                ModelKind::BlockCopy { n_blocks } => {
                    let m = n / n_blocks;
                    let (ar, br, cr, dr) = (a % m, b % m, c % m, d % m);
                    if ar == br && cr == ar && dr == ar {
                        [[1.0, 0.0], [0.0, 0.0]]
                    } else if ar == cr && br == dr {
                        [[0.5, 0.0], [0.0, 0.5]]
                    } else if ar == dr && br == cr {
                        [[0.5, 0.0], [0.0, -0.5]]
                    } else {
                        [[0.0; 2]; 2]
                    }
                }
                ModelKind::Fourfold | ModelKind::Custom { .. } => {
                    return Err(EnsembleError::Unsupported(format!(
                        "the {} kind has no complex Hermitian class",
                        model.kind().name()
                    )));
                }
            };
            Ok(TwoPointBlock::Complex(block))
        }
    }
}
