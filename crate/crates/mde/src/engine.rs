//! Internal solver engine. One damped fixed-point loop drives several
//! structure-exploiting state representations: dense matrices (the general
//! case), diagonal vectors (mean-field and transpose-corrected kernels with
//! diagonal deformation), two-coordinate spans `u·Id + v·B` (index-reversal
//! and block-copy kernels), and circulant symbols (translation-invariant
//! kernels). Every representation is closed under the fixed-point map, so
//! the structured paths compute exactly what the dense path would.

use ensembles::{KappaKernel, KernelAction};
use ndarray::{Array1, Array2};
use numerics::fft::TorusFft;
use numerics::{herm_eigenvalues, inv_complex, C64};

use crate::{MdeError, Result};

pub(crate) const ETA_START: f64 = 10.0;
pub(crate) const ETA_FACTOR: f64 = 0.7;
pub(crate) const DAMPING_FLOOR: f64 = 1.0 / (1 << 20) as f64;

/// Solver state in whichever representation the engine selected.
#[derive(Debug, Clone)]
pub(crate) enum Rep {
    Dense(Array2<C64>),
    Diag(Array1<C64>),
    Span(C64, C64),
    Circ(Vec<C64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum DiagKind {
    Zero,
    Flat,
    Wigner,
}

/// Data for a kernel whose self-energy is closed on `span{Id, B}` with
/// `B² = beta·Id + tau·B`.
#[derive(Debug)]
pub(crate) struct SpanBasis {
    b: Array2<f64>,
    /// Coordinates of the self-energy: row 0 is the Id component, row 1 the
    /// B component, columns act on (u, v).
    s: [[f64; 2]; 2],
    beta: f64,
    tau: f64,
    eig_lo: f64,
    eig_hi: f64,
    id_only: bool,
    b_only: bool,
    overlap: bool,
}

pub(crate) enum Mode {
    Dense { a: Option<Array2<f64>> },
    Diag { a: Array1<f64>, kind: DiagKind },
    Span(SpanBasis),
    Circ { fft: TorusFft },
}

pub(crate) struct Engine<'k> {
    pub n: usize,
    pub kernel: &'k KappaKernel,
    pub mode: Mode,
}

/// Structure of the deformation: exactly zero, exactly diagonal, or dense.
enum AClass {
    Zero,
    Diag(Array1<f64>),
    Dense,
}

fn classify_a(n: usize, a: Option<&Array2<f64>>) -> AClass {
    let Some(a) = a else { return AClass::Zero };
    let mut all_zero = true;
    for i in 0..n {
        for j in 0..n {
            if i != j && a[(i, j)] != 0.0 {
                return AClass::Dense;
            }
            if a[(i, j)] != 0.0 {
                all_zero = false;
            }
        }
    }
    if all_zero {
        AClass::Zero
    } else {
        AClass::Diag(a.diag().to_owned())
    }
}

/// Expresses a matrix in `span{Id, B}` coordinates, or `None` when it does
/// not lie in the span to within `tol` (max-entry).
fn span_coords(m: &Array2<f64>, b: &Array2<f64>, tol: f64) -> Option<(f64, f64)> {
    let n = b.nrows();
    let nf = n as f64;
    let tr_b: f64 = b.diag().sum();
    let b_sq: f64 = b.iter().map(|x| x * x).sum();
    let det = nf * b_sq - tr_b * tr_b;
    if det.abs() < 1e-9 {
        return None;
    }
    let ip_id: f64 = m.diag().sum();
    let ip_b: f64 = m.iter().zip(b.iter()).map(|(x, y)| x * y).sum();
    let u = (b_sq * ip_id - tr_b * ip_b) / det;
    let v = (nf * ip_b - tr_b * ip_id) / det;
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let id_part = if i == j { 1.0 } else { 0.0 };
            let diff = (m[(i, j)] - u * id_part - v * b[(i, j)]).abs();
            if diff > worst {
                worst = diff;
            }
        }
    }
    if worst <= tol {
        Some((u, v))
    } else {
        None
    }
}

fn build_span_basis(kernel: &KappaKernel) -> Result<Option<SpanBasis>> {
    let n = kernel.n();
    let (b, beta, tau, eig_lo, eig_hi, id_only) = match kernel.action() {
        KernelAction::Fourfold => {
            if n < 3 {
                return Ok(None);
            }
            let b = Array2::from_shape_fn((n, n), |(i, j)| {
                if (n - i) % n == j {
                    1.0
                } else {
                    0.0
                }
            });
            (b, 1.0, 0.0, -1.0, 1.0, true)
        }
        KernelAction::BlockCopy { n_blocks, .. } => {
            let blocks = *n_blocks;
            if blocks < 2 {
                return Ok(None);
            }
            let m_size = n / blocks;
            let b = Array2::from_shape_fn((n, n), |(i, j)| {
                if i % m_size == j % m_size {
                    1.0
                } else {
                    0.0
                }
            });
            (b, 0.0, blocks as f64, 0.0, blocks as f64, false)
        }
        _ => return Ok(None),
    };
    // Derive the 2×2 self-energy action numerically and verify the closure.
    let to_c = |m: &Array2<f64>| m.mapv(|x| C64::new(x, 0.0));
    let id = Array2::<f64>::eye(n);
    let s_id = kernel.apply_s(&to_c(&id))?.mapv(|x| x.re);
    let s_b = kernel.apply_s(&to_c(&b))?.mapv(|x| x.re);
    let Some((a00, a10)) = span_coords(&s_id, &b, 1e-10) else {
        return Ok(None);
    };
    let Some((a01, a11)) = span_coords(&s_b, &b, 1e-10) else {
        return Ok(None);
    };
    Ok(Some(SpanBasis {
        b,
        s: [[a00, a01], [a10, a11]],
        beta,
        tau,
        eig_lo,
        eig_hi,
        id_only,
        b_only: true,
        overlap: true,
    }))
}

impl<'k> Engine<'k> {
    /// Picks the cheapest exact representation for the pair (deformation,
    /// kernel). `force_dense` pins the general path (used when the caller
    /// supplies an arbitrary initialization).
    pub(crate) fn new(
        a: Option<&Array2<f64>>,
        kernel: &'k KappaKernel,
        force_dense: bool,
    ) -> Result<Self> {
        let n = kernel.n();
        if let Some(a) = a {
            if a.shape() != [n, n] {
                return Err(MdeError::InvalidArgument(format!(
                    "deformation is {:?}, kernel dimension is {n}",
                    a.shape()
                )));
            }
        }
        if force_dense {
            return Ok(Engine {
                n,
                kernel,
                mode: Mode::Dense {
                    a: a.map(|m| m.to_owned()),
                },
            });
        }
        let a_class = classify_a(n, a);
        let mode = match (kernel.action(), a_class) {
            (KernelAction::Zero, AClass::Zero) => Mode::Diag {
                a: Array1::zeros(n),
                kind: DiagKind::Zero,
            },
            (KernelAction::Zero, AClass::Diag(d)) => Mode::Diag {
                a: d,
                kind: DiagKind::Zero,
            },
            (KernelAction::Flat, AClass::Zero) => Mode::Diag {
                a: Array1::zeros(n),
                kind: DiagKind::Flat,
            },
            (KernelAction::Flat, AClass::Diag(d)) => Mode::Diag {
                a: d,
                kind: DiagKind::Flat,
            },
            (KernelAction::Wigner, AClass::Zero) => Mode::Diag {
                a: Array1::zeros(n),
                kind: DiagKind::Wigner,
            },
            (KernelAction::Wigner, AClass::Diag(d)) => Mode::Diag {
                a: d,
                kind: DiagKind::Wigner,
            },
            (KernelAction::Fourfold | KernelAction::BlockCopy { .. }, AClass::Zero) => {
                match build_span_basis(kernel)? {
                    Some(basis) => Mode::Span(basis),
                    None => Mode::Dense { a: None },
                }
            }
            (KernelAction::MetricDecay { .. }, AClass::Zero) => Mode::Circ {
                fft: TorusFft::new(n),
            },
            (_, AClass::Zero) => Mode::Dense { a: None },
            _ => Mode::Dense {
                a: a.map(|m| m.to_owned()),
            },
        };
        Ok(Engine { n, kernel, mode })
    }

    pub(crate) fn init(&self, z: C64) -> Rep {
        let m0 = -C64::new(1.0, 0.0) / z;
        match &self.mode {
            Mode::Dense { .. } => {
                let mut m = Array2::<C64>::zeros((self.n, self.n));
                for i in 0..self.n {
                    m[(i, i)] = m0;
                }
                Rep::Dense(m)
            }
            Mode::Diag { .. } => Rep::Diag(Array1::from_elem(self.n, m0)),
            Mode::Span(_) => Rep::Span(m0, C64::new(0.0, 0.0)),
            Mode::Circ { .. } => {
                let mut v = vec![C64::new(0.0, 0.0); self.n];
                v[0] = m0;
                Rep::Circ(v)
            }
        }
    }

    /// The fixed-point map `F(M) = −(z − A + 𝒮[M])^{-1}`.
    pub(crate) fn fix_map(&self, z: C64, m: &Rep) -> Result<Rep> {
        match (&self.mode, m) {
            (Mode::Dense { a }, Rep::Dense(m)) => {
                let s = self.kernel.apply_s(m)?;
                let mut b = s;
                for i in 0..self.n {
                    b[(i, i)] += z;
                }
                if let Some(a) = a {
                    b.zip_mut_with(a, |bv, &av| *bv -= av);
                }
                let inv = inv_complex(&b)?;
                Ok(Rep::Dense(inv.mapv(|x| -x)))
            }
            (Mode::Diag { a, kind }, Rep::Diag(m)) => {
                let s = self.diag_self_energy(*kind, m);
                let f = Array1::from_shape_fn(self.n, |i| {
                    -C64::new(1.0, 0.0) / (z - a[i] + s[i])
                });
                Ok(Rep::Diag(f))
            }
            (Mode::Span(basis), Rep::Span(u, v)) => {
                let su = basis.s[0][0] * u + basis.s[0][1] * v;
                let sv = basis.s[1][0] * u + basis.s[1][1] * v;
                let bu = z + su;
                let bv = sv;
                let det = bu * (bu + basis.tau * bv) - basis.beta * bv * bv;
                if det.norm() < 1e-300 {
                    return Err(MdeError::InvalidArgument(
                        "singular two-coordinate update".into(),
                    ));
                }
                let p = (bu + basis.tau * bv) / det;
                let q = -bv / det;
                Ok(Rep::Span(-p, -q))
            }
            (Mode::Circ { fft }, Rep::Circ(m)) => {
                let mut b = self.kernel.apply_s_circulant(m)?;
                b[0] += z;
                fft.fft1(&mut b);
                for x in b.iter_mut() {
                    if x.norm() < 1e-300 {
                        return Err(MdeError::InvalidArgument(
                            "singular circulant update".into(),
                        ));
                    }
                    *x = -1.0 / *x;
                }
                fft.ifft1(&mut b);
                Ok(Rep::Circ(b))
            }
            _ => unreachable!("state representation does not match engine mode"),
        }
    }

    fn diag_self_energy(&self, kind: DiagKind, m: &Array1<C64>) -> Array1<C64> {
        match kind {
            DiagKind::Zero => Array1::zeros(self.n),
            DiagKind::Flat => {
                let mean = m.sum() / self.n as f64;
                Array1::from_elem(self.n, mean)
            }
            DiagKind::Wigner => {
                let mean = m.sum() / self.n as f64;
                let nf = self.n as f64;
                Array1::from_shape_fn(self.n, |i| mean + m[i] / nf)
            }
        }
    }

    /// Max-entry norm of `Id + (z − A + 𝒮[M])·M`.
    pub(crate) fn residual(&self, z: C64, m: &Rep) -> Result<f64> {
        match (&self.mode, m) {
            (Mode::Dense { a }, Rep::Dense(m)) => {
                let s = self.kernel.apply_s(m)?;
                let mut b = s;
                for i in 0..self.n {
                    b[(i, i)] += z;
                }
                if let Some(a) = a {
                    b.zip_mut_with(a, |bv, &av| *bv -= av);
                }
                let mut r = b.dot(m);
                for i in 0..self.n {
                    r[(i, i)] += 1.0;
                }
                Ok(r.iter().map(|x| x.norm()).fold(0.0, f64::max))
            }
            (Mode::Diag { a, kind }, Rep::Diag(m)) => {
                let s = self.diag_self_energy(*kind, m);
                let mut worst = 0.0f64;
                for i in 0..self.n {
                    let r = 1.0 + (z - a[i] + s[i]) * m[i];
                    worst = worst.max(r.norm());
                }
                Ok(worst)
            }
            (Mode::Span(basis), Rep::Span(u, v)) => {
                let su = basis.s[0][0] * u + basis.s[0][1] * v;
                let sv = basis.s[1][0] * u + basis.s[1][1] * v;
                let bu = z + su;
                let bv = sv;
                let prod_u = bu * u + basis.beta * bv * v;
                let prod_v = bu * v + bv * u + basis.tau * bv * v;
                let r_id = 1.0 + prod_u;
                let r_b = prod_v;
                let mut worst = 0.0f64;
                if basis.id_only {
                    worst = worst.max(r_id.norm());
                }
                if basis.b_only {
                    worst = worst.max(r_b.norm());
                }
                if basis.overlap {
                    worst = worst.max((r_id + r_b).norm());
                }
                Ok(worst)
            }
            (Mode::Circ { fft }, Rep::Circ(m)) => {
                let mut b = self.kernel.apply_s_circulant(m)?;
                b[0] += z;
                fft.fft1(&mut b);
                let mut mh = m.clone();
                fft.fft1(&mut mh);
                for (x, y) in b.iter_mut().zip(mh.iter()) {
                    *x *= *y;
                }
                fft.ifft1(&mut b);
                b[0] += 1.0;
                Ok(b.iter().map(|x| x.norm()).fold(0.0, f64::max))
            }
            _ => unreachable!("state representation does not match engine mode"),
        }
    }

    /// Smallest eigenvalue of `(M − M†)/2i`. Exact per representation: the
    /// structured states have explicitly diagonalizable imaginary parts.
    pub(crate) fn im_min(&self, m: &Rep) -> Result<f64> {
        match m {
            Rep::Dense(m) => {
                let n = m.nrows();
                let half_i = C64::new(0.0, 0.5);
                let im =
                    Array2::from_shape_fn((n, n), |(i, j)| (m[(j, i)].conj() - m[(i, j)]) * half_i);
                let eigs = herm_eigenvalues(&im)?;
                Ok(eigs.iter().cloned().fold(f64::INFINITY, f64::min))
            }
            Rep::Diag(m) => Ok(m.iter().map(|x| x.im).fold(f64::INFINITY, f64::min)),
            Rep::Span(u, v) => {
                let Mode::Span(basis) = &self.mode else {
                    unreachable!()
                };
                let lo = u.im + basis.eig_lo * v.im;
                let hi = u.im + basis.eig_hi * v.im;
                Ok(lo.min(hi))
            }
            Rep::Circ(m) => {
                let Mode::Circ { fft } = &self.mode else {
                    unreachable!()
                };
                let n = m.len();
                let mut im: Vec<C64> = (0..n)
                    .map(|d| (m[d] - m[(n - d) % n].conj()) * C64::new(0.0, -0.5))
                    .collect();
                fft.fft1(&mut im);
                Ok(im.iter().map(|x| x.re).fold(f64::INFINITY, f64::min))
            }
        }
    }

    pub(crate) fn blend(&self, current: &Rep, proposal: &Rep, gamma: f64) -> Rep {
        let keep = 1.0 - gamma;
        match (current, proposal) {
            (Rep::Dense(a), Rep::Dense(b)) => {
                let mut out = a.mapv(|x| x * keep);
                out.zip_mut_with(b, |o, &p| *o += p * gamma);
                Rep::Dense(out)
            }
            (Rep::Diag(a), Rep::Diag(b)) => {
                Rep::Diag(Array1::from_shape_fn(a.len(), |i| {
                    a[i] * keep + b[i] * gamma
                }))
            }
            (Rep::Span(u1, v1), Rep::Span(u2, v2)) => {
                Rep::Span(u1 * keep + u2 * gamma, v1 * keep + v2 * gamma)
            }
            (Rep::Circ(a), Rep::Circ(b)) => Rep::Circ(
                a.iter()
                    .zip(b.iter())
                    .map(|(x, y)| x * keep + y * gamma)
                    .collect(),
            ),
            _ => unreachable!("blending mismatched representations"),
        }
    }

    pub(crate) fn trace(&self, m: &Rep) -> C64 {
        match m {
            Rep::Dense(m) => m.diag().sum(),
            Rep::Diag(m) => m.sum(),
            Rep::Span(u, v) => {
                let Mode::Span(basis) = &self.mode else {
                    unreachable!()
                };
                let tr_b: f64 = basis.b.diag().sum();
                u * self.n as f64 + v * tr_b
            }
            Rep::Circ(m) => m[0] * self.n as f64,
        }
    }

    pub(crate) fn to_dense(&self, m: &Rep) -> Array2<C64> {
        match m {
            Rep::Dense(m) => m.clone(),
            Rep::Diag(m) => {
                let mut out = Array2::zeros((self.n, self.n));
                for i in 0..self.n {
                    out[(i, i)] = m[i];
                }
                out
            }
            Rep::Span(u, v) => {
                let Mode::Span(basis) = &self.mode else {
                    unreachable!()
                };
                Array2::from_shape_fn((self.n, self.n), |(i, j)| {
                    let id = if i == j { *u } else { C64::new(0.0, 0.0) };
                    id + v * basis.b[(i, j)]
                })
            }
            Rep::Circ(m) => Array2::from_shape_fn((self.n, self.n), |(i, j)| {
                m[(self.n + i - j) % self.n]
            }),
        }
    }
}

/// Damped fixed-point loop at a fixed spectral parameter. The damping
/// factor starts at 1 and halves whenever a candidate step increases the
/// residual or loses positivity; reaching the floor with positivity lost is
/// an error, reaching it with positivity intact limps forward. Every
/// residual evaluation counts toward `max_iter`.
pub(crate) fn damped_solve(
    engine: &Engine,
    z: C64,
    start: Rep,
    tol: f64,
    max_iter: usize,
    total: &mut usize,
) -> Result<Rep> {
    let mut m = start;
    let mut res = engine.residual(z, &m)?;
    let mut imm = engine.im_min(&m)?;
    let mut gamma = 1.0f64;
    loop {
        if res.is_finite() && res <= tol && imm > 0.0 {
            return Ok(m);
        }
        if *total >= max_iter {
            return Err(MdeError::NonConvergence {
                residual: res,
                iterations: *total,
            });
        }
        let proposal = engine.fix_map(z, &m)?;
        loop {
            let cand = engine.blend(&m, &proposal, gamma);
            let cand_res = engine.residual(z, &cand)?;
            let cand_im = engine.im_min(&cand)?;
            *total += 1;
            if cand_res.is_finite() && cand_res <= res && cand_im > 0.0 {
                m = cand;
                res = cand_res;
                imm = cand_im;
                break;
            }
            gamma *= 0.5;
            if gamma < DAMPING_FLOOR {
                if cand_im <= 0.0 {
                    return Err(MdeError::PositivityLoss { iterations: *total });
                }
                m = cand;
                res = cand_res;
                imm = cand_im;
                break;
            }
            if *total >= max_iter {
                return Err(MdeError::NonConvergence {
                    residual: res,
                    iterations: *total,
                });
            }
        }
    }
}

/// Continuation from a large imaginary part down to the target, warm-started
/// rung to rung; or a direct warm-started solve when `warm` is given.
pub(crate) fn ladder_solve(
    engine: &Engine,
    z: C64,
    warm: Option<Rep>,
    tol: f64,
    max_iter: usize,
) -> Result<(Rep, usize)> {
    let mut total = 0usize;
    if let Some(start) = warm {
        let rep = damped_solve(engine, z, start, tol, max_iter, &mut total)?;
        return Ok((rep, total));
    }
    let target_eta = z.im;
    let mut eta = ETA_START.max(target_eta);
    let mut rep = engine.init(C64::new(z.re, eta));
    loop {
        let rung = C64::new(z.re, eta);
        rep = damped_solve(engine, rung, rep, tol, max_iter, &mut total)?;
        if eta <= target_eta {
            return Ok((rep, total));
        }
        eta = (eta * ETA_FACTOR).max(target_eta);
    }
}
