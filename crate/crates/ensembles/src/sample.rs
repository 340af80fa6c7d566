//! Drawing matrices `H = A + W/√N` from a model, deterministically in the
//! seed and with the symmetry enforced exactly (both tied entries are
//! assigned from the same draws, so Hermiticity holds to the last bit).

use ndarray::Array2;
use numerics::rng::stream;
use numerics::C64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::kernel::metric_profile;
use crate::model::{expectation_matrix, CorrelationModel, ModelKind, Symmetry};
use crate::{EnsembleError, Result};

/// One drawn matrix, in the model's symmetry class.
#[derive(Debug, Clone)]
pub enum MatrixSample {
    Real(Array2<f64>),
    Complex(Array2<C64>),
}

impl MatrixSample {
    pub fn n(&self) -> usize {
        match self {
            MatrixSample::Real(h) => h.nrows(),
            MatrixSample::Complex(h) => h.nrows(),
        }
    }

    /// The sample as a complex matrix regardless of class.
    pub fn into_complex(self) -> Array2<C64> {
        match self {
            MatrixSample::Real(h) => h.mapv(|x| C64::new(x, 0.0)),
            MatrixSample::Complex(h) => h,
        }
    }
}

/// Draws the sample for `seed`, consuming the random stream
/// `stream(seed, 0)`; run drivers derive per-sample seeds as `seed ^ i`.
pub fn sample_matrix(model: &CorrelationModel, seed: u64) -> Result<MatrixSample> {
    match model.symmetry() {
        Symmetry::RealSymmetric => Ok(MatrixSample::Real(sample_real(model, seed)?)),
        Symmetry::ComplexHermitian => Ok(MatrixSample::Complex(sample_complex(model, seed)?)),
    }
}

/// Real-symmetric draw `A + W/√N`.
pub fn sample_real(model: &CorrelationModel, seed: u64) -> Result<Array2<f64>> {
    if model.symmetry() != Symmetry::RealSymmetric {
        return Err(EnsembleError::InvalidArgument(
            "model is in the complex Hermitian class; use sample_complex".into(),
        ));
    }
    let mut rng = stream(seed, 0);
    let w = noise_real(model, &mut rng)?;
    let scale = 1.0 / (model.n() as f64).sqrt();
    let mut h = expectation_matrix(model)?;
    h.zip_mut_with(&w, |a, wv| *a += wv * scale);
    Ok(h)
}

/// Complex Hermitian draw `A + W/√N` (the expectation matrix stays real).
pub fn sample_complex(model: &CorrelationModel, seed: u64) -> Result<Array2<C64>> {
    if model.symmetry() != Symmetry::ComplexHermitian {
        return Err(EnsembleError::InvalidArgument(
            "model is in the real symmetric class; use sample_real".into(),
        ));
    }
    let mut rng = stream(seed, 0);
    let w = noise_complex(model, &mut rng)?;
    let scale = 1.0 / (model.n() as f64).sqrt();
    let a = expectation_matrix(model)?;
    let mut h = a.mapv(|x| C64::new(x, 0.0));
    h.zip_mut_with(&w, |hv, wv| *hv += wv * scale);
    Ok(h)
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// The unnormalized noise `W` for a real-symmetric model: unit-variance
/// off-diagonal entries in the sense of the model's two-point kernel.
pub(crate) fn noise_real(model: &CorrelationModel, rng: &mut ChaCha8Rng) -> Result<Array2<f64>> {
    let n = model.n();
    match model.kind() {
        ModelKind::Wigner | ModelKind::Deformed => {
            let g = gaussian_matrix(rng, n);
            let mut w = Array2::zeros((n, n));
            for a in 0..n {
                for b in 0..n {
                    w[(a, b)] = (g[(a, b)] + g[(b, a)]) / std::f64::consts::SQRT_2;
                }
            }
            Ok(w)
        }
        ModelKind::Fourfold => {
            let g = gaussian_matrix(rng, n);
            let neg = |x: usize| (n - x) % n;
            // Assign each symmetry orbit from one computed value so the
            // tied entries are bit-identical.
            let mut w = Array2::zeros((n, n));
            let mut set = vec![false; n * n];
            for a in 0..n {
                for b in 0..n {
                    if set[a * n + b] {
                        continue;
                    }
                    let v = 0.5
                        * (g[(a, b)] + g[(b, a)] + g[(neg(a), neg(b))] + g[(neg(b), neg(a))]);
                    for (x, y) in [(a, b), (b, a), (neg(a), neg(b)), (neg(b), neg(a))] {
                        w[(x, y)] = v;
                        set[x * n + y] = true;
                    }
                }
            }
            Ok(w)
        }
        ModelKind::BlockCopy { n_blocks } => {
            let m = n / n_blocks;
            // One shared symmetric tile with every entry (diagonal included)
            // of unit variance.
            let mut tile = Array2::zeros((m, m));
            for x in 0..m {
                for y in x..m {
                    let v = gauss(rng);
                    tile[(x, y)] = v;
                    tile[(y, x)] = v;
                }
            }
            let mut w = Array2::zeros((n, n));
            for a in 0..n {
                for b in 0..n {
                    w[(a, b)] = tile[(a % m, b % m)];
                }
            }
            Ok(w)
        }
        ModelKind::GaussianMetricDecay { s } => {
            let u = metric_field(rng, n, *s);
            let mut w = Array2::zeros((n, n));
            for a in 0..n {
                for b in 0..n {
                    w[(a, b)] = (u[(a, b)] + u[(b, a)]) / std::f64::consts::SQRT_2;
                }
            }
            Ok(w)
        }
        ModelKind::Custom { kappa } => {
            if n > 16 {
                return Err(EnsembleError::Unsupported(format!(
                    "explicit-tensor sampling factorizes an N²×N² covariance \
                     and is capped at dimension 16; got {n}"
                )));
            }
            let dim = n * n;
            let (vals, vecs) = numerics::sym_eigen(kappa)?;
            let max_val = vals.iter().cloned().fold(0.0_f64, f64::max);
            let floor = -1e-8 * max_val.max(1.0);
            for &v in vals.iter() {
                if v < floor {
                    return Err(EnsembleError::InvalidArgument(format!(
                        "custom tensor is not positive semidefinite \
                         (eigenvalue {v:.3e})"
                    )));
                }
            }
            let xi: Vec<f64> = (0..dim).map(|_| gauss(rng)).collect();
            let mut flat = vec![0.0; dim];
            for (j, &lam) in vals.iter().enumerate() {
                let amp = lam.max(0.0).sqrt() * xi[j];
                if amp != 0.0 {
                    for (i, f) in flat.iter_mut().enumerate() {
                        *f += vecs[(i, j)] * amp;
                    }
                }
            }
            let mut w = Array2::zeros((n, n));
            for a in 0..n {
                for b in 0..n {
                    // The tensor's transpose symmetry makes the field
                    // symmetric almost surely; enforce it exactly.
                    w[(a, b)] = 0.5 * (flat[a * n + b] + flat[b * n + a]);
                }
            }
            Ok(w)
        }
    }
}

/// The unnormalized noise `W` for a complex Hermitian model.
pub(crate) fn noise_complex(
    model: &CorrelationModel,
    rng: &mut ChaCha8Rng,
) -> Result<Array2<C64>> {
    let n = model.n();
    match model.kind() {
        ModelKind::Wigner | ModelKind::Deformed => {
            let mut w = Array2::zeros((n, n));
            for a in 0..n {
                w[(a, a)] = C64::new(gauss(rng), 0.0);
                for b in (a + 1)..n {
                    let v = C64::new(gauss(rng), gauss(rng)) / std::f64::consts::SQRT_2;
                    w[(a, b)] = v;
                    w[(b, a)] = v.conj();
                }
            }
            Ok(w)
        }
        ModelKind::BlockCopy { n_blocks } => {
            let m = n / n_blocks;
            let mut tile = Array2::zeros((m, m));
            for x in 0..m {
                tile[(x, x)] = C64::new(gauss(rng), 0.0);
                for y in (x + 1)..m {
                    let v = C64::new(gauss(rng), gauss(rng)) / std::f64::consts::SQRT_2;
                    tile[(x, y)] = v;
                    tile[(y, x)] = v.conj();
                }
            }
            let mut w = Array2::zeros((n, n));
            for a in 0..n {
                for b in 0..n {
                    w[(a, b)] = tile[(a % m, b % m)];
                }
            }
            Ok(w)
        }
        ModelKind::GaussianMetricDecay { s } => {
            let u1 = metric_field(rng, n, *s);
            let u2 = metric_field(rng, n, *s);
            let mut w = Array2::zeros((n, n));
            for a in 0..n {
                for b in 0..n {
                    // (u + u†)/√2 with u = (u1 + i u2)/√2.
                    w[(a, b)] = C64::new(
                        0.5 * (u1[(a, b)] + u1[(b, a)]),
                        0.5 * (u2[(a, b)] - u2[(b, a)]),
                    );
                }
            }
            Ok(w)
        }
        ModelKind::Fourfold | ModelKind::Custom { .. } => Err(EnsembleError::Unsupported(
            format!(
                "the {} kind has no complex Hermitian class",
                model.kind().name()
            ),
        )),
    }
}

fn gaussian_matrix(rng: &mut ChaCha8Rng, n: usize) -> Array2<f64> {
    let mut g = Array2::zeros((n, n));
    for a in 0..n {
        for b in 0..n {
            g[(a, b)] = gauss(rng);
        }
    }
    g
}

/// A stationary Gaussian field on the torus: white noise convolved with the
/// normalized decay profile, so each entry has unit variance and covariance
/// given by the profile autocorrelation.
fn metric_field(rng: &mut ChaCha8Rng, n: usize, s: f64) -> Array2<f64> {
    let fft = numerics::fft::TorusFft::new(n);
    let k = metric_profile(n, s);
    let g = gaussian_matrix(rng, n);
    fft.convolve2_real(&k, &g)
}
