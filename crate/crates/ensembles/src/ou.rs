//! Ornstein–Uhlenbeck flow toward the model: Euler–Maruyama integration of
//! `dH = −½ (H − A) dt + dB/√N`, where the increments carry the model's
//! correlation structure.

use numerics::rng::stream;

use crate::model::{expectation_matrix, CorrelationModel, Symmetry};
use crate::sample::{noise_complex, noise_real, MatrixSample};
use crate::{EnsembleError, Result};

/// The result of one flow integration.
#[derive(Debug, Clone)]
pub struct OuFlow {
    pub matrix: MatrixSample,
    pub steps: usize,
    pub dt: f64,
}

/// Evolves `h0` for time `t`. The step size is `min(0.01, t/100)` rounded
/// so the steps tile `[0, t]` exactly; step `i` draws its increment from
/// `stream(seed, i)`.
pub fn ou_evolve(
    model: &CorrelationModel,
    h0: &MatrixSample,
    t: f64,
    seed: u64,
) -> Result<OuFlow> {
    if !t.is_finite() || t < 0.0 {
        return Err(EnsembleError::InvalidArgument(format!(
            "flow time must be finite and nonnegative, got {t}"
        )));
    }
    let n = model.n();
    if h0.n() != n {
        return Err(EnsembleError::InvalidArgument(format!(
            "initial matrix is {}-dimensional, model expects {n}",
            h0.n()
        )));
    }
    if t == 0.0 {
        return Ok(OuFlow {
            matrix: h0.clone(),
            steps: 0,
            dt: 0.0,
        });
    }
    let dt_ceiling = (0.01_f64).min(t / 100.0);
    let steps = (t / dt_ceiling).ceil() as usize;
    let dt = t / steps as f64;
    let noise_scale = dt.sqrt() / (n as f64).sqrt();
    let a = expectation_matrix(model)?;
    match (model.symmetry(), h0) {
        (Symmetry::RealSymmetric, MatrixSample::Real(h0)) => {
            let mut h = h0.clone();
            for step in 0..steps {
                let mut rng = stream(seed, step as u64);
                let w = noise_real(model, &mut rng)?;
                ndarray::Zip::from(&mut h).and(&a).and(&w).for_each(
                    |hv, &av, &wv| {
                        *hv += -0.5 * (*hv - av) * dt + noise_scale * wv;
                    },
                );
            }
            Ok(OuFlow {
                matrix: MatrixSample::Real(h),
                steps,
                dt,
            })
        }
        (Symmetry::ComplexHermitian, MatrixSample::Complex(h0)) => {
            let mut h = h0.clone();
            for step in 0..steps {
                let mut rng = stream(seed, step as u64);
                let w = noise_complex(model, &mut rng)?;
                ndarray::Zip::from(&mut h).and(&a).and(&w).for_each(
                    |hv, &av, &wv| {
                        *hv += (av - *hv) * (0.5 * dt) + wv * noise_scale;
                    },
                );
            }
            Ok(OuFlow {
                matrix: MatrixSample::Complex(h),
                steps,
                dt,
            })
        }
        _ => Err(EnsembleError::InvalidArgument(
            "initial matrix symmetry class does not match the model".into(),
        )),
    }
}
