//! Deterministic random-number streams.
//!
//! Every sampled object in the lab draws from a counter-style stream: sample
//! `i` of a run seeded with `seed` uses an independent ChaCha8 generator
//! keyed by the pair `(seed, i)`. The pair maps injectively into the cipher
//! key, so distinct `(seed, index)` pairs never share a stream, and
//! reordering or parallelizing a sample loop never changes any individual
//! sample.

use ndarray::Array1;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// The generator for sample `index` of a run with base seed `seed`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&index.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// `n` iid standard normal draws.
pub fn standard_normal_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// A uniformly random real unit vector (normalized Gaussian).
pub fn unit_vector(rng: &mut ChaCha8Rng, n: usize) -> Array1<f64> {
    loop {
        let v = Array1::from_vec(standard_normal_vec(rng, n));
        let norm = v.dot(&v).sqrt();
        if norm > 1e-12 {
            return v / norm;
        }
    }
}

/// A uniformly random complex unit vector.
pub fn complex_unit_vector(rng: &mut ChaCha8Rng, n: usize) -> Array1<crate::C64> {
    loop {
        let re = standard_normal_vec(rng, n);
        let im = standard_normal_vec(rng, n);
        let v = Array1::from_iter(
            re.iter()
                .zip(im.iter())
                .map(|(&a, &b)| crate::C64::new(a, b)),
        );
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.mapv(|x| x / norm);
        }
    }
}

/// Uniform draw from `[0, 1)`.
pub fn uniform01(rng: &mut ChaCha8Rng) -> f64 {
    rng.random::<f64>()
}
