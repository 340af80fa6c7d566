//! Deterministic probe vectors for the sup-over-unit-vector estimators.

use ndarray::Array1;
use numerics::rng;

/// A fixed collection of unit vectors over which suprema are estimated:
/// every coordinate vector (exact witnesses for delta-structured kernels),
/// the constant vector (exact witness for tile-copy kernels), and `4N`
/// seeded random unit vectors (randomized coverage of the sphere). The
/// same set is reused across all norms of one audit so the reported
/// values are reproducible from the seed alone.
#[derive(Clone)]
pub struct ProbeSet {
    vectors: Vec<Array1<f64>>,
}

impl ProbeSet {
    /// The standard probe set for dimension `n`: `n` coordinate vectors,
    /// the constant unit vector, and `4n` random unit vectors drawn from
    /// the stream for `seed`.
    pub fn standard(n: usize, seed: u64) -> Self {
        let mut vectors = Vec::with_capacity(5 * n + 1);
        for i in 0..n {
            let mut e = Array1::zeros(n);
            e[i] = 1.0;
            vectors.push(e);
        }
        vectors.push(Array1::from_elem(n, 1.0 / (n as f64).sqrt()));
        let mut r = rng::stream(seed, 0x5072_6f62);
        for _ in 0..4 * n {
            vectors.push(rng::unit_vector(&mut r, n));
        }
        ProbeSet { vectors }
    }

    /// A probe set over caller-supplied vectors, for targeted estimates
    /// with fewer or structured probes.
    pub fn from_vectors(vectors: Vec<Array1<f64>>) -> Self {
        ProbeSet { vectors }
    }

    pub fn vectors(&self) -> &[Array1<f64>] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}
