//! Circular FFT helpers on the two-dimensional torus `[n] x [n]`.
//!
//! The moving-average ensembles and their self-energy operators are built
//! from circular convolutions; everything here keeps the plain rustfft
//! convention (forward unnormalized, inverse divided by the length).

use crate::C64;
use ndarray::Array2;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Planned forward/inverse transforms for an `n x n` torus.
pub struct TorusFft {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl TorusFft {
    /// Plan transforms for side length `n`.
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        TorusFft { n, fwd, inv }
    }

    /// Side length the plan was built for.
    pub fn len(&self) -> usize {
        self.n
    }

    /// True when planned for an empty side length (never in practice).
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    fn transform_rows(&self, a: &mut Array2<C64>, inverse: bool) {
        let fft = if inverse { &self.inv } else { &self.fwd };
        for mut row in a.rows_mut() {
            let slice = row.as_slice_mut().expect("row-major layout");
            fft.process(slice);
        }
    }

    fn transform_cols(&self, a: &mut Array2<C64>, inverse: bool) {
        let fft = if inverse { &self.inv } else { &self.fwd };
        let n = self.n;
        let mut scratch = vec![C64::new(0.0, 0.0); n];
        for j in 0..n {
            for i in 0..n {
                scratch[i] = a[(i, j)];
            }
            fft.process(&mut scratch);
            for i in 0..n {
                a[(i, j)] = scratch[i];
            }
        }
    }

    /// In-place unnormalized 1-D forward transform of one length-`n` vector.
    pub fn fft1(&self, v: &mut [C64]) {
        assert_eq!(v.len(), self.n, "vector length must match the plan");
        self.fwd.process(v);
    }

    /// In-place normalized 1-D inverse transform of one length-`n` vector.
    pub fn ifft1(&self, v: &mut [C64]) {
        assert_eq!(v.len(), self.n, "vector length must match the plan");
        self.inv.process(v);
        let scale = 1.0 / self.n as f64;
        for x in v.iter_mut() {
            *x *= scale;
        }
    }

    /// In-place unnormalized 2-D forward transform.
    pub fn fft2(&self, a: &mut Array2<C64>) {
        assert_eq!(a.nrows(), self.n);
        assert_eq!(a.ncols(), self.n);
        self.transform_rows(a, false);
        self.transform_cols(a, false);
    }

    /// In-place normalized 2-D inverse transform (divides by `n^2`).
    pub fn ifft2(&self, a: &mut Array2<C64>) {
        assert_eq!(a.nrows(), self.n);
        assert_eq!(a.ncols(), self.n);
        self.transform_rows(a, true);
        self.transform_cols(a, true);
        let scale = 1.0 / (self.n as f64 * self.n as f64);
        a.mapv_inplace(|v| v * scale);
    }

    /// Forward transform of a real field.
    pub fn fft2_real(&self, a: &Array2<f64>) -> Array2<C64> {
        let mut hat = a.mapv(|x| C64::new(x, 0.0));
        self.fft2(&mut hat);
        hat
    }

    /// Circular 2-D convolution `(a * b)(x) = sum_y a(y) b(x - y)` of two
    /// real fields, both indexed over the torus.
    pub fn convolve2_real(&self, a: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
        let mut a_hat = self.fft2_real(a);
        let b_hat = self.fft2_real(b);
        for (va, vb) in a_hat.iter_mut().zip(b_hat.iter()) {
            *va *= *vb;
        }
        self.ifft2(&mut a_hat);
        a_hat.mapv(|v| v.re)
    }

    /// Circular autocorrelation `(k ⋆ k)(d) = sum_e k(e) k(e + d)`.
    pub fn autocorrelate2(&self, k: &Array2<f64>) -> Array2<f64> {
        let mut k_hat = self.fft2_real(k);
        for v in k_hat.iter_mut() {
            let m = v.norm_sqr();
            *v = C64::new(m, 0.0);
        }
        self.ifft2(&mut k_hat);
        k_hat.mapv(|v| v.re)
    }

    /// Circular 2-D convolution of a complex field `v` with a real kernel
    /// whose forward transform `k_hat` was precomputed.
    pub fn convolve2_with_hat(&self, k_hat: &Array2<C64>, v: &Array2<C64>) -> Array2<C64> {
        let mut v_hat = v.as_standard_layout().into_owned();
        self.fft2(&mut v_hat);
        for (vv, kk) in v_hat.iter_mut().zip(k_hat.iter()) {
            *vv *= *kk;
        }
        self.ifft2(&mut v_hat);
        v_hat
    }
}

/// Unnormalized 1-D DFT of a complex vector (direct `O(n^2)` evaluation;
/// used on short circulant symbols where planning overhead is not worth it).
pub fn dft_direct(v: &[C64], inverse: bool) -> Vec<C64> {
    let n = v.len();
    let sign = if inverse { 1.0 } else { -1.0 };
    let mut out = vec![C64::new(0.0, 0.0); n];
    for (k, o) in out.iter_mut().enumerate() {
        let mut acc = C64::new(0.0, 0.0);
        for (j, &x) in v.iter().enumerate() {
            let ang = sign * 2.0 * std::f64::consts::PI * (k * j % n) as f64 / n as f64;
            acc += x * C64::new(ang.cos(), ang.sin());
        }
        *o = if inverse { acc / n as f64 } else { acc };
    }
    out
}
