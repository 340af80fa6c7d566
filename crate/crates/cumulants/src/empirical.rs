//! Plug-in empirical cumulants from sampled data.

use std::collections::HashMap;

use crate::cumulant::cumulant_from_moments;
use crate::{kahan_sum, CumulantError, Result};

/// Cap on the cumulant order of the empirical estimator.
pub const MAX_EMPIRICAL_INDICES: usize = 6;

/// Result of [`empirical_cumulant`]: the plug-in estimate, a batch-means
/// standard error, and a degeneracy flag raised when every referenced column
/// is constant (the estimate is still returned; it is exactly the cumulant of
/// the degenerate empirical measure).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalCumulant {
    pub value: f64,
    pub std_error: f64,
    pub degenerate: bool,
}

/// Plug-in cumulant estimate: the exact joint cumulant of the empirical
/// measure of the sample (no small-sample bias correction), consistent as the
/// sample count grows. `data` holds the draws row-major: sample `s`, variable
/// `j` at `data[s * n_vars + j]`. The standard error is estimated by
/// splitting the sample into up to 16 batches, estimating on each, and taking
/// the spread of the batch estimates.
pub fn empirical_cumulant(
    data: &[f64],
    n_vars: usize,
    indices: &[usize],
) -> Result<EmpiricalCumulant> {
    if n_vars == 0 || data.len() % n_vars != 0 {
        return Err(CumulantError::InvalidArgument(format!(
            "data length {} is not a multiple of the variable count {n_vars}",
            data.len()
        )));
    }
    let samples = data.len() / n_vars;
    if samples < 2 {
        return Err(CumulantError::InvalidArgument(
            "need at least two samples".into(),
        ));
    }
    if indices.is_empty() || indices.len() > MAX_EMPIRICAL_INDICES {
        return Err(CumulantError::InvalidArgument(format!(
            "index count must be in 1..={MAX_EMPIRICAL_INDICES}"
        )));
    }
    for &i in indices {
        if i >= n_vars {
            return Err(CumulantError::InvalidArgument(format!(
                "index {i} out of range for {n_vars} variables"
            )));
        }
    }

    let degenerate = indices.iter().any(|&j| {
        let first = data[j];
        (1..samples).all(|s| data[s * n_vars + j] == first)
    });

    let mut idx = indices.to_vec();
    idx.sort_unstable();

    let value = plug_in(data, n_vars, 0, samples, &idx)?;

    let batches = 16.min(samples / 2).max(2);
    let batch_len = samples / batches;
    let mut estimates = Vec::with_capacity(batches);
    for b in 0..batches {
        let lo = b * batch_len;
        let hi = if b + 1 == batches {
            samples
        } else {
            lo + batch_len
        };
        estimates.push(plug_in(data, n_vars, lo, hi, &idx)?);
    }
    let mean = kahan_sum(estimates.iter().copied()) / batches as f64;
    let var = kahan_sum(estimates.iter().map(|e| (e - mean) * (e - mean)))
        / (batches as f64 - 1.0);
    let std_error = (var / batches as f64).sqrt();

    Ok(EmpiricalCumulant {
        value,
        std_error,
        degenerate,
    })
}

/// Joint cumulant of the empirical measure of rows `lo..hi`.
fn plug_in(data: &[f64], n_vars: usize, lo: usize, hi: usize, idx: &[usize]) -> Result<f64> {
    let count = (hi - lo) as f64;
    let mut cache: HashMap<Vec<usize>, f64> = HashMap::new();
    cumulant_from_moments(idx.len(), |block| {
        let key: Vec<usize> = block.iter().map(|&pos| idx[pos]).collect();
        *cache.entry(key).or_insert_with_key(|key| {
            kahan_sum((lo..hi).map(|s| {
                let row = &data[s * n_vars..(s + 1) * n_vars];
                key.iter().map(|&j| row[j]).product::<f64>()
            })) / count
        })
    })
}
