//! Joint cumulants, cumulant tables, and the cumulant-to-moment inversion.

use std::collections::HashMap;

use itertools::Itertools;

use crate::partition::{mobius_weight, visit_partitions};
use crate::{kahan_sum, CumulantError, JointDistribution, Result};

/// Cap on the number of (multiset) indices accepted by [`joint_cumulant`];
/// the partition sum has Bell-number many terms.
pub const MAX_CUMULANT_INDICES: usize = 10;

/// Core partition sum shared by the exact and the empirical estimator:
/// `Σ_P (−1)^{|P|−1} (|P|−1)! · Π_{blocks B of P} moment_of(B)`, where `P`
/// runs over all set partitions of the `m` index positions and `moment_of`
/// receives the positions of one block (ascending).
pub fn cumulant_from_moments<F: FnMut(&[usize]) -> f64>(m: usize, mut moment_of: F) -> Result<f64> {
    if m == 0 {
        return Err(CumulantError::InvalidArgument(
            "cumulant needs at least one index".into(),
        ));
    }
    if m > MAX_CUMULANT_INDICES {
        return Err(CumulantError::ComplexityLimit(format!(
            "cumulant order {m} exceeds cap {MAX_CUMULANT_INDICES}"
        )));
    }
    let mut terms: Vec<f64> = Vec::new();
    visit_partitions(m, |blocks| {
        let weight = mobius_weight(blocks.len()) as f64;
        let mut prod = weight;
        for block in blocks {
            prod *= moment_of(block);
        }
        terms.push(prod);
    })?;
    Ok(kahan_sum(terms))
}

/// Joint cumulant `κ(w_{i_1}, …, w_{i_m})` of the selected coordinates of a
/// finite-atom distribution, computed exactly as a Möbius-weighted sum of
/// block moments over all set partitions of the index positions. Indices are
/// a multiset: repeats raise the corresponding coordinate to a power.
/// Invariant under any permutation of `indices` (they are sorted internally,
/// so permutations yield bit-identical results).
pub fn joint_cumulant(dist: &JointDistribution, indices: &[usize]) -> Result<f64> {
    for &i in indices {
        if i >= dist.n_vars() {
            return Err(CumulantError::InvalidArgument(format!(
                "index {i} out of range for {} variables",
                dist.n_vars()
            )));
        }
    }
    let mut idx = indices.to_vec();
    idx.sort_unstable();
    // Cache block moments by their (sorted) coordinate multiset: across the
    // Bell-number many partitions only 2^m distinct blocks occur.
    let mut cache: HashMap<Vec<usize>, f64> = HashMap::new();
    cumulant_from_moments(idx.len(), |block| {
        let key: Vec<usize> = block.iter().map(|&pos| idx[pos]).collect();
        *cache
            .entry(key)
            .or_insert_with_key(|key| dist.moment(key))
    })
}

/// A table of cumulant values for index multisets up to a fixed order. Keys
/// are stored sorted, making lookups permutation-invariant.
#[derive(Debug, Clone, Default)]
pub struct CumulantTable {
    order: usize,
    entries: HashMap<Vec<usize>, f64>,
}

impl CumulantTable {
    pub fn new(order: usize) -> Self {
        Self {
            order,
            entries: HashMap::new(),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn insert(&mut self, indices: &[usize], value: f64) {
        let mut key = indices.to_vec();
        key.sort_unstable();
        self.entries.insert(key, value);
    }

    pub fn get(&self, indices: &[usize]) -> Option<f64> {
        let mut key = indices.to_vec();
        key.sort_unstable();
        self.entries.get(&key).copied()
    }

    /// Tabulates every cumulant of `dist` on index multisets of size ≤ `order`.
    pub fn from_distribution(dist: &JointDistribution, order: usize) -> Result<Self> {
        let mut table = Self::new(order);
        for m in 1..=order {
            for combo in (0..dist.n_vars()).combinations_with_replacement(m) {
                let value = joint_cumulant(dist, &combo)?;
                table.entries.insert(combo, value);
            }
        }
        Ok(table)
    }

    /// The table of a Gaussian vector: first order = `means`, second order =
    /// `cov`, all higher orders zero up to `order`.
    pub fn gaussian(means: &[f64], cov: &[Vec<f64>], order: usize) -> Result<Self> {
        let n = means.len();
        if cov.len() != n || cov.iter().any(|row| row.len() != n) {
            return Err(CumulantError::InvalidArgument(
                "covariance shape does not match means".into(),
            ));
        }
        let mut table = Self::new(order);
        for m in 1..=order {
            for combo in (0..n).combinations_with_replacement(m) {
                let value = match combo.as_slice() {
                    [i] => means[*i],
                    [i, j] => cov[*i][*j],
                    _ => 0.0,
                };
                table.entries.insert(combo, value);
            }
        }
        Ok(table)
    }
}

/// Raw mixed moment from a cumulant table:
/// `E[Π w_indices] = Σ_P Π_{blocks B} κ(indices restricted to B)` over all
/// set partitions `P` of the index positions. Fails with `IncompleteTable`
/// if any required block cumulant is absent.
pub fn moments_from_cumulants(table: &CumulantTable, indices: &[usize]) -> Result<f64> {
    if indices.is_empty() {
        return Err(CumulantError::InvalidArgument(
            "moment needs at least one index".into(),
        ));
    }
    if indices.len() > MAX_CUMULANT_INDICES {
        return Err(CumulantError::ComplexityLimit(format!(
            "moment order {} exceeds cap {MAX_CUMULANT_INDICES}",
            indices.len()
        )));
    }
    let mut idx = indices.to_vec();
    idx.sort_unstable();
    let mut missing: Option<Vec<usize>> = None;
    let mut terms: Vec<f64> = Vec::new();
    visit_partitions(idx.len(), |blocks| {
        if missing.is_some() {
            return;
        }
        let mut prod = 1.0;
        for block in blocks {
            let key: Vec<usize> = block.iter().map(|&pos| idx[pos]).collect();
            match table.get(&key) {
                Some(v) => prod *= v,
                None => {
                    missing = Some(key);
                    return;
                }
            }
        }
        terms.push(prod);
    })?;
    if let Some(key) = missing {
        return Err(CumulantError::IncompleteTable(key));
    }
    Ok(kahan_sum(terms))
}
