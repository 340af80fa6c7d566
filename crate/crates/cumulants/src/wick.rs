//! Wick (Appell) polynomials and the decoupling checks built on them.

use std::collections::HashMap;

use crate::partition::visit_partitions;
use crate::{joint_cumulant, kahan_sum, CumulantError, JointDistribution, Result};

/// Result of [`wick_expectation_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WickReport {
    /// `|E[ Π_y w · :x₁ ⊔ x₂: ]|` — exactly zero in exact arithmetic when the
    /// `x₁` group is independent of the rest.
    pub decoupling_residual: f64,
    /// Max over atoms of the defect in the symmetrized identity that writes
    /// the sum of centered first-argument expansions of `x₁ ⊔ x₂` through
    /// Wick polynomials of its sub-multisets.
    pub relation_residual: f64,
}

/// Evaluates the Wick polynomial `:w_{indices}:` of the selected coordinates
/// at one point (an atom's value vector): the sum over sub-multisets `S` of
/// the product of values over `S` times a signed cumulant-product sum over
/// set partitions of the complement,
/// `Σ_S (Π values_S) Σ_{P ⊢ complement} (−1)^{|P|} Π_B κ(B)`.
/// The empty index list yields 1.
pub fn wick_polynomial_at(
    dist: &JointDistribution,
    indices: &[usize],
    values: &[f64],
) -> Result<f64> {
    let mut cache = CumulantCache::default();
    wick_at_cached(dist, indices, values, &mut cache)
}

#[derive(Default)]
struct CumulantCache(HashMap<Vec<usize>, f64>);

impl CumulantCache {
    fn get(&mut self, dist: &JointDistribution, indices: &[usize]) -> Result<f64> {
        let mut key = indices.to_vec();
        key.sort_unstable();
        if let Some(&v) = self.0.get(&key) {
            return Ok(v);
        }
        let v = joint_cumulant(dist, &key)?;
        self.0.insert(key, v);
        Ok(v)
    }
}

fn wick_at_cached(
    dist: &JointDistribution,
    indices: &[usize],
    values: &[f64],
    cache: &mut CumulantCache,
) -> Result<f64> {
    let m = indices.len();
    if m > 16 {
        return Err(CumulantError::ComplexityLimit(format!(
            "Wick polynomial on {m} coordinates"
        )));
    }
    let mut terms: Vec<f64> = Vec::new();
    for mask in 0u32..(1u32 << m) {
        let mut prod = 1.0;
        let mut complement: Vec<usize> = Vec::with_capacity(m);
        for (pos, &idx) in indices.iter().enumerate() {
            if mask & (1 << pos) != 0 {
                prod *= values[idx];
            } else {
                complement.push(idx);
            }
        }
        terms.push(prod * signed_cumulant_sum(dist, &complement, cache)?);
    }
    Ok(kahan_sum(terms))
}

/// `Σ_{P ⊢ coords} (−1)^{|P|} Π_{B ∈ P} κ(coords_B)`; 1 for the empty list.
fn signed_cumulant_sum(
    dist: &JointDistribution,
    coords: &[usize],
    cache: &mut CumulantCache,
) -> Result<f64> {
    if coords.is_empty() {
        return Ok(1.0);
    }
    let mut failure: Option<CumulantError> = None;
    let mut terms: Vec<f64> = Vec::new();
    visit_partitions(coords.len(), |blocks| {
        if failure.is_some() {
            return;
        }
        let sign = if blocks.len() % 2 == 0 { 1.0 } else { -1.0 };
        let mut prod = sign;
        for block in blocks {
            let key: Vec<usize> = block.iter().map(|&pos| coords[pos]).collect();
            match cache.get(dist, &key) {
                Ok(v) => prod *= v,
                Err(e) => {
                    failure = Some(e);
                    return;
                }
            }
        }
        terms.push(prod);
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(kahan_sum(terms))
}

/// First-argument expansion value `K(w_x; w_{ys})` at one atom, computed in
/// its cumulant form: `κ(x, ys) + value_x · Π ys − Σ_{Y' ⊆ ys} (Π Y') κ(x, ys∖Y')`.
fn first_argument_expansion_at(
    dist: &JointDistribution,
    x: usize,
    ys: &[usize],
    values: &[f64],
    cache: &mut CumulantCache,
) -> Result<f64> {
    let m = ys.len();
    let mut full = vec![x];
    full.extend_from_slice(ys);
    let kappa_full = cache.get(dist, &full)?;
    let prod_all: f64 = ys.iter().map(|&j| values[j]).product();
    let mut terms: Vec<f64> = vec![kappa_full, values[x] * prod_all];
    for mask in 0u32..(1u32 << m) {
        let mut prod = 1.0;
        let mut rest = vec![x];
        for (pos, &j) in ys.iter().enumerate() {
            if mask & (1 << pos) != 0 {
                prod *= values[j];
            } else {
                rest.push(j);
            }
        }
        terms.push(-prod * cache.get(dist, &rest)?);
    }
    Ok(kahan_sum(terms))
}

/// Verifies the two Wick-polynomial decoupling facts on an exact finite
/// distribution, for a declared split of the coordinates into groups `x1`,
/// `x2`, `y`:
///
/// 1. when the `x1` group is independent of everything else (checked from the
///    atom structure; `PreconditionFailed` otherwise), the expectation of the
///    `y`-product against the Wick polynomial of `x1 ⊔ x2` vanishes — the
///    first report field is its absolute value;
/// 2. the symmetrized identity expressing the centered first-argument
///    expansions of `X = x1 ⊔ x2` through Wick polynomials,
///    `Σ_{x ∈ X} [K(x; X∖x) − κ(X)] = |X| ΠX − Σ_{X' ⊆ X} |X'| E[ΠX'] :X∖X':`,
///    holds pointwise — the second field is the worst atom defect.
pub fn wick_expectation_check(
    dist: &JointDistribution,
    x1: &[usize],
    x2: &[usize],
    y: &[usize],
) -> Result<WickReport> {
    let n = dist.n_vars();
    let mut seen = vec![false; n];
    for &i in x1.iter().chain(x2).chain(y) {
        if i >= n {
            return Err(CumulantError::InvalidArgument(format!(
                "index {i} out of range for {n} variables"
            )));
        }
        if seen[i] {
            return Err(CumulantError::InvalidArgument(
                "the three groups must be disjoint".into(),
            ));
        }
        seen[i] = true;
    }
    if x1.is_empty() {
        return Err(CumulantError::InvalidArgument(
            "the independent group x1 must be non-empty".into(),
        ));
    }
    let others: Vec<usize> = x2.iter().chain(y).copied().collect();
    check_product_structure(dist, x1, &others)?;

    let mut cache = CumulantCache::default();
    let wick_args: Vec<usize> = x1.iter().chain(x2).copied().collect();

    let decoupling_residual = kahan_sum(
        dist.atoms()
            .iter()
            .map(|atom| {
                let y_prod: f64 = y.iter().map(|&j| atom.v[j]).product();
                wick_at_cached(dist, &wick_args, &atom.v, &mut cache).map(|w| atom.p * y_prod * w)
            })
            .collect::<Result<Vec<f64>>>()?,
    )
    .abs();

    // Pointwise symmetrized relation on X = x1 ⊔ x2.
    let x_all = &wick_args;
    let kappa_x = cache.get(dist, x_all)?;
    let m = x_all.len();
    let mut relation_residual: f64 = 0.0;
    for atom in dist.atoms() {
        let mut lhs_terms: Vec<f64> = Vec::with_capacity(m);
        for (pos, &xi) in x_all.iter().enumerate() {
            let rest: Vec<usize> = x_all
                .iter()
                .enumerate()
                .filter(|&(q, _)| q != pos)
                .map(|(_, &j)| j)
                .collect();
            lhs_terms
                .push(first_argument_expansion_at(dist, xi, &rest, &atom.v, &mut cache)? - kappa_x);
        }
        let lhs = kahan_sum(lhs_terms);

        let prod_all: f64 = x_all.iter().map(|&j| atom.v[j]).product();
        let mut rhs_terms: Vec<f64> = vec![m as f64 * prod_all];
        for mask in 0u32..(1u32 << m) {
            let size = mask.count_ones() as f64;
            if size == 0.0 {
                continue;
            }
            let mut sub: Vec<usize> = Vec::new();
            let mut rest: Vec<usize> = Vec::new();
            for (pos, &j) in x_all.iter().enumerate() {
                if mask & (1 << pos) != 0 {
                    sub.push(j);
                } else {
                    rest.push(j);
                }
            }
            let mean_sub = dist.moment(&sub);
            let wick_rest = wick_at_cached(dist, &rest, &atom.v, &mut cache)?;
            rhs_terms.push(-size * mean_sub * wick_rest);
        }
        let rhs = kahan_sum(rhs_terms);
        relation_residual = relation_residual.max((lhs - rhs).abs());
    }

    Ok(WickReport {
        decoupling_residual,
        relation_residual,
    })
}

/// Requires the joint law of the `left` coordinates and the `right`
/// coordinates to factorize: `P(u, v) = P(u) P(v)` for every pair of
/// marginal support points, to 1e-12.
fn check_product_structure(
    dist: &JointDistribution,
    left: &[usize],
    right: &[usize],
) -> Result<()> {
    if right.is_empty() {
        return Ok(());
    }
    let key = |v: &[f64], coords: &[usize]| -> Vec<u64> {
        coords.iter().map(|&c| v[c].to_bits()).collect()
    };
    let mut p_joint: HashMap<(Vec<u64>, Vec<u64>), f64> = HashMap::new();
    let mut p_left: HashMap<Vec<u64>, f64> = HashMap::new();
    let mut p_right: HashMap<Vec<u64>, f64> = HashMap::new();
    for atom in dist.atoms() {
        let u = key(&atom.v, left);
        let v = key(&atom.v, right);
        *p_joint.entry((u.clone(), v.clone())).or_insert(0.0) += atom.p;
        *p_left.entry(u).or_insert(0.0) += atom.p;
        *p_right.entry(v).or_insert(0.0) += atom.p;
    }
    for (u, pu) in &p_left {
        for (v, pv) in &p_right {
            let joint = p_joint
                .get(&(u.clone(), v.clone()))
                .copied()
                .unwrap_or(0.0);
            if (joint - pu * pv).abs() > 1e-12 {
                return Err(CumulantError::PreconditionFailed(
                    "declared-independent groups are correlated in the atom structure".into(),
                ));
            }
        }
    }
    Ok(())
}
