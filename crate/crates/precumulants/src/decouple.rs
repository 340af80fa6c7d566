//! The decoupling identity: how the expansion kernel splits across two
//! companion groups.

use std::collections::HashMap;

use cumulants::{joint_cumulant, JointDistribution};

use crate::precum::kernel_pointwise;
use crate::{kahan_sum, PrecumulantError, Result};

/// Cap on the combined companion count for the decoupling check.
pub const MAX_DECOUPLING_COMPANIONS: usize = 5;

struct Sides {
    lhs: Vec<f64>,
    rhs: Vec<f64>,
    correction: Vec<f64>,
}

/// Evaluates, atom by atom, both sides of the identity
///
/// `K(X; Y⊔Z) − κ(X, Y⊔Z)
///    = (ΠZ)[K(X; Y) − κ(X, Y)]
///      − Σ_{Y'⊆Y, Z'⊊Z} (ΠY')(ΠZ') κ(X, (Y∖Y') ⊔ (Z∖Z'))`,
///
/// where `Y'` ranges over all position subsets of `ys` and `Z'` over all
/// proper position subsets of `zs`. Returns the per-atom left side, right
/// side, and the subtracted correction sum.
fn evaluate_sides(
    dist: &JointDistribution,
    x: usize,
    ys: &[usize],
    zs: &[usize],
) -> Result<Sides> {
    let total = ys.len() + zs.len();
    if total > MAX_DECOUPLING_COMPANIONS {
        return Err(PrecumulantError::ComplexityLimit(format!(
            "{total} companions exceed the decoupling cap {MAX_DECOUPLING_COMPANIONS}"
        )));
    }
    if ys.iter().any(|j| zs.contains(j)) {
        return Err(PrecumulantError::InvalidArgument(
            "the two companion groups must name disjoint variables".into(),
        ));
    }
    let combined: Vec<usize> = ys.iter().chain(zs).copied().collect();
    let k_full = kernel_pointwise(dist, x, &combined)?;
    let k_ys = kernel_pointwise(dist, x, ys)?;

    let mut cum_cache: HashMap<Vec<usize>, f64> = HashMap::new();
    let mut kappa = |coords: Vec<usize>| -> Result<f64> {
        let mut key = coords;
        key.sort_unstable();
        if let Some(&v) = cum_cache.get(&key) {
            return Ok(v);
        }
        let v = joint_cumulant(dist, &key)?;
        cum_cache.insert(key, v);
        Ok(v)
    };

    let mut full_coords = vec![x];
    full_coords.extend_from_slice(&combined);
    let kappa_full = kappa(full_coords)?;
    let mut y_coords = vec![x];
    y_coords.extend_from_slice(ys);
    let kappa_ys = kappa(y_coords)?;

    // Precompute the cumulants κ(X, (Y∖Y') ⊔ (Z∖Z')) for every pair of masks.
    let my = ys.len();
    let mz = zs.len();
    let mut corr_kappa = vec![vec![0.0f64; 1 << mz]; 1 << my];
    for ymask in 0u32..(1 << my) {
        for zmask in 0u32..(1 << mz) {
            if zmask == (1u32 << mz) - 1 {
                continue; // Z' = Z excluded (proper subsets only)
            }
            let mut coords = vec![x];
            for (pos, &j) in ys.iter().enumerate() {
                if ymask & (1 << pos) == 0 {
                    coords.push(j);
                }
            }
            for (pos, &j) in zs.iter().enumerate() {
                if zmask & (1 << pos) == 0 {
                    coords.push(j);
                }
            }
            corr_kappa[ymask as usize][zmask as usize] = kappa(coords)?;
        }
    }

    let mut lhs = Vec::with_capacity(dist.atoms().len());
    let mut rhs = Vec::with_capacity(dist.atoms().len());
    let mut correction = Vec::with_capacity(dist.atoms().len());
    for (ai, atom) in dist.atoms().iter().enumerate() {
        let prod_mask = |coords: &[usize], mask: u32| -> f64 {
            let mut prod = 1.0;
            for (pos, &j) in coords.iter().enumerate() {
                if mask & (1 << pos) != 0 {
                    prod *= atom.v[j];
                }
            }
            prod
        };
        let z_full = prod_mask(zs, if mz == 0 { 0 } else { (1u32 << mz) - 1 });

        let mut corr_terms = Vec::new();
        for ymask in 0u32..(1 << my) {
            for zmask in 0u32..(1 << mz) {
                if mz > 0 && zmask == (1u32 << mz) - 1 {
                    continue;
                }
                corr_terms.push(
                    prod_mask(ys, ymask)
                        * prod_mask(zs, zmask)
                        * corr_kappa[ymask as usize][zmask as usize],
                );
            }
        }
        let corr = kahan_sum(corr_terms);
        lhs.push(k_full[ai] - kappa_full);
        rhs.push(z_full * (k_ys[ai] - kappa_ys) - corr);
        correction.push(corr);
    }
    Ok(Sides {
        lhs,
        rhs,
        correction,
    })
}

/// Worst-atom absolute defect between the two sides of the decoupling
/// identity for the companion split `ys` / `zs`. Exactly zero when `zs` is
/// empty; at rounding level (≤ 1e-11) always.
pub fn decoupling_residual(
    dist: &JointDistribution,
    x: usize,
    ys: &[usize],
    zs: &[usize],
) -> Result<f64> {
    let sides = evaluate_sides(dist, x, ys, zs)?;
    Ok(sides
        .lhs
        .iter()
        .zip(&sides.rhs)
        .map(|(l, r)| (l - r).abs())
        .fold(0.0, f64::max))
}

/// Worst-atom magnitude of the cumulant correction sum in the decoupling
/// identity. When the `zs` group is independent of `x` and `ys`, every
/// cumulant in the sum mixes independent groups, so this vanishes.
pub fn decoupling_correction(
    dist: &JointDistribution,
    x: usize,
    ys: &[usize],
    zs: &[usize],
) -> Result<f64> {
    let sides = evaluate_sides(dist, x, ys, zs)?;
    Ok(sides.correction.iter().fold(0.0, |acc, c| acc.max(c.abs())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_second_group_is_exact() {
        let d = JointDistribution::new(vec![
            cumulants::Atom {
                p: 0.5,
                v: vec![1.0, 0.5],
            },
            cumulants::Atom {
                p: 0.5,
                v: vec![-1.0, 0.25],
            },
        ])
        .unwrap();
        assert_eq!(decoupling_residual(&d, 0, &[1], &[]).unwrap(), 0.0);
    }
}
