//! The truncated expansion of `E[w_{i0} f(w)]` into cumulant and kernel
//! terms, and the Hölder bound on its remainder.

use std::collections::HashMap;

use cumulants::{joint_cumulant, JointDistribution};

use crate::precum::kernel_pointwise;
use crate::{kahan_sum, Polynomial, PrecumulantError, Result};

/// Cap on the truncation order of [`remainder_bound_check`].
pub const MAX_REMAINDER_ORDER: usize = 4;

/// Guard on the total number of index tuples the expansion may enumerate.
const MAX_TUPLES: u64 = 300_000;

/// Result of [`expansion_identity_check`]: the two independently computed
/// values of `E[w_{i0} f(w)]` and their difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionCheck {
    pub direct: f64,
    pub expanded: f64,
    pub difference: f64,
}

/// Result of [`remainder_bound_check`]: the exact remainder magnitude of the
/// truncated expansion and the Hölder-type bound it is measured against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemainderCheck {
    pub remainder: f64,
    pub bound: f64,
}

struct Expansion<'a> {
    dist: &'a JointDistribution,
    f: &'a Polynomial,
    neighborhood: Vec<usize>,
    in_neighborhood: Vec<bool>,
    i0: usize,
    /// Per sorted tuple: (cumulant with i0, E ∂f, E[(K−κ)·∂f at zeroed point]).
    term_cache: HashMap<Vec<usize>, (f64, f64, f64)>,
}

impl<'a> Expansion<'a> {
    fn new(
        dist: &'a JointDistribution,
        i0: usize,
        f: &'a Polynomial,
        neighborhood: &[usize],
    ) -> Result<Self> {
        let n = dist.n_vars();
        if f.n_vars() != n {
            return Err(PrecumulantError::InvalidArgument(format!(
                "polynomial has {} variables, distribution has {n}",
                f.n_vars()
            )));
        }
        let mut in_neighborhood = vec![false; n];
        for &j in neighborhood {
            if j >= n {
                return Err(PrecumulantError::InvalidArgument(format!(
                    "neighborhood index {j} out of range for {n} variables"
                )));
            }
            if in_neighborhood[j] {
                return Err(PrecumulantError::InvalidArgument(
                    "neighborhood indices must be distinct".into(),
                ));
            }
            in_neighborhood[j] = true;
        }
        if !in_neighborhood.get(i0).copied().unwrap_or(false) {
            return Err(PrecumulantError::InvalidArgument(
                "the expanded variable must belong to the neighborhood".into(),
            ));
        }
        Ok(Self {
            dist,
            f,
            neighborhood: neighborhood.to_vec(),
            in_neighborhood,
            i0,
            term_cache: HashMap::new(),
        })
    }

    fn zeroed(&self, values: &[f64]) -> Vec<f64> {
        values
            .iter()
            .enumerate()
            .map(|(j, &v)| if self.in_neighborhood[j] { 0.0 } else { v })
            .collect()
    }

    /// The three expectations attached to one derivative multiset.
    fn tuple_terms(&mut self, sorted_tuple: &[usize]) -> Result<(f64, f64, f64)> {
        if let Some(&t) = self.term_cache.get(sorted_tuple) {
            return Ok(t);
        }
        let mut with_i0 = vec![self.i0];
        with_i0.extend_from_slice(sorted_tuple);
        let kappa = joint_cumulant(self.dist, &with_i0)?;
        let derivative = self.f.partial_many(sorted_tuple)?;
        let mean_derivative = kahan_sum(
            self.dist
                .atoms()
                .iter()
                .map(|atom| atom.p * derivative.eval(&atom.v)),
        );
        let kernel = kernel_pointwise(self.dist, self.i0, sorted_tuple)?;
        let centered_term = kahan_sum(self.dist.atoms().iter().zip(&kernel).map(|(atom, &k)| {
            atom.p * (k - kappa) * derivative.eval(&self.zeroed(&atom.v))
        }));
        let result = (kappa, mean_derivative, centered_term);
        self.term_cache.insert(sorted_tuple.to_vec(), result);
        Ok(result)
    }

    /// `Σ_{m<r} (1/m!) Σ_{tuples in N^m} [κ(i0, tuple)·E ∂f + E (K−κ)·∂f|₀]`.
    fn truncated(&mut self, r: usize) -> Result<f64> {
        let width = self.neighborhood.len() as u64;
        let mut budget: u64 = 0;
        for m in 0..r {
            budget = budget.saturating_add(width.saturating_pow(m as u32));
        }
        if budget > MAX_TUPLES {
            return Err(PrecumulantError::ComplexityLimit(format!(
                "expansion enumerates {budget} tuples (cap {MAX_TUPLES})"
            )));
        }
        let mut order_sums = Vec::with_capacity(r);
        for m in 0..r {
            let mut factorial = 1.0;
            for j in 1..=m {
                factorial *= j as f64;
            }
            let count = (self.neighborhood.len() as u64).pow(m as u32);
            let mut tuple_values = Vec::with_capacity(count as usize);
            for code in 0..count {
                let mut c = code;
                let mut tuple = Vec::with_capacity(m);
                for _ in 0..m {
                    tuple.push(self.neighborhood[(c % width) as usize]);
                    c /= width;
                }
                tuple.sort_unstable();
                let (kappa, mean_df, centered) = self.tuple_terms(&tuple)?;
                tuple_values.push(kappa * mean_df + centered);
            }
            order_sums.push(kahan_sum(tuple_values) / factorial);
        }
        Ok(kahan_sum(order_sums))
    }

    fn direct(&self) -> f64 {
        kahan_sum(
            self.dist
                .atoms()
                .iter()
                .map(|atom| atom.p * atom.v[self.i0] * self.f.eval(&atom.v)),
        )
    }
}

/// Verifies the truncated expansion in the regime where it is exact: when
/// `deg f < r` the remainder vanishes identically (the r-th derivatives of
/// `f` are zero), so the direct expectation `E[w_{i0} f(w)]` and the
/// expansion must agree to rounding. Fails with `RemainderNotZero` when
/// `deg f ≥ r` — use [`remainder_bound_check`] there instead.
pub fn expansion_identity_check(
    dist: &JointDistribution,
    i0: usize,
    f: &Polynomial,
    neighborhood: &[usize],
    r: usize,
) -> Result<ExpansionCheck> {
    if f.degree() >= r {
        return Err(PrecumulantError::RemainderNotZero {
            degree: f.degree(),
            order: r,
        });
    }
    let mut expansion = Expansion::new(dist, i0, f, neighborhood)?;
    let direct = expansion.direct();
    let expanded = expansion.truncated(r)?;
    Ok(ExpansionCheck {
        direct,
        expanded,
        difference: direct - expanded,
    })
}

/// Computes the exact remainder `Ω = E[w_{i0} f] − (truncated expansion up to
/// order r)` together with its Hölder-type bound
/// `√μ_{2r} · Σ_{tuples in N^r} ∫₀¹ (E |(∂f)(t·w_N, w_rest)|²)^{1/2} dt`,
/// where `μ_{2r}` is the largest 2r-th absolute moment of a single variable.
/// The bound holds up to an order-dependent constant which callers measure
/// rather than assume; for polynomials of degree below `r` the remainder is
/// identically zero.
pub fn remainder_bound_check(
    dist: &JointDistribution,
    i0: usize,
    f: &Polynomial,
    neighborhood: &[usize],
    r: usize,
) -> Result<RemainderCheck> {
    if r == 0 || r > MAX_REMAINDER_ORDER {
        return Err(PrecumulantError::InvalidArgument(format!(
            "truncation order must be in 1..={MAX_REMAINDER_ORDER}, got {r}"
        )));
    }
    let mut expansion = Expansion::new(dist, i0, f, neighborhood)?;
    let remainder = (expansion.direct() - expansion.truncated(r)?).abs();

    // Largest single-variable absolute moment of order 2r.
    let mu = (0..dist.n_vars())
        .map(|j| {
            kahan_sum(
                dist.atoms()
                    .iter()
                    .map(|atom| atom.p * atom.v[j].abs().powi(2 * r as i32)),
            )
        })
        .fold(0.0f64, f64::max);

    let width = neighborhood.len() as u64;
    if width.saturating_pow(r as u32) > MAX_TUPLES {
        return Err(PrecumulantError::ComplexityLimit(format!(
            "remainder bound enumerates {} tuples (cap {MAX_TUPLES})",
            width.pow(r as u32)
        )));
    }
    let (nodes, weights) = gauss_legendre_unit(48);
    let mut integral_cache: HashMap<Vec<usize>, f64> = HashMap::new();
    let mut tuple_integrals = Vec::new();
    let count = width.pow(r as u32);
    for code in 0..count {
        let mut c = code;
        let mut tuple = Vec::with_capacity(r);
        for _ in 0..r {
            tuple.push(neighborhood[(c % width) as usize]);
            c /= width;
        }
        tuple.sort_unstable();
        if let Some(&v) = integral_cache.get(&tuple) {
            tuple_integrals.push(v);
            continue;
        }
        let derivative = f.partial_many(&tuple)?;
        let mut scaled = vec![0.0f64; dist.n_vars()];
        let value = if derivative.is_zero() {
            0.0
        } else {
            kahan_sum(nodes.iter().zip(&weights).map(|(&t, &w)| {
                let second_moment = kahan_sum(dist.atoms().iter().map(|atom| {
                    for (j, &v) in atom.v.iter().enumerate() {
                        scaled[j] = if expansion.in_neighborhood[j] {
                            t * v
                        } else {
                            v
                        };
                    }
                    let d = derivative.eval(&scaled);
                    atom.p * d * d
                }));
                w * second_moment.max(0.0).sqrt()
            }))
        };
        integral_cache.insert(tuple, value);
        tuple_integrals.push(value);
    }
    let bound = mu.sqrt() * kahan_sum(tuple_integrals);
    Ok(RemainderCheck { remainder, bound })
}

/// Gauss–Legendre nodes and weights on [0, 1].
fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for k in 0..n {
        // Standard initial guess followed by Newton iterations on P_n.
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_and_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_and_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes.push(0.5 * (x + 1.0));
        weights.push(0.5 * w);
    }
    (nodes, weights)
}

/// Legendre polynomial `P_n(x)` and its derivative via the three-term
/// recurrence.
fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (nodes, weights) = gauss_legendre_unit(48);
        // ∫₀¹ x³ dx = 1/4 and ∫₀¹ 1 dx = 1.
        let cubic: f64 = nodes
            .iter()
            .zip(&weights)
            .map(|(&x, &w)| w * x * x * x)
            .sum();
        let unit: f64 = weights.iter().sum();
        assert!((cubic - 0.25).abs() < 1e-13);
        assert!((unit - 1.0).abs() < 1e-13);
    }

    #[test]
    fn constant_function_reduces_to_the_mean() {
        let d = JointDistribution::rademacher();
        let f = Polynomial::constant(1.0, 1);
        let check = expansion_identity_check(&d, 0, &f, &[0], 2).unwrap();
        assert_eq!(check.direct, 0.0);
        assert!(check.difference.abs() < 1e-14);
    }
}
