//! Sparse multivariate polynomials with exact symbolic derivatives.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::{PrecumulantError, Result};

/// A real polynomial in `n_vars` variables, stored as a sparse map from
/// exponent vectors to coefficients. Derivatives and coordinate restrictions
/// are exact; evaluation is plain Horner-free monomial summation, adequate
/// for the small oracle polynomials this crate handles.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    n_vars: usize,
    terms: BTreeMap<Vec<u32>, f64>,
}

#[derive(Serialize, Deserialize)]
struct WireTerm {
    exps: Vec<u32>,
    coef: f64,
}

#[derive(Serialize, Deserialize)]
struct Wire {
    terms: Vec<WireTerm>,
}

impl Polynomial {
    pub fn zero(n_vars: usize) -> Self {
        Self {
            n_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: f64, n_vars: usize) -> Self {
        let mut p = Self::zero(n_vars);
        if c != 0.0 {
            p.terms.insert(vec![0; n_vars], c);
        }
        p
    }

    /// The monomial `coef · Π x_i^{exps[i]}`.
    pub fn monomial(exps: Vec<u32>, coef: f64, n_vars: usize) -> Result<Self> {
        if exps.len() != n_vars {
            return Err(PrecumulantError::InvalidArgument(format!(
                "exponent vector length {} does not match variable count {n_vars}",
                exps.len()
            )));
        }
        let mut p = Self::zero(n_vars);
        if coef != 0.0 {
            p.terms.insert(exps, coef);
        }
        Ok(p)
    }

    pub fn from_terms(terms: Vec<(Vec<u32>, f64)>, n_vars: usize) -> Result<Self> {
        let mut p = Self::zero(n_vars);
        for (exps, coef) in terms {
            if exps.len() != n_vars {
                return Err(PrecumulantError::InvalidArgument(format!(
                    "exponent vector length {} does not match variable count {n_vars}",
                    exps.len()
                )));
            }
            if !coef.is_finite() {
                return Err(PrecumulantError::InvalidArgument(
                    "coefficients must be finite".into(),
                ));
            }
            let slot = p.terms.entry(exps).or_insert(0.0);
            *slot += coef;
            if *slot == 0.0 {
                // keep the map sparse
            }
        }
        p.terms.retain(|_, c| *c != 0.0);
        Ok(p)
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree (max over terms of the exponent sum); 0 for the zero
    /// polynomial.
    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&x| x as usize).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial> {
        if self.n_vars != other.n_vars {
            return Err(PrecumulantError::InvalidArgument(
                "polynomials have different variable counts".into(),
            ));
        }
        let mut terms: Vec<(Vec<u32>, f64)> = self
            .terms
            .iter()
            .map(|(e, c)| (e.clone(), *c))
            .collect();
        terms.extend(other.terms.iter().map(|(e, c)| (e.clone(), *c)));
        Polynomial::from_terms(terms, self.n_vars)
    }

    pub fn scale(&self, factor: f64) -> Polynomial {
        let mut p = self.clone();
        p.terms.values_mut().for_each(|c| *c *= factor);
        p.terms.retain(|_, c| *c != 0.0);
        p
    }

    pub fn eval(&self, point: &[f64]) -> f64 {
        debug_assert_eq!(point.len(), self.n_vars);
        crate::kahan_sum(self.terms.iter().map(|(exps, coef)| {
            let mut prod = *coef;
            for (x, &e) in point.iter().zip(exps) {
                for _ in 0..e {
                    prod *= x;
                }
            }
            prod
        }))
    }

    /// Exact partial derivative with respect to variable `var`.
    pub fn partial(&self, var: usize) -> Result<Polynomial> {
        if var >= self.n_vars {
            return Err(PrecumulantError::InvalidArgument(format!(
                "variable {var} out of range for {} variables",
                self.n_vars
            )));
        }
        let mut out = Polynomial::zero(self.n_vars);
        for (exps, coef) in &self.terms {
            if exps[var] == 0 {
                continue;
            }
            let mut e = exps.clone();
            let power = e[var] as f64;
            e[var] -= 1;
            *out.terms.entry(e).or_insert(0.0) += coef * power;
        }
        out.terms.retain(|_, c| *c != 0.0);
        Ok(out)
    }

    /// Iterated partial derivative along a tuple of variable indices.
    pub fn partial_many(&self, vars: &[usize]) -> Result<Polynomial> {
        let mut p = self.clone();
        for &v in vars {
            if p.is_zero() {
                break;
            }
            p = p.partial(v)?;
        }
        Ok(p)
    }

    /// Serializes as `{"terms": [{"exps": [...], "coef": ...}]}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&Wire {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| WireTerm {
                    exps: e.clone(),
                    coef: *c,
                })
                .collect(),
        })
        .expect("serializing plain floats cannot fail")
    }

    /// Parses the `{"terms": [...]}` wire form; `n_vars` is taken from the
    /// exponent vectors, which must all have equal length.
    pub fn from_json(text: &str) -> Result<Self> {
        let wire: Wire = serde_json::from_str(text)
            .map_err(|e| PrecumulantError::InvalidArgument(format!("bad polynomial JSON: {e}")))?;
        let Some(first) = wire.terms.first() else {
            return Err(PrecumulantError::InvalidArgument(
                "polynomial JSON needs at least one term (use a zero coefficient for 0)".into(),
            ));
        };
        let n_vars = first.exps.len();
        Polynomial::from_terms(
            wire.terms.into_iter().map(|t| (t.exps, t.coef)).collect(),
            n_vars,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_and_derivative() {
        // f(x, y) = 3x²y + 2y
        let f = Polynomial::from_terms(vec![(vec![2, 1], 3.0), (vec![0, 1], 2.0)], 2).unwrap();
        assert_eq!(f.eval(&[2.0, 5.0]), 3.0 * 4.0 * 5.0 + 2.0 * 5.0);
        let fx = f.partial(0).unwrap(); // 6xy
        assert_eq!(fx.eval(&[2.0, 5.0]), 60.0);
        let fxy = f.partial_many(&[0, 1]).unwrap(); // 6x
        assert_eq!(fxy.eval(&[2.0, 5.0]), 12.0);
        assert_eq!(f.degree(), 3);
    }

    #[test]
    fn derivatives_commute() {
        let f = Polynomial::from_terms(vec![(vec![2, 3], 1.5), (vec![1, 1], -2.0)], 2).unwrap();
        let a = f.partial_many(&[0, 1]).unwrap();
        let b = f.partial_many(&[1, 0]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn json_round_trip() {
        let f = Polynomial::from_terms(vec![(vec![1, 0], 2.0), (vec![0, 2], -0.5)], 2).unwrap();
        let back = Polynomial::from_json(&f.to_json()).unwrap();
        assert_eq!(f, back);
    }
}
