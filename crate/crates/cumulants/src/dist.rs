//! Finite-atom joint distributions: the exact-arithmetic carrier for all
//! cumulant oracles.

use serde::{Deserialize, Serialize};

use crate::{kahan_sum, CumulantError, Result};

/// One support point of a [`JointDistribution`]: probability `p` and the
/// value vector `v` taken by the coordinates there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub p: f64,
    pub v: Vec<f64>,
}

/// A joint distribution of `n_vars` real random variables supported on
/// finitely many atoms. Probabilities must sum to 1 within 1e-12, every atom
/// must carry a value vector of the same length, and all numbers must be
/// finite.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    atoms: Vec<Atom>,
    n: usize,
}

impl JointDistribution {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        let Some(first) = atoms.first() else {
            return Err(CumulantError::InvalidArgument(
                "distribution needs at least one atom".into(),
            ));
        };
        let n = first.v.len();
        for atom in &atoms {
            if atom.v.len() != n {
                return Err(CumulantError::InvalidArgument(format!(
                    "atom value vectors have inconsistent lengths {} vs {n}",
                    atom.v.len()
                )));
            }
            if !(0.0..=1.0).contains(&atom.p) {
                return Err(CumulantError::InvalidArgument(format!(
                    "atom probability {} outside [0, 1]",
                    atom.p
                )));
            }
            if atom.v.iter().any(|x| !x.is_finite()) {
                return Err(CumulantError::InvalidArgument(
                    "atom values must be finite".into(),
                ));
            }
        }
        let total = kahan_sum(atoms.iter().map(|a| a.p));
        if (total - 1.0).abs() > 1e-12 {
            return Err(CumulantError::InvalidArgument(format!(
                "atom probabilities sum to {total}, expected 1"
            )));
        }
        Ok(Self { atoms, n })
    }

    /// Uniform distribution over the given value vectors (each row one atom).
    pub fn uniform(rows: Vec<Vec<f64>>) -> Result<Self> {
        let count = rows.len();
        if count == 0 {
            return Err(CumulantError::InvalidArgument(
                "distribution needs at least one atom".into(),
            ));
        }
        // Assign the exact remainder to the last atom so the probabilities
        // sum to 1 bit-exactly for any count.
        let p = 1.0 / count as f64;
        let mut atoms: Vec<Atom> = rows.into_iter().map(|v| Atom { p, v }).collect();
        let partial = kahan_sum(atoms.iter().take(count - 1).map(|a| a.p));
        atoms[count - 1].p = 1.0 - partial;
        Self::new(atoms)
    }

    /// Independent product: the coordinates of `a` followed by those of `b`,
    /// with product probabilities.
    pub fn product(a: &JointDistribution, b: &JointDistribution) -> Result<Self> {
        let mut atoms = Vec::with_capacity(a.atoms.len() * b.atoms.len());
        for x in &a.atoms {
            for y in &b.atoms {
                let mut v = x.v.clone();
                v.extend_from_slice(&y.v);
                atoms.push(Atom { p: x.p * y.p, v });
            }
        }
        Self::new(atoms)
    }

    /// Symmetric two-point distribution on {−1, +1} for a single coordinate.
    pub fn rademacher() -> Self {
        Self {
            atoms: vec![
                Atom {
                    p: 0.5,
                    v: vec![1.0],
                },
                Atom {
                    p: 0.5,
                    v: vec![-1.0],
                },
            ],
            n: 1,
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Raw mixed moment `E[Π_{i ∈ indices} w_i]`, with multiplicity (an index
    /// repeated k times contributes the k-th power). The empty product is 1.
    pub fn moment(&self, indices: &[usize]) -> f64 {
        kahan_sum(self.atoms.iter().map(|atom| {
            let mut prod = atom.p;
            for &i in indices {
                prod *= atom.v[i];
            }
            prod
        }))
    }

    pub fn mean(&self, index: usize) -> f64 {
        self.moment(&[index])
    }

    /// Serializes as `{"atoms": [{"p": …, "v": […]}]}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&Wire {
            atoms: self.atoms.clone(),
        })
        .expect("serializing plain floats cannot fail")
    }

    /// Parses the `{"atoms": […]}` wire form, re-validating all invariants.
    pub fn from_json(text: &str) -> Result<Self> {
        let wire: Wire = serde_json::from_str(text)
            .map_err(|e| CumulantError::InvalidArgument(format!("bad distribution JSON: {e}")))?;
        Self::new(wire.atoms)
    }
}

#[derive(Serialize, Deserialize)]
struct Wire {
    atoms: Vec<Atom>,
}

impl Serialize for JointDistribution {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        Wire {
            atoms: self.atoms.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for JointDistribution {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = Wire::deserialize(d)?;
        JointDistribution::new(wire.atoms).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rademacher_moments() {
        let d = JointDistribution::rademacher();
        assert_eq!(d.moment(&[]), 1.0);
        assert_eq!(d.moment(&[0]), 0.0);
        assert_eq!(d.moment(&[0, 0]), 1.0);
        assert_eq!(d.moment(&[0, 0, 0]), 0.0);
    }

    #[test]
    fn product_moments_factorize() {
        let d = JointDistribution::product(
            &JointDistribution::rademacher(),
            &JointDistribution::rademacher(),
        )
        .unwrap();
        assert_eq!(d.n_vars(), 2);
        assert_eq!(d.moment(&[0, 1]), 0.0);
        assert_eq!(d.moment(&[0, 0, 1, 1]), 1.0);
    }

    #[test]
    fn validation_rejects_bad_input() {
        assert!(JointDistribution::new(vec![]).is_err());
        assert!(JointDistribution::new(vec![Atom {
            p: 0.5,
            v: vec![1.0]
        }])
        .is_err());
        assert!(JointDistribution::new(vec![
            Atom {
                p: 0.5,
                v: vec![1.0]
            },
            Atom {
                p: 0.5,
                v: vec![1.0, 2.0]
            }
        ])
        .is_err());
    }

    #[test]
    fn uniform_probabilities_sum_exactly_to_one() {
        let rows: Vec<Vec<f64>> = (0..7).map(|i| vec![i as f64]).collect();
        let d = JointDistribution::uniform(rows).unwrap();
        assert_eq!(kahan_sum(d.atoms().iter().map(|a| a.p)), 1.0);
    }
}
