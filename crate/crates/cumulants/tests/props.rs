//! Property tests: cumulant/moment round trip, permutation invariance, and
//! product-law independence on randomized finite distributions.

use cumulants::{
    joint_cumulant, moments_from_cumulants, wick_polynomial_at, Atom, CumulantTable,
    JointDistribution,
};
use proptest::prelude::*;

/// Distributions with up to `max_atoms` atoms and exactly `n_vars` variables,
/// values in [−1, 1], probabilities bounded away from degeneracy.
fn dist_strategy(max_atoms: usize, n_vars: usize) -> impl Strategy<Value = JointDistribution> {
    prop::collection::vec(
        (
            0.05f64..1.0,
            prop::collection::vec(-1.0f64..1.0, n_vars..=n_vars),
        ),
        1..=max_atoms,
    )
    .prop_map(|raw| {
        let total: f64 = raw.iter().map(|(w, _)| w).sum();
        let mut atoms: Vec<Atom> = raw
            .into_iter()
            .map(|(w, v)| Atom { p: w / total, v })
            .collect();
        // Re-balance the last probability so the sum is exactly 1.
        let partial: f64 = atoms[..atoms.len() - 1].iter().map(|a| a.p).sum();
        let count = atoms.len();
        atoms[count - 1].p = 1.0 - partial;
        JointDistribution::new(atoms).expect("constructed atoms are valid")
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Every raw mixed moment of order ≤ 4 is reproduced by partition-summing
    /// the cumulant table extracted from the same distribution.
    #[test]
    fn moment_cumulant_round_trip(d in dist_strategy(5, 4)) {
        let table = CumulantTable::from_distribution(&d, 4).unwrap();
        let index_sets: Vec<Vec<usize>> = vec![
            vec![0], vec![3], vec![0, 1], vec![2, 2], vec![0, 1, 2],
            vec![1, 1, 3], vec![0, 1, 2, 3], vec![0, 0, 2, 2], vec![3, 3, 3, 3],
        ];
        for indices in index_sets {
            let direct = d.moment(&indices);
            let rebuilt = moments_from_cumulants(&table, &indices).unwrap();
            prop_assert!(
                (direct - rebuilt).abs() <= 1e-12,
                "round trip failed for {:?}: {} vs {}", indices, direct, rebuilt
            );
        }
    }

    /// Cumulants are permutation-invariant bit-for-bit.
    #[test]
    fn permutation_invariance(d in dist_strategy(5, 3), perm_seed in 0usize..6) {
        let base = vec![0usize, 1, 2, 1];
        let mut indices = base.clone();
        // One of six fixed permutations of the four positions.
        let perms = [
            [0usize, 1, 2, 3], [1, 0, 2, 3], [2, 1, 0, 3],
            [3, 1, 2, 0], [1, 2, 3, 0], [3, 2, 1, 0],
        ];
        let p = perms[perm_seed];
        for (slot, &src) in p.iter().enumerate() {
            indices[slot] = base[src];
        }
        let a = joint_cumulant(&d, &base).unwrap();
        let b = joint_cumulant(&d, &indices).unwrap();
        prop_assert_eq!(a.to_bits(), b.to_bits());
    }

    /// Mixed cumulants across independently generated coordinate groups
    /// vanish to 1e-12.
    #[test]
    fn product_laws_kill_mixed_cumulants(
        a in dist_strategy(4, 2),
        b in dist_strategy(4, 2),
    ) {
        let d = JointDistribution::product(&a, &b).unwrap();
        for indices in [
            vec![0usize, 2], vec![1, 3], vec![0, 1, 2], vec![0, 2, 3],
            vec![0, 1, 2, 3], vec![0, 0, 3, 3], vec![1, 1, 1, 2],
        ] {
            let k = joint_cumulant(&d, &indices).unwrap();
            prop_assert!(k.abs() <= 1e-12, "mixed cumulant {:?} = {}", indices, k);
        }
    }

    /// The product of selected coordinates equals the Wick-polynomial
    /// resummation Σ_{X'⊆X} :X': E[Π(X∖X')], pointwise at every atom.
    #[test]
    fn wick_resummation_reproduces_products(d in dist_strategy(4, 3)) {
        let x_all = [0usize, 1, 2];
        for atom in d.atoms() {
            let direct: f64 = x_all.iter().map(|&j| atom.v[j]).product();
            let mut sum = 0.0;
            for mask in 0u32..(1 << x_all.len()) {
                let mut sub = Vec::new();
                let mut rest = Vec::new();
                for (pos, &j) in x_all.iter().enumerate() {
                    if mask & (1 << pos) != 0 { sub.push(j) } else { rest.push(j) }
                }
                sum += wick_polynomial_at(&d, &sub, &atom.v).unwrap() * d.moment(&rest);
            }
            prop_assert!(
                (direct - sum).abs() <= 1e-11,
                "resummation defect {} at atom {:?}", (direct - sum).abs(), atom.v
            );
        }
    }

    /// Wick polynomials of non-empty index sets are centered.
    #[test]
    fn wick_polynomials_have_zero_mean(d in dist_strategy(4, 3)) {
        for indices in [vec![0usize], vec![0, 1], vec![0, 1, 2], vec![2, 2]] {
            let mean: f64 = d
                .atoms()
                .iter()
                .map(|atom| atom.p * wick_polynomial_at(&d, &indices, &atom.v).unwrap())
                .sum();
            prop_assert!(mean.abs() <= 1e-11, "E :{:?}: = {}", indices, mean);
        }
    }
}
