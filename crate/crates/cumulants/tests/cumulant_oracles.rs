//! Exact cumulant values on hand-computable distributions, the
//! cumulant/moment round trip, and independence structure.

use cumulants::{
    joint_cumulant, moments_from_cumulants, CumulantError, CumulantTable, JointDistribution,
};

#[test]
fn rademacher_second_and_fourth_cumulants() {
    let d = JointDistribution::rademacher();
    // Direct atom arithmetic: E X² − (E X)² = 1, m₄ − 3 m₂² = 1 − 3 = −2.
    assert!((joint_cumulant(&d, &[0, 0]).unwrap() - 1.0).abs() < 1e-14);
    assert!((joint_cumulant(&d, &[0, 0, 0, 0]).unwrap() - (-2.0)).abs() < 1e-14);
}

#[test]
fn independent_coordinates_have_zero_mixed_cumulant() {
    let d = JointDistribution::product(
        &JointDistribution::rademacher(),
        &JointDistribution::rademacher(),
    )
    .unwrap();
    assert!(joint_cumulant(&d, &[0, 1]).unwrap().abs() <= 1e-12);
    // All mixed multisets up to size 5 vanish for a product law.
    for multiset in [
        vec![0, 1, 1],
        vec![0, 0, 1],
        vec![0, 0, 1, 1],
        vec![0, 1, 1, 1],
        vec![0, 0, 0, 1, 1],
        vec![0, 0, 1, 1, 1],
    ] {
        let k = joint_cumulant(&d, &multiset).unwrap();
        assert!(
            k.abs() <= 1e-12,
            "mixed cumulant {multiset:?} = {k} should vanish"
        );
    }
}

#[test]
fn covariance_tilt_scales_linearly_and_constant_is_reported() {
    // Two ±1 coordinates with P(s,t) = (1 + ε s t)/4: the pair cumulant is ε
    // exactly; higher mixed cumulants stay O(ε). The measured amplification
    // constant is printed for the record.
    let mut max_ratio: f64 = 0.0;
    for eps in [1e-3, 1e-5] {
        let mut atoms = Vec::new();
        for s in [-1.0f64, 1.0] {
            for t in [-1.0f64, 1.0] {
                atoms.push(cumulants::Atom {
                    p: (1.0 + eps * s * t) / 4.0,
                    v: vec![s, t],
                });
            }
        }
        let d = JointDistribution::new(atoms).unwrap();
        let pair = joint_cumulant(&d, &[0, 1]).unwrap();
        assert!(
            (pair - eps).abs() < 1e-15,
            "pair cumulant should equal the tilt"
        );
        for multiset in [
            vec![0, 1],
            vec![0, 0, 1],
            vec![0, 1, 1],
            vec![0, 0, 1, 1],
            vec![0, 1, 1, 1],
        ] {
            let k = joint_cumulant(&d, &multiset).unwrap().abs();
            max_ratio = max_ratio.max(k / eps);
        }
    }
    println!("measured mixed-cumulant amplification under covariance tilt: C = {max_ratio:.3}");
    assert!(
        max_ratio <= 10.0,
        "tilted mixed cumulants should stay within a small multiple of the tilt"
    );
}

#[test]
fn gaussian_table_reproduces_fourth_moment_three() {
    let table = CumulantTable::gaussian(&[0.0], &[vec![1.0]], 4).unwrap();
    let m4 = moments_from_cumulants(&table, &[0, 0, 0, 0]).unwrap();
    assert!((m4 - 3.0).abs() < 1e-14);
}

#[test]
fn gaussian_table_reproduces_pairing_sums() {
    // For a centered Gaussian vector the mixed fourth moment is the sum over
    // the three pairings of covariance products.
    let cov = vec![
        vec![2.0, 0.3, -0.5],
        vec![0.3, 1.0, 0.7],
        vec![-0.5, 0.7, 1.5],
    ];
    let means = vec![0.0; 3];
    let table = CumulantTable::gaussian(&means, &cov, 4).unwrap();
    let cases: &[(&[usize; 4], f64)] = &[
        (
            &[0, 1, 1, 2],
            cov[0][1] * cov[1][2] + cov[0][1] * cov[1][2] + cov[0][2] * cov[1][1],
        ),
        (
            &[0, 0, 1, 2],
            cov[0][0] * cov[1][2] + 2.0 * cov[0][1] * cov[0][2],
        ),
        (&[0, 0, 0, 0], 3.0 * cov[0][0] * cov[0][0]),
    ];
    for (indices, expected) in cases {
        let m = moments_from_cumulants(&table, *indices).unwrap();
        assert!(
            (m - expected).abs() < 1e-12,
            "pairing sum mismatch for {indices:?}: {m} vs {expected}"
        );
    }
}

#[test]
fn single_index_moment_is_the_first_cumulant() {
    let mut table = CumulantTable::new(1);
    table.insert(&[0], 0.75);
    assert_eq!(moments_from_cumulants(&table, &[0]).unwrap(), 0.75);
}

#[test]
fn rademacher_round_trip_gives_fourth_moment_one() {
    let d = JointDistribution::rademacher();
    let table = CumulantTable::from_distribution(&d, 4).unwrap();
    let m4 = moments_from_cumulants(&table, &[0, 0, 0, 0]).unwrap();
    assert!((m4 - 1.0).abs() < 1e-12);
}

#[test]
fn error_paths() {
    let d = JointDistribution::rademacher();
    assert!(matches!(
        joint_cumulant(&d, &[]),
        Err(CumulantError::InvalidArgument(_))
    ));
    assert!(matches!(
        joint_cumulant(&d, &[1]),
        Err(CumulantError::InvalidArgument(_))
    ));
    assert!(matches!(
        joint_cumulant(&d, &[0; 11]),
        Err(CumulantError::ComplexityLimit(_))
    ));
    let table = CumulantTable::new(1);
    assert!(matches!(
        moments_from_cumulants(&table, &[0, 0]),
        Err(CumulantError::IncompleteTable(_))
    ));
}

#[test]
fn three_atom_distribution_round_trip() {
    // An asymmetric three-atom, two-variable law: every mixed moment up to
    // order four must be reproduced from its cumulant table.
    let d = JointDistribution::new(vec![
        cumulants::Atom {
            p: 0.2,
            v: vec![1.0, -0.5],
        },
        cumulants::Atom {
            p: 0.5,
            v: vec![-0.3, 0.8],
        },
        cumulants::Atom {
            p: 0.3,
            v: vec![0.6, 0.1],
        },
    ])
    .unwrap();
    let table = CumulantTable::from_distribution(&d, 4).unwrap();
    for indices in [
        vec![0],
        vec![1],
        vec![0, 1],
        vec![0, 0, 1],
        vec![0, 1, 1, 1],
        vec![0, 0, 1, 1],
    ] {
        let direct = d.moment(&indices);
        let via_table = moments_from_cumulants(&table, &indices).unwrap();
        assert!(
            (direct - via_table).abs() < 1e-12,
            "round trip failed for {indices:?}"
        );
    }
}
