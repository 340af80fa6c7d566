//! The decoupling identity: how the kernel splits over a partition of its
//! companions into two groups, and when the cumulant correction vanishes.

use cumulants::{joint_cumulant, Atom, JointDistribution};
use precumulants::{decoupling_correction, decoupling_residual, PrecumulantError};

fn correlated_pair() -> JointDistribution {
    JointDistribution::new(vec![
        Atom {
            p: 0.4,
            v: vec![1.0, 0.5],
        },
        Atom {
            p: 0.35,
            v: vec![-0.5, -1.0],
        },
        Atom {
            p: 0.25,
            v: vec![0.25, 1.0],
        },
    ])
    .unwrap()
}

fn skewed_three_vars() -> JointDistribution {
    JointDistribution::new(vec![
        Atom {
            p: 0.15,
            v: vec![1.0, -0.5, 0.25],
        },
        Atom {
            p: 0.35,
            v: vec![-0.5, 1.0, -1.0],
        },
        Atom {
            p: 0.20,
            v: vec![0.75, 0.75, 0.5],
        },
        Atom {
            p: 0.30,
            v: vec![-0.25, -1.0, 1.0],
        },
    ])
    .unwrap()
}

#[test]
fn empty_second_group_gives_a_bitwise_zero_residual() {
    let d = skewed_three_vars();
    let residual = decoupling_residual(&d, 0, &[1, 2], &[]).unwrap();
    assert_eq!(residual, 0.0);
}

#[test]
fn independent_second_group_kills_the_correction() {
    // Two correlated pairs glued independently: variables {0,1} ⊥ {2,3}.
    let d = JointDistribution::product(&correlated_pair(), &correlated_pair()).unwrap();
    let residual = decoupling_residual(&d, 0, &[1], &[2, 3]).unwrap();
    let correction = decoupling_correction(&d, 0, &[1], &[2, 3]).unwrap();
    assert!(residual < 1e-11, "residual {residual:.3e}");
    assert!(
        correction < 1e-11,
        "correction {correction:.3e} should vanish across independent groups"
    );
}

#[test]
fn correction_matches_its_closed_form_for_one_and_one() {
    // With |ys| = |zs| = 1 the correction collapses to
    // κ(x, y, z) + y·κ(x, z) at each atom; its max over atoms is the oracle.
    let d = skewed_three_vars();
    let kappa_xyz = joint_cumulant(&d, &[0, 1, 2]).unwrap();
    let kappa_xz = joint_cumulant(&d, &[0, 2]).unwrap();
    let oracle = d
        .atoms()
        .iter()
        .map(|atom| (kappa_xyz + atom.v[1] * kappa_xz).abs())
        .fold(0.0f64, f64::max);
    let correction = decoupling_correction(&d, 0, &[1], &[2]).unwrap();
    assert!(
        (correction - oracle).abs() < 1e-13,
        "correction {correction} vs closed form {oracle}"
    );
    assert!(oracle > 1e-3, "test distribution should be visibly coupled");
}

#[test]
fn identity_holds_on_a_fully_coupled_distribution() {
    // The identity is algebraic, so it must hold even when nothing is
    // independent and the correction term is large.
    let d = skewed_three_vars();
    for (ys, zs) in [
        (vec![1usize], vec![2usize]),
        (vec![2], vec![1]),
        (vec![1, 1], vec![2]),
        (vec![1, 2], vec![0]),
    ] {
        let residual = decoupling_residual(&d, 0, &ys, &zs).unwrap();
        assert!(
            residual < 1e-11,
            "residual {residual:.3e} for split {ys:?} / {zs:?}"
        );
    }
}

#[test]
fn rejects_overlapping_groups_and_oversized_splits() {
    let d = skewed_three_vars();
    assert!(matches!(
        decoupling_residual(&d, 0, &[1, 2], &[2]),
        Err(PrecumulantError::InvalidArgument(_))
    ));
    assert!(matches!(
        decoupling_residual(&d, 0, &[1, 1, 1], &[2, 2, 2]),
        Err(PrecumulantError::ComplexityLimit(_))
    ));
}
