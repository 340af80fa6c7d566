//! Core solver behavior: agreement with the scalar quadratic in the
//! mean-field case, the independent residual certificate against the
//! label-by-label self-energy, positivity reporting, determinism, and
//! argument validation.

use ensembles::{apply_s_naive, KappaKernel};
use mde::{solve_mde, MdeError, SolveOpts};
use ndarray::{Array1, Array2};
use numerics::{herm_eigenvalues, C64};
use proptest::prelude::*;

/// Root of `m² + (z − a)·m + 1 = 0` with positive imaginary part.
fn scalar_root(z: C64, a: f64) -> C64 {
    let w = z - a;
    let disc = (w * w - 4.0).sqrt();
    let r1 = (-w + disc) / 2.0;
    let r2 = (-w - disc) / 2.0;
    if r1.im > 0.0 {
        r1
    } else {
        r2
    }
}

#[test]
fn mean_field_solution_hits_the_golden_ratio_points() {
    let n = 8;
    let kernel = KappaKernel::flat(n);
    let opts = SolveOpts::default();

    let sol = solve_mde(None, &kernel, C64::new(0.0, 1.0), &opts).unwrap();
    let expect = C64::new(0.0, (5.0f64.sqrt() - 1.0) / 2.0);
    for i in 0..n {
        for j in 0..n {
            let want = if i == j { expect } else { C64::new(0.0, 0.0) };
            assert!(
                (sol.m[(i, j)] - want).norm() < 1e-9,
                "entry ({i},{j}): {} vs {want}",
                sol.m[(i, j)]
            );
        }
    }

    let sol2 = solve_mde(None, &kernel, C64::new(0.0, 2.0), &opts).unwrap();
    let expect2 = C64::new(0.0, 2.0f64.sqrt() - 1.0);
    assert!((sol2.m[(0, 0)] - expect2).norm() < 1e-9);
}

#[test]
fn spectral_parameter_must_be_in_upper_half_plane() {
    let kernel = KappaKernel::wigner(6);
    let opts = SolveOpts::default();
    for z in [
        C64::new(2.0, -1.0),
        C64::new(3.0, 0.0),
        C64::new(0.0, f64::NAN),
        C64::new(f64::INFINITY, 1.0),
    ] {
        assert!(matches!(
            solve_mde(None, &kernel, z, &opts),
            Err(MdeError::InvalidArgument(_))
        ));
    }
}

#[test]
fn dimension_mismatches_are_rejected() {
    let kernel = KappaKernel::wigner(6);
    let a = Array2::<f64>::zeros((4, 4));
    assert!(matches!(
        solve_mde(Some(&a), &kernel, C64::new(0.0, 1.0), &SolveOpts::default()),
        Err(MdeError::InvalidArgument(_))
    ));
    let bad_init = SolveOpts {
        init: Some(Array2::zeros((4, 4))),
        ..SolveOpts::default()
    };
    assert!(matches!(
        solve_mde(None, &kernel, C64::new(0.0, 1.0), &bad_init),
        Err(MdeError::InvalidArgument(_))
    ));
}

/// The returned residual is certified against the quartic-cost
/// label-by-label self-energy, a code path the solver never touches.
#[test]
fn residual_certificate_holds_against_label_sum() {
    let n = 8;
    let z = C64::new(0.4, 0.3);
    let mut a = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        a[(i, i)] = (i as f64 - 3.5) * 0.3;
    }
    for kernel in [
        KappaKernel::wigner(n),
        KappaKernel::flat(n),
        KappaKernel::metric_decay(n, 2.0).unwrap(),
        KappaKernel::fourfold(n),
    ] {
        let deform = matches!(kernel.action(), ensembles::KernelAction::Wigner)
            .then_some(&a);
        let sol = solve_mde(deform, &kernel, z, &SolveOpts::default()).unwrap();
        assert!(sol.residual <= 1e-10, "reported residual {}", sol.residual);
        let s = apply_s_naive(&kernel, &sol.m).unwrap();
        let mut b = s;
        for i in 0..n {
            b[(i, i)] += z;
        }
        if let Some(a) = deform {
            b.zip_mut_with(a, |bv, &av| *bv -= av);
        }
        let mut r = b.dot(&sol.m);
        for i in 0..n {
            r[(i, i)] += 1.0;
        }
        let res = r.iter().map(|x| x.norm()).fold(0.0, f64::max);
        assert!(res <= 2e-10, "label-sum residual {res:.3e}");
    }
}

#[test]
fn positivity_is_reported_and_matches_an_eigensolve() {
    let n = 10;
    let kernel = KappaKernel::metric_decay(n, 3.0).unwrap();
    let sol = solve_mde(None, &kernel, C64::new(-0.7, 0.05), &SolveOpts::default()).unwrap();
    assert!(sol.im_min > 0.0);
    let half_i = C64::new(0.0, 0.5);
    let im = Array2::from_shape_fn((n, n), |(i, j)| {
        (sol.m[(j, i)].conj() - sol.m[(i, j)]) * half_i
    });
    let eigs = herm_eigenvalues(&im).unwrap();
    let lo = eigs.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(
        (lo - sol.im_min).abs() < 1e-12,
        "engine {} vs eigensolve {lo}",
        sol.im_min
    );
}

#[test]
fn repeated_solves_are_bitwise_identical() {
    let n = 12;
    let kernel = KappaKernel::block_copy(n, 3).unwrap();
    let opts = SolveOpts::default();
    let z = C64::new(0.9, 0.2);
    let s1 = solve_mde(None, &kernel, z, &opts).unwrap();
    let s2 = solve_mde(None, &kernel, z, &opts).unwrap();
    for (x, y) in s1.m.iter().zip(s2.m.iter()) {
        assert_eq!(x.re.to_bits(), y.re.to_bits());
        assert_eq!(x.im.to_bits(), y.im.to_bits());
    }
    assert_eq!(s1.iterations, s2.iterations);
    assert_eq!(s1.residual.to_bits(), s2.residual.to_bits());
}

#[test]
fn iteration_budget_is_enforced() {
    let kernel = KappaKernel::wigner(8);
    let opts = SolveOpts {
        max_iter: Some(3),
        ..SolveOpts::default()
    };
    match solve_mde(None, &kernel, C64::new(0.1, 1e-3), &opts) {
        Err(MdeError::NonConvergence { iterations, .. }) => assert!(iterations <= 4),
        other => panic!("expected iteration-budget error, got {other:?}"),
    }
}

/// Zero kernel: the fixed point is the plain resolvent of the deformation.
#[test]
fn zero_kernel_gives_the_deformation_resolvent() {
    let n = 6;
    let kernel = KappaKernel::zero(n);
    let mut a = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        a[(i, i)] = i as f64 * 0.5 - 1.0;
    }
    let z = C64::new(0.3, 0.8);
    let sol = solve_mde(Some(&a), &kernel, z, &SolveOpts::default()).unwrap();
    for i in 0..n {
        for j in 0..n {
            let want = if i == j {
                -C64::new(1.0, 0.0) / (z - a[(i, i)])
            } else {
                C64::new(0.0, 0.0)
            };
            assert!((sol.m[(i, j)] - want).norm() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Whenever the deformation is scalar and the self-energy is the plain
    /// mean-field trace, the matrix solver reproduces the scalar quadratic.
    #[test]
    fn scalar_reduction_matches_quadratic(
        re in -3.0f64..3.0,
        im in 0.05f64..3.0,
        a in -1.0f64..1.0,
    ) {
        let n = 6;
        let kernel = KappaKernel::flat(n);
        let a_mat = Array2::from_diag(&Array1::from_elem(n, a));
        let z = C64::new(re, im);
        let sol = solve_mde(Some(&a_mat), &kernel, z, &SolveOpts::default()).unwrap();
        let want = scalar_root(z, a);
        for i in 0..n {
            prop_assert!(
                (sol.m[(i, i)] - want).norm() < 1e-9,
                "diag {} vs scalar {want}", sol.m[(i, i)]
            );
        }
    }
}
