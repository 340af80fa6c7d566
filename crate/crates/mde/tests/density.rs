//! Density profiles: limiting values at the band center, mass conservation,
//! support localization, band gaps, and agreement with sampled spectra.

use ensembles::{sample_matrix, ASpec, CorrelationModel, KappaKernel, MatrixSample, ModelKind, Symmetry};
use mde::{density_profile, solve_mde, support_estimate, MdeError, SolveOpts, RHO_FLOOR};
use ndarray::Array2;
use numerics::C64;

const PI: f64 = std::f64::consts::PI;

fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let count = ((hi - lo) / step).round() as usize;
    (0..=count).map(|k| lo + step * k as f64).collect()
}

/// Average density at the spectral parameter `E + iη` from a single solve.
fn rho_at(a: Option<&Array2<f64>>, kernel: &KappaKernel, e: f64, eta: f64, max_iter: usize) -> f64 {
    let opts = SolveOpts {
        max_iter: Some(max_iter),
        ..SolveOpts::default()
    };
    let sol = solve_mde(a, kernel, C64::new(e, eta), &opts).unwrap();
    let n = kernel.n() as f64;
    sol.m.diag().iter().map(|m| m.im).sum::<f64>() / (PI * n)
}

/// Linear extrapolation of two (η, ρ) readings to η = 0.
fn extrapolate(eta1: f64, rho1: f64, eta2: f64, rho2: f64) -> f64 {
    (rho2 * eta1 - rho1 * eta2) / (eta1 - eta2)
}

/// The band-center density of the mean-field model approaches 1/π as the
/// offset shrinks; the offset dependence is linear at the center, so a
/// two-point extrapolation recovers the limit to high accuracy.
#[test]
fn center_density_extrapolates_to_the_limit() {
    let kernel = KappaKernel::flat(32);
    let r2 = rho_at(None, &kernel, 0.0, 1e-2, 1_000_000);
    let r3 = rho_at(None, &kernel, 0.0, 1e-3, 1_000_000);
    let r4 = rho_at(None, &kernel, 0.0, 1e-4, 2_000_000);
    assert!(r2 < r3 && r3 < r4 && r4 < 1.0 / PI, "broadening must lower the center value");
    let limit = extrapolate(1e-3, r3, 1e-4, r4);
    assert!(
        (limit - 1.0 / PI).abs() <= 1e-6,
        "extrapolated center density {limit} vs {}",
        1.0 / PI
    );
}

/// With independent-entry noise the self-energy carries a 1/N transpose
/// term, so the center density lands on 1/(π√(1+1/N)) rather than 1/π:
/// the shift is small but must be present and quantitatively correct.
#[test]
fn center_density_sees_the_finite_size_variance_shift() {
    let n = 512;
    let kernel = KappaKernel::wigner(n);
    let r3 = rho_at(None, &kernel, 0.0, 1e-3, 1_000_000);
    let r4 = rho_at(None, &kernel, 0.0, 1e-4, 2_000_000);
    let limit = extrapolate(1e-3, r3, 1e-4, r4);
    let expected = 1.0 / (PI * (1.0 + 1.0 / n as f64).sqrt());
    assert!(
        (limit - expected).abs() <= 1e-6,
        "extrapolated center density {limit} vs {expected}"
    );
    let shift = 1.0 / PI - limit;
    assert!(
        (2e-4..=4e-4).contains(&shift),
        "variance shift {shift} out of the expected window"
    );
}

#[test]
fn total_mass_is_close_to_one() {
    let kernel = KappaKernel::flat(32);
    let e_grid = grid(-4.0, 4.0, 0.02);
    let profile = density_profile(None, &kernel, &e_grid, None, &SolveOpts::default()).unwrap();
    assert!(profile.converged.iter().all(|&c| c));
    assert!((profile.eta_eval - 8e-3).abs() < 1e-12);
    let mut mass = 0.0;
    for k in 0..e_grid.len() - 1 {
        mass += 0.5 * (profile.rho[k] + profile.rho[k + 1]) * (e_grid[k + 1] - e_grid[k]);
    }
    assert!((mass - 1.0).abs() <= 0.01, "trapezoid mass {mass}");
    // The law is symmetric, so the profile must be too.
    let half = e_grid.len() / 2;
    for k in 0..half {
        let diff = (profile.rho[k] - profile.rho[e_grid.len() - 1 - k]).abs();
        assert!(diff < 1e-6, "asymmetry {diff} at E = {}", e_grid[k]);
    }
    // Far tails carry no mass.
    assert!(profile.rho[0] < RHO_FLOOR && profile.rho[e_grid.len() - 1] < RHO_FLOOR);
}

#[test]
fn support_endpoints_are_localized_within_one_grid_step() {
    let kernel = KappaKernel::flat(32);
    let e_grid = grid(-2.5, 2.5, 0.05);
    let opts = SolveOpts {
        max_iter: Some(1_000_000),
        ..SolveOpts::default()
    };
    let profile = density_profile(None, &kernel, &e_grid, Some(1e-3), &opts).unwrap();
    assert!(profile.converged.iter().all(|&c| c));
    let runs = support_estimate(&profile).unwrap();
    assert_eq!(runs.len(), 1, "runs: {runs:?}");
    let (lo, hi) = runs[0];
    assert!((lo + 2.0).abs() <= 0.05, "lower edge {lo}");
    assert!((hi - 2.0).abs() <= 0.05, "upper edge {hi}");
}

#[test]
fn probes_outside_the_band_stay_below_the_floor() {
    let kernel = KappaKernel::flat(32);
    for e in [-3.0, 3.0] {
        let rho = rho_at(None, &kernel, e, 1e-3, 100_000);
        assert!(rho < RHO_FLOOR, "rho({e}) = {rho}");
    }
}

#[test]
fn empty_support_and_bad_grids_are_reported() {
    let kernel = KappaKernel::flat(16);
    let e_grid = grid(5.0, 7.0, 0.5);
    let profile = density_profile(None, &kernel, &e_grid, Some(1e-3), &SolveOpts::default()).unwrap();
    assert!(profile.rho.iter().all(|r| r.is_finite() && *r < RHO_FLOOR));
    match support_estimate(&profile) {
        Err(MdeError::EmptySupport) => {}
        other => panic!("expected empty-support error, got {other:?}"),
    }
    for bad in [vec![1.0], vec![1.0, 1.0], vec![1.0, 0.5], vec![0.0, f64::NAN]] {
        match density_profile(None, &kernel, &bad, Some(1e-3), &SolveOpts::default()) {
            Err(MdeError::InvalidArgument(_)) => {}
            other => panic!("grid {bad:?} should be rejected, got {other:?}"),
        }
    }
    match density_profile(None, &kernel, &[0.0, 1.0], Some(-1.0), &SolveOpts::default()) {
        Err(MdeError::InvalidArgument(_)) => {}
        other => panic!("negative offset should be rejected, got {other:?}"),
    }
}

/// A profile point must equal an isolated solve at the same parameter.
#[test]
fn profile_points_match_direct_solves() {
    let kernel = KappaKernel::wigner(64);
    let e_grid = vec![0.45, 0.5, 0.55];
    let profile = density_profile(None, &kernel, &e_grid, Some(0.01), &SolveOpts::default()).unwrap();
    let direct = rho_at(None, &kernel, 0.5, 0.01, 100_000);
    assert!(
        (profile.rho[1] - direct).abs() < 1e-9,
        "profile {} vs direct {direct}",
        profile.rho[1]
    );
}

/// A symmetric two-level deformation at critical strength: the mean-field
/// equation reduces (via the substitution w = z + ⟨M⟩) to z = w³/(w² − 1),
/// whose stationary points put the band edges at ±3√3/2. The profile must
/// localize that edge, and the spectrum of one large sampled matrix with
/// the same deformation must end at the same place.
#[test]
fn deformed_edges_match_a_sampled_spectrum() {
    let edge = 1.5 * 3.0f64.sqrt();

    // Mean-field side: the two-level model is exactly dimension-free, so
    // n = 2 with expectation diag(1, −1) gives the limiting law directly.
    let kernel = KappaKernel::flat(2);
    let mut a = Array2::<f64>::zeros((2, 2));
    a[(0, 0)] = 1.0;
    a[(1, 1)] = -1.0;
    let e_grid = grid(2.45, 2.75, 0.005);
    let opts = SolveOpts {
        max_iter: Some(1_000_000),
        ..SolveOpts::default()
    };
    let profile = density_profile(Some(&a), &kernel, &e_grid, Some(2e-4), &opts).unwrap();
    let runs = support_estimate(&profile).unwrap();
    assert_eq!(runs.len(), 1, "runs: {runs:?}");
    let (_, hi) = runs[runs.len() - 1];
    assert!((hi - edge).abs() <= 0.01, "detected edge {hi} vs {edge}");

    // Sampled side: one independent-entry draw of dimension 2048 around the
    // two-level expectation; extreme eigenvalues fluctuate at the N^{-2/3}
    // scale, far inside the 0.05 window.
    let n = 2048;
    let mut levels = vec![1.0; n / 2];
    levels.extend(vec![-1.0; n / 2]);
    let model = CorrelationModel::with_expectation(
        ModelKind::Deformed,
        Symmetry::RealSymmetric,
        n,
        ASpec::Diag(levels),
        None,
    )
    .unwrap();
    let sample = match sample_matrix(&model, 7).unwrap() {
        MatrixSample::Real(h) => h,
        MatrixSample::Complex(_) => unreachable!(),
    };
    let eigs = numerics::sym_eigenvalues(&sample).unwrap();
    let lambda_min = eigs[0];
    let lambda_max = eigs[eigs.len() - 1];
    assert!(
        (lambda_max - edge).abs() <= 0.05,
        "sampled top eigenvalue {lambda_max} vs mean-field edge {edge}"
    );
    assert!(
        (lambda_min + edge).abs() <= 0.05,
        "sampled bottom eigenvalue {lambda_min} vs mean-field edge {}",
        -edge
    );
}

/// A stronger two-level deformation opens a genuine gap: the profile must
/// resolve two bands, and the gap is a converged low-density region, not a
/// solver failure.
#[test]
fn a_spectral_gap_is_resolved_into_two_bands() {
    // For expectation diag(α, −α) the substitution w = z + ⟨M⟩ gives
    // z = w(α² − w² − 1)/(α² − w²); at α = 2 the stationary points solve
    // w⁴ − 9w² + 12 = 0, giving inner and outer band edges.
    let z_of = |w: f64| w * (3.0 - w * w) / (4.0 - w * w);
    let disc = (81.0f64 - 48.0).sqrt();
    let w_inner = ((9.0 - disc) / 2.0).sqrt();
    let w_outer = ((9.0 + disc) / 2.0).sqrt();
    let inner = z_of(w_inner);
    let outer = z_of(w_outer);
    assert!(inner > 0.5 && outer > inner, "edge algebra: {inner}, {outer}");

    let kernel = KappaKernel::flat(2);
    let mut a = Array2::<f64>::zeros((2, 2));
    a[(0, 0)] = 2.0;
    a[(1, 1)] = -2.0;
    let e_grid = grid(-4.0, 4.0, 0.05);
    let opts = SolveOpts {
        max_iter: Some(1_000_000),
        ..SolveOpts::default()
    };
    let profile = density_profile(Some(&a), &kernel, &e_grid, Some(1e-3), &opts).unwrap();
    assert!(profile.converged.iter().all(|&c| c), "gap points must converge");
    let mid = e_grid.len() / 2;
    assert!(profile.rho[mid] < RHO_FLOOR, "center of the gap is empty");
    let runs = support_estimate(&profile).unwrap();
    assert_eq!(runs.len(), 2, "runs: {runs:?}");
    let (lo0, hi0) = runs[0];
    let (lo1, hi1) = runs[1];
    assert!((lo0 + outer).abs() <= 0.05, "left outer edge {lo0} vs {}", -outer);
    assert!((hi0 + inner).abs() <= 0.05, "left inner edge {hi0} vs {}", -inner);
    assert!((lo1 - inner).abs() <= 0.05, "right inner edge {lo1} vs {inner}");
    assert!((hi1 - outer).abs() <= 0.05, "right outer edge {hi1} vs {outer}");
}

/// Starving the solver marks points as failed instead of aborting the sweep.
#[test]
fn starved_points_are_marked_not_fatal() {
    let kernel = KappaKernel::wigner(8);
    let opts = SolveOpts {
        max_iter: Some(3),
        ..SolveOpts::default()
    };
    let profile =
        density_profile(None, &kernel, &[-0.2, 0.0, 0.2], Some(1e-6), &opts).unwrap();
    assert!(profile.rho.iter().all(|r| r.is_nan()));
    assert!(profile.converged.iter().all(|&c| !c));
    assert!(profile.support.is_empty());
    match support_estimate(&profile) {
        Err(MdeError::EmptySupport) => {}
        other => panic!("expected empty-support error, got {other:?}"),
    }
}
