//! Spectral-density profiles along an energy grid, with warm-started
//! continuation and support detection.

use ensembles::KappaKernel;
use ndarray::Array2;
use numerics::C64;

use crate::engine::{ladder_solve, Engine, Rep};
use crate::solve::SolveOpts;
use crate::{MdeError, Result};

/// Density threshold separating bulk from numerical noise.
pub const RHO_FLOOR: f64 = 1e-3;

/// The self-consistent density sampled on a grid at fixed spectral offset.
#[derive(Debug, Clone)]
pub struct DensityProfile {
    pub energies: Vec<f64>,
    /// Density values; `NaN` marks grid points whose solve failed.
    pub rho: Vec<f64>,
    pub eta_eval: f64,
    pub converged: Vec<bool>,
    /// Maximal runs of grid points with density above [`RHO_FLOOR`],
    /// endpoints linearly interpolated to the threshold crossing.
    pub support: Vec<(f64, f64)>,
}

/// Sweeps the grid left to right, warm-starting each point from its left
/// neighbor and falling back to a fresh continuation ladder when the warm
/// start fails. Failed points are marked and skipped, not fatal.
pub fn density_profile(
    a: Option<&Array2<f64>>,
    kernel: &KappaKernel,
    e_grid: &[f64],
    eta_eval: Option<f64>,
    opts: &SolveOpts,
) -> Result<DensityProfile> {
    if e_grid.len() < 2 {
        return Err(MdeError::InvalidArgument(
            "energy grid needs at least two points".into(),
        ));
    }
    if e_grid.iter().any(|e| !e.is_finite()) {
        return Err(MdeError::InvalidArgument(
            "energy grid must be finite".into(),
        ));
    }
    if e_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(MdeError::InvalidArgument(
            "energy grid must be strictly increasing".into(),
        ));
    }
    let span = e_grid[e_grid.len() - 1] - e_grid[0];
    let eta = match eta_eval {
        Some(v) => {
            if !v.is_finite() || v <= 0.0 {
                return Err(MdeError::InvalidArgument(format!(
                    "evaluation offset must be positive and finite, got {v}"
                )));
            }
            v
        }
        None => 1e-3 * span,
    };
    let engine = Engine::new(a, kernel, false)?;
    let n = engine.n as f64;
    let tol = opts.tol() * 0.5;
    let max_iter = opts.max_iter();

    let mut rho = Vec::with_capacity(e_grid.len());
    let mut converged = Vec::with_capacity(e_grid.len());
    let mut warm: Option<Rep> = None;
    for &e in e_grid {
        let z = C64::new(e, eta);
        let attempt = match &warm {
            Some(rep) => ladder_solve(&engine, z, Some(rep.clone()), tol, max_iter)
                .or_else(|_| ladder_solve(&engine, z, None, tol, max_iter)),
            None => ladder_solve(&engine, z, None, tol, max_iter),
        };
        match attempt {
            Ok((rep, _)) => {
                let density = engine.trace(&rep).im / (std::f64::consts::PI * n);
                rho.push(density);
                converged.push(true);
                warm = Some(rep);
            }
            Err(_) => {
                rho.push(f64::NAN);
                converged.push(false);
                warm = None;
            }
        }
    }
    let support = support_runs(e_grid, &rho, &converged);
    Ok(DensityProfile {
        energies: e_grid.to_vec(),
        rho,
        eta_eval: eta,
        converged,
        support,
    })
}

/// The support intervals of a computed profile; errors when the density
/// never rises above the floor.
pub fn support_estimate(profile: &DensityProfile) -> Result<Vec<(f64, f64)>> {
    let runs = support_runs(&profile.energies, &profile.rho, &profile.converged);
    if runs.is_empty() {
        return Err(MdeError::EmptySupport);
    }
    Ok(runs)
}

fn support_runs(energies: &[f64], rho: &[f64], converged: &[bool]) -> Vec<(f64, f64)> {
    let above = |i: usize| converged[i] && rho[i] > RHO_FLOOR;
    let crossing = |inside: usize, outside: usize| -> f64 {
        // Linear interpolation of the floor crossing between a point inside
        // the support and a converged neighbor below the floor.
        if !converged[outside] || !rho[outside].is_finite() {
            return energies[inside];
        }
        let (e0, r0) = (energies[outside], rho[outside]);
        let (e1, r1) = (energies[inside], rho[inside]);
        if (r1 - r0).abs() < f64::MIN_POSITIVE {
            return energies[inside];
        }
        e0 + (RHO_FLOOR - r0) * (e1 - e0) / (r1 - r0)
    };
    let mut runs = Vec::new();
    let mut start: Option<usize> = None;
    for i in 0..energies.len() {
        if above(i) {
            if start.is_none() {
                start = Some(i);
            }
            continue;
        }
        if let Some(s) = start.take() {
            runs.push((s, i - 1));
        }
    }
    if let Some(s) = start {
        runs.push((s, energies.len() - 1));
    }
    runs.into_iter()
        .map(|(i0, i1)| {
            let left = if i0 == 0 {
                energies[0]
            } else {
                crossing(i0, i0 - 1)
            };
            let right = if i1 == energies.len() - 1 {
                energies[i1]
            } else {
                crossing(i1, i1 + 1)
            };
            (left, right)
        })
        .collect()
}
