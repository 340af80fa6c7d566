//! On-disk artifacts: density CSV and solution matrix + JSON sidecar.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use ensembles::{write_matrix, MatrixData};
use serde::{Deserialize, Serialize};

use crate::density::DensityProfile;
use crate::solve::MdeSolution;
use crate::Result;

/// Sidecar metadata stored next to a solution matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionMeta {
    pub z_re: f64,
    pub z_im: f64,
    pub residual: f64,
    pub iterations: usize,
    pub im_min: f64,
}

/// Writes `E,rho,eta,converged` rows; failed grid points carry `NaN`.
pub fn write_density_csv(profile: &DensityProfile, path: &Path) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "E,rho,eta,converged")?;
    for i in 0..profile.energies.len() {
        writeln!(
            out,
            "{},{},{},{}",
            profile.energies[i],
            profile.rho[i],
            profile.eta_eval,
            u8::from(profile.converged[i]),
        )?;
    }
    out.flush()?;
    Ok(())
}

/// Writes the solution matrix in the shared binary format plus a JSON
/// sidecar with the scalar diagnostics.
pub fn write_solution_files(
    solution: &MdeSolution,
    matrix_path: &Path,
    json_path: &Path,
) -> Result<()> {
    write_matrix(matrix_path, &MatrixData::Complex(solution.m.clone()))?;
    let meta = SolutionMeta {
        z_re: solution.z.re,
        z_im: solution.z.im,
        residual: solution.residual,
        iterations: solution.iterations,
        im_min: solution.im_min,
    };
    let mut out = BufWriter::new(File::create(json_path)?);
    serde_json::to_writer_pretty(&mut out, &meta)?;
    out.flush()?;
    Ok(())
}
