//! Round trips for the on-disk artifacts: density CSV rows and the
//! solution matrix with its JSON sidecar.

use ensembles::{read_matrix, KappaKernel, MatrixData};
use mde::{
    density_profile, solve_mde, write_density_csv, write_solution_files, SolutionMeta, SolveOpts,
};
use numerics::C64;
use std::path::PathBuf;

fn temp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("mde-artifacts-{}-{name}", std::process::id()));
    p
}

#[test]
fn density_csv_round_trips_including_failed_points() {
    let kernel = KappaKernel::flat(8);
    let mut profile =
        density_profile(None, &kernel, &[-0.5, 0.0, 0.5], Some(0.05), &SolveOpts::default())
            .unwrap();
    // Forge one failed grid point to pin the on-disk convention for it.
    profile.rho[1] = f64::NAN;
    profile.converged[1] = false;

    let path = temp_path("density.csv");
    write_density_csv(&profile, &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();

    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("E,rho,eta,converged"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 3);
    for (row, &e) in rows.iter().zip(&[-0.5, 0.0, 0.5]) {
        assert_eq!(row.len(), 4);
        assert_eq!(row[0].parse::<f64>().unwrap(), e);
        assert_eq!(row[2].parse::<f64>().unwrap(), profile.eta_eval);
    }
    assert_eq!(rows[0][1].parse::<f64>().unwrap(), profile.rho[0]);
    assert_eq!(rows[0][3], "1");
    assert_eq!(rows[1][1], "NaN");
    assert_eq!(rows[1][3], "0");
    assert_eq!(rows[2][3], "1");
}

#[test]
fn solution_files_round_trip_bitwise() {
    let kernel = KappaKernel::wigner(6);
    let z = C64::new(0.3, 0.8);
    let solution = solve_mde(None, &kernel, z, &SolveOpts::default()).unwrap();

    let matrix_path = temp_path("solution.mdem");
    let json_path = temp_path("solution.json");
    write_solution_files(&solution, &matrix_path, &json_path).unwrap();

    let matrix = match read_matrix(&matrix_path).unwrap() {
        MatrixData::Complex(m) => m,
        MatrixData::Real(_) => panic!("solution matrix must be stored as complex"),
    };
    assert_eq!(matrix.shape(), solution.m.shape());
    for (a, b) in matrix.iter().zip(solution.m.iter()) {
        assert_eq!(a.re.to_bits(), b.re.to_bits());
        assert_eq!(a.im.to_bits(), b.im.to_bits());
    }

    let meta: SolutionMeta =
        serde_json::from_reader(std::fs::File::open(&json_path).unwrap()).unwrap();
    assert_eq!(meta.z_re.to_bits(), z.re.to_bits());
    assert_eq!(meta.z_im.to_bits(), z.im.to_bits());
    assert_eq!(meta.residual.to_bits(), solution.residual.to_bits());
    assert_eq!(meta.iterations, solution.iterations);
    assert_eq!(meta.im_min.to_bits(), solution.im_min.to_bits());

    std::fs::remove_file(&matrix_path).ok();
    std::fs::remove_file(&json_path).ok();
}
