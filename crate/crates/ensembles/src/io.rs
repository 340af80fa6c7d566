//! A tiny binary matrix container: magic `MDEM`, little-endian `u32`
//! dimension, a `u8` field flag (0 real, 1 complex), then row-major `f64`
//! entries (`re, im` interleaved in the complex case). Round trips are
//! bit-identical.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::Array2;
use numerics::C64;

use crate::{EnsembleError, Result};

const MAGIC: &[u8; 4] = b"MDEM";
const MAX_DIM: u32 = 1 << 20;

/// A matrix read from or written to the container format.
#[derive(Debug, Clone, PartialEq)]
pub enum MatrixData {
    Real(Array2<f64>),
    Complex(Array2<C64>),
}

impl MatrixData {
    pub fn n(&self) -> usize {
        match self {
            MatrixData::Real(m) => m.nrows(),
            MatrixData::Complex(m) => m.nrows(),
        }
    }
}

pub fn write_matrix(path: &Path, data: &MatrixData) -> Result<()> {
    let n = match data {
        MatrixData::Real(m) => square_dim(m.nrows(), m.ncols())?,
        MatrixData::Complex(m) => square_dim(m.nrows(), m.ncols())?,
    };
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(MAGIC)?;
    out.write_all(&(n as u32).to_le_bytes())?;
    match data {
        MatrixData::Real(m) => {
            out.write_all(&[0u8])?;
            for v in m.iter() {
                out.write_all(&v.to_le_bytes())?;
            }
        }
        MatrixData::Complex(m) => {
            out.write_all(&[1u8])?;
            for v in m.iter() {
                out.write_all(&v.re.to_le_bytes())?;
                out.write_all(&v.im.to_le_bytes())?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

pub fn read_matrix(path: &Path) -> Result<MatrixData> {
    let mut input = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic).map_err(|_| truncated(path))?;
    if &magic != MAGIC {
        return Err(EnsembleError::Parse(format!(
            "{} is not a matrix container (bad magic)",
            path.display()
        )));
    }
    let mut dim_bytes = [0u8; 4];
    input
        .read_exact(&mut dim_bytes)
        .map_err(|_| truncated(path))?;
    let n = u32::from_le_bytes(dim_bytes);
    if n == 0 || n > MAX_DIM {
        return Err(EnsembleError::Parse(format!(
            "{} declares dimension {n}, outside 1..={MAX_DIM}",
            path.display()
        )));
    }
    let n = n as usize;
    let mut flag = [0u8; 1];
    input.read_exact(&mut flag).map_err(|_| truncated(path))?;
    let per_entry = match flag[0] {
        0 => 1,
        1 => 2,
        other => {
            return Err(EnsembleError::Parse(format!(
                "{} has unknown field flag {other}",
                path.display()
            )))
        }
    };
    let mut payload = Vec::new();
    input.read_to_end(&mut payload)?;
    let expected = n * n * per_entry * 8;
    if payload.len() != expected {
        return Err(EnsembleError::Parse(format!(
            "{} has {} payload bytes, expected {expected}",
            path.display(),
            payload.len()
        )));
    }
    let mut floats = Vec::with_capacity(n * n * per_entry);
    for chunk in payload.chunks_exact(8) {
        floats.push(f64::from_le_bytes(chunk.try_into().expect("8-byte chunk")));
    }
    if flag[0] == 0 {
        let m = Array2::from_shape_vec((n, n), floats).expect("length checked");
        Ok(MatrixData::Real(m))
    } else {
        let entries: Vec<C64> = floats
            .chunks_exact(2)
            .map(|p| C64::new(p[0], p[1]))
            .collect();
        let m = Array2::from_shape_vec((n, n), entries).expect("length checked");
        Ok(MatrixData::Complex(m))
    }
}

fn square_dim(rows: usize, cols: usize) -> Result<usize> {
    if rows != cols || rows == 0 || rows as u32 > MAX_DIM {
        return Err(EnsembleError::InvalidArgument(format!(
            "container matrices must be square and nonempty, got {rows}×{cols}"
        )));
    }
    Ok(rows)
}

fn truncated(path: &Path) -> EnsembleError {
    EnsembleError::Parse(format!("{} is truncated", path.display()))
}
