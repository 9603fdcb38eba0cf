//! Matrix serialization.
//!
//! Binary layout: `rows: u64 LE`, `cols: u64 LE`, then `rows·cols` pairs of
//! `f64 LE` (real, imaginary) in row-major order. JSON layout:
//! `{"rows": r, "cols": c, "re": [...], "im": [...]}`, row-major.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::linalg::{c64, CMatrix};
use super::MatrixError;

pub fn write_binary<W: Write>(m: &CMatrix, mut w: W) -> Result<(), MatrixError> {
    let io = |e: std::io::Error| MatrixError::Io(e.to_string());
    w.write_all(&(m.nrows() as u64).to_le_bytes()).map_err(io)?;
    w.write_all(&(m.ncols() as u64).to_le_bytes()).map_err(io)?;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            w.write_all(&z.re.to_le_bytes()).map_err(io)?;
            w.write_all(&z.im.to_le_bytes()).map_err(io)?;
        }
    }
    Ok(())
}

pub fn read_binary<R: Read>(mut r: R) -> Result<CMatrix, MatrixError> {
    let io = |e: std::io::Error| MatrixError::Io(e.to_string());
    let mut word = [0u8; 8];
    r.read_exact(&mut word).map_err(io)?;
    let rows = u64::from_le_bytes(word) as usize;
    r.read_exact(&mut word).map_err(io)?;
    let cols = u64::from_le_bytes(word) as usize;
    let count = rows
        .checked_mul(cols)
        .ok_or_else(|| MatrixError::Io("dimensions overflow".into()))?;
    let mut data = Vec::with_capacity(count.min(1 << 24));
    for _ in 0..count {
        r.read_exact(&mut word).map_err(io)?;
        let re = f64::from_le_bytes(word);
        r.read_exact(&mut word).map_err(io)?;
        let im = f64::from_le_bytes(word);
        if !(re.is_finite() && im.is_finite()) {
            return Err(MatrixError::Io("non-finite entry".into()));
        }
        data.push(c64(re, im));
    }
    Ok(CMatrix::from_row_slice(rows, cols, &data))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<&CMatrix> for MatrixJson {
    fn from(m: &CMatrix) -> Self {
        let entries: Vec<_> = (0..m.nrows())
            .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
            .map(|ij| m[ij])
            .collect();
        MatrixJson {
            rows: m.nrows(),
            cols: m.ncols(),
            re: entries.iter().map(|z| z.re).collect(),
            im: entries.iter().map(|z| z.im).collect(),
        }
    }
}

impl TryFrom<MatrixJson> for CMatrix {
    type Error = MatrixError;

    fn try_from(j: MatrixJson) -> Result<Self, Self::Error> {
        if j.re.len() != j.rows * j.cols || j.im.len() != j.re.len() {
            return Err(MatrixError::Io("entry count does not match dimensions".into()));
        }
        let data: Vec<_> = j.re.iter().zip(&j.im).map(|(&re, &im)| c64(re, im)).collect();
        Ok(CMatrix::from_row_slice(j.rows, j.cols, &data))
    }
}
