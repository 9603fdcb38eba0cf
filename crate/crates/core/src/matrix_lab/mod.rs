//! Finite-N random-matrix realizations of semicircular and DT-type operators
//! and the dense linear algebra they rely on.

pub mod io;
pub mod linalg;
pub mod measure;
pub mod sampling;
pub mod words;

use thiserror::Error;

pub use linalg::{CMatrix, LinalgError, SchurForm};
pub use measure::{Atom, RadialMeasure};
pub use sampling::{
    build_block_dt, build_dt, diag_from_measure, sample_gue, sample_ut, semicircular_mix, MatrixModel, ModelBlock,
};

#[derive(Debug, Error)]
pub enum MatrixError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("measure resolution exceeds N: atom {atom} receives no slot at N = {n}")]
    Resolution { atom: usize, n: usize },
    #[error("block {block} has size {size}, need at least 2")]
    BlockTooSmall { block: usize, size: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix I/O: {0}")]
    Io(String),
}
