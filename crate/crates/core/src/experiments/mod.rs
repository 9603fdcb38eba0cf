//! Experiment drivers: the two-annulus angle construction and its bound,
//! trace and norm inequalities for DT models, restriction laws, and the
//! concentration families that drive the angle to zero.

pub mod concentration;
pub mod hs_laws;
pub mod inequalities;
pub mod moments;
pub mod restriction;
pub mod two_annulus;

use rayon::prelude::*;
use thiserror::Error;

use crate::brown_hs::HsError;
use crate::cumulant::EngineError;
use crate::matrix_lab::{LinalgError, MatrixError};
use crate::seed;

pub use concentration::{concentration_family, ConcentrationFamilyConfig, ConcentrationReport};
pub use two_annulus::{run_two_annulus, two_annulus_bound, AngleExperimentConfig, AngleReport, TwoAnnulusBound};

/// Relative slack on limit inequalities checked at finite `N`.
pub const FINITE_N_SLACK: f64 = 0.05;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Hs(#[from] HsError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("series truncation residual {residual:e} exceeds cap {cap:e}")]
    Truncation { residual: f64, cap: f64 },
    #[error("empty annulus: {0}")]
    EmptyAnnulus(String),
}

impl ExperimentError {
    /// Whether the failure is numerical rather than a configuration problem.
    pub fn is_numerical(&self) -> bool {
        !matches!(
            self,
            ExperimentError::InvalidConfig(_) | ExperimentError::EmptyAnnulus(_)
        ) && !matches!(self, ExperimentError::Matrix(MatrixError::InvalidMeasure(_)))
            && !matches!(self, ExperimentError::Matrix(MatrixError::InvalidParameter(_)))
            && !matches!(self, ExperimentError::Hs(HsError::InvalidRegion(_)))
    }
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T, ExperimentError> {
    Err(ExperimentError::InvalidConfig(msg.into()))
}

/// Runs `trials` independent trials in parallel; trial `i` receives
/// `seed::trial_seed(seed, i)`. Results are returned in index order.
pub fn run_trials<T, F>(trials: usize, seed: u64, f: F) -> Result<Vec<T>, ExperimentError>
where
    T: Send,
    F: Fn(usize, u64) -> Result<T, ExperimentError> + Sync + Send,
{
    (0..trials)
        .into_par_iter()
        .map(|i| f(i, seed::trial_seed(seed, i)))
        .collect()
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

pub fn min(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn max(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Per-trial rows for flat CSV export.
pub trait TrialTable {
    fn csv_header(&self) -> Vec<&'static str>;
    fn csv_rows(&self) -> Vec<Vec<String>>;

    fn to_csv(&self) -> String {
        let mut out = self.csv_header().join(",");
        out.push('\n');
        for row in self.csv_rows() {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}
