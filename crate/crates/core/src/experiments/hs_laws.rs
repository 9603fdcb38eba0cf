//! Haagerup–Schultz laws on random non-normal matrices with separated
//! spectra: eigenvalue counts, invariance, lattice operations, similarity
//! covariance and the restriction inequality for angles.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::restriction::restriction_angle_check;
use super::{invalid, max, run_trials, ExperimentError, TrialTable};
use crate::brown_hs::{
    check_lattice_from_schur, check_similarity, hs_projection_from_schur, invariance_residual, Region,
    LATTICE_TOLERANCE,
};
use crate::matrix_lab::linalg::{c64, diagonal_matrix, identity, inverse, matmul, op_norm, schur, CMatrix};
use crate::matrix_lab::sampling::sample_ut;
use crate::seed;

/// Eigenvalue moduli; region boundaries sit halfway between them.
pub const SPECTRAL_RADII: [f64; 4] = [1.0, 2.0, 3.0, 4.0];
pub const INVARIANCE_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HsLawsConfig {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
}

impl HsLawsConfig {
    /// 200 matrices of size 20.
    pub fn reference() -> Self {
        HsLawsConfig {
            n: 20,
            trials: 200,
            seed: 0,
        }
    }
}

/// A random matrix `A (D + T) A⁻¹` with known eigenvalues `diag(D)`, moduli
/// cycling through [`SPECTRAL_RADII`] and uniform phases.
#[derive(Clone, Debug)]
pub struct SeparatedSample {
    pub z: CMatrix,
    pub eigenvalues: Vec<Complex64>,
}

fn general_gaussian(n: usize, seed: u64) -> CMatrix {
    sample_ut(n, seed::derive(seed, 0)) + sample_ut(n, seed::derive(seed, 1)).transpose()
}

pub fn separated_sample(n: usize, seed: u64) -> Result<SeparatedSample, ExperimentError> {
    let mut rng = seed::rng(seed::derive(seed, 0));
    let eigenvalues: Vec<Complex64> = (0..n)
        .map(|j| {
            let theta = rng.random::<f64>() * std::f64::consts::TAU;
            Complex64::from_polar(SPECTRAL_RADII[j % SPECTRAL_RADII.len()], theta)
        })
        .collect();
    let upper = diagonal_matrix(&eigenvalues) + sample_ut(n, seed::derive(seed, 1)) * c64(0.5, 0.0);
    let a = identity(n) + general_gaussian(n, seed::derive(seed, 2)) * c64(0.25, 0.0);
    let z = matmul(&matmul(&a, &upper), &inverse(&a)?);
    Ok(SeparatedSample { z, eigenvalues })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HsLawsTrial {
    pub count_mismatches: usize,
    pub max_invariance_ratio: f64,
    pub max_lattice_distance: f64,
    pub similarity_eigenvalue_distance: f64,
    pub similarity_subspace_distance: f64,
    pub similarity_pass: bool,
    pub cos_full: f64,
    pub cos_restricted: f64,
    pub restriction_pass: bool,
}

impl HsLawsTrial {
    pub fn pass(&self) -> bool {
        self.count_mismatches == 0
            && self.max_invariance_ratio < INVARIANCE_TOLERANCE
            && self.max_lattice_distance < LATTICE_TOLERANCE
            && self.similarity_pass
            && self.restriction_pass
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HsLawsReport {
    pub config: HsLawsConfig,
    pub trace_identity: bool,
    pub max_invariance_ratio: f64,
    pub max_lattice_distance: f64,
    pub max_similarity_subspace_distance: f64,
    pub similarity_failures: usize,
    pub restriction_failures: usize,
    pub pass: bool,
    pub trials: Vec<HsLawsTrial>,
}

/// Regions whose boundaries avoid the spectral radii by at least ½.
pub fn test_regions() -> Vec<Region> {
    vec![
        Region::disc(1.5),
        Region::disc(2.5),
        Region::annulus(1.5, 3.5),
        Region::disc(3.5).complement(),
        Region::union(vec![Region::disc(1.5), Region::annulus(2.5, 3.5)]),
    ]
}

pub fn hs_laws_trial(n: usize, seed: u64) -> Result<HsLawsTrial, ExperimentError> {
    let sample = separated_sample(n, seed)?;
    let z = &sample.z;
    let z_norm = op_norm(z);
    let form = schur(z)?;
    let regions = test_regions();
    let mut count_mismatches = 0;
    let mut max_invariance_ratio: f64 = 0.0;
    for region in &regions {
        let p = hs_projection_from_schur(&form, region)?;
        let expected = sample.eigenvalues.iter().filter(|&&l| region.contains(l)).count();
        if p.rank() != expected || (p.trace() * n as f64 - expected as f64).abs() > 1e-9 {
            count_mismatches += 1;
        }
        max_invariance_ratio = max_invariance_ratio.max(invariance_residual(z, &p) / z_norm);
    }
    let mut max_lattice_distance: f64 = 0.0;
    for (b1, b2) in [(0, 2), (1, 2), (1, 3), (2, 4)] {
        let rep = check_lattice_from_schur(&form, &regions[b1], &regions[b2])?;
        max_lattice_distance = max_lattice_distance
            .max(rep.union_distance)
            .max(rep.intersection_distance);
    }
    let a = identity(n) + general_gaussian(n, seed::derive(seed, 3)) * c64(0.25, 0.0);
    let sim = check_similarity(z, &a, &regions[1])?;
    let restriction = restriction_angle_check(z, &regions[2], &Region::disc(2.5))?;
    Ok(HsLawsTrial {
        count_mismatches,
        max_invariance_ratio,
        max_lattice_distance,
        similarity_eigenvalue_distance: sim.eigenvalue_distance,
        similarity_subspace_distance: sim.subspace_distance,
        similarity_pass: sim.pass,
        cos_full: restriction.cos_full,
        cos_restricted: restriction.cos_restricted,
        restriction_pass: restriction.pass,
    })
}

pub fn hs_laws(cfg: &HsLawsConfig) -> Result<HsLawsReport, ExperimentError> {
    if cfg.n < SPECTRAL_RADII.len() || cfg.trials == 0 {
        return invalid(format!("need n ≥ {} and trials ≥ 1", SPECTRAL_RADII.len()));
    }
    let trials = run_trials(cfg.trials, cfg.seed, |_, s| hs_laws_trial(cfg.n, s))?;
    let pick = |f: fn(&HsLawsTrial) -> f64| max(&trials.iter().map(f).collect::<Vec<_>>());
    let pass = trials.iter().all(HsLawsTrial::pass);
    Ok(HsLawsReport {
        config: cfg.clone(),
        trace_identity: trials.iter().all(|t| t.count_mismatches == 0),
        max_invariance_ratio: pick(|t| t.max_invariance_ratio),
        max_lattice_distance: pick(|t| t.max_lattice_distance),
        max_similarity_subspace_distance: pick(|t| t.similarity_subspace_distance),
        similarity_failures: trials.iter().filter(|t| !t.similarity_pass).count(),
        restriction_failures: trials.iter().filter(|t| !t.restriction_pass).count(),
        pass,
        trials,
    })
}

impl TrialTable for HsLawsReport {
    fn csv_header(&self) -> Vec<&'static str> {
        vec![
            "trial",
            "count_mismatches",
            "invariance_ratio",
            "lattice_distance",
            "similarity_subspace_distance",
            "cos_full",
            "cos_restricted",
            "pass",
        ]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.trials
            .iter()
            .enumerate()
            .map(|(i, t)| {
                vec![
                    i.to_string(),
                    t.count_mismatches.to_string(),
                    format!("{:e}", t.max_invariance_ratio),
                    format!("{:e}", t.max_lattice_distance),
                    format!("{:e}", t.similarity_subspace_distance),
                    format!("{:e}", t.cos_full),
                    format!("{:e}", t.cos_restricted),
                    t.pass().to_string(),
                ]
            })
            .collect()
    }
}
