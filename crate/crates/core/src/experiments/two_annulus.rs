//! The two-annulus angle construction.
//!
//! For `μ = t·μ₁ + (1−t)·μ₂` with `μ₁` on `A(r, r′)` and `μ₂` on `A(s′, s)`,
//! a DT(μ, c) operator is block upper triangular, `Z = [[Z₁, B], [0, Z₂]]`
//! with `B = c p X (1−p)`. The series `Y = Σ Z₁ᵏ B Z₂^{−k−1}` solves
//! `Y Z₂ − Z₁ Y = B`, and the invariant subspace for `A(s′, s)` is the graph
//! `{(Yη, η)}`. Comparing `(Yη, η)` with `(Yη, 0)` bounds the angle between
//! the two invariant subspaces from above, so its cosine from below:
//!
//! `cos α ≥ (1 + (s² − r²) / (c² max(t, 1−t)))^{−1/2}`.

use serde::{Deserialize, Serialize};

use super::{invalid, max, mean, min, run_trials, ExperimentError, TrialTable};
use crate::brown_hs::{angle_cos, hs_projection_from_schur, Region};
use crate::matrix_lab::linalg::{block, frobenius_sq, inverse, matmul, op_norm, power, schur, CMatrix};
use crate::matrix_lab::{build_block_dt, RadialMeasure};

/// Required fraction of the limit bounds reached at finite `N`.
pub const FINITE_N_FRACTION: f64 = 0.9;
/// Slack in `cos_vector ≤ cos_subspace`.
pub const VECTOR_SLACK: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TwoAnnulusBound {
    /// `(1 + (s² − r²)/(c² max(t, 1−t)))^{−1/2}`.
    pub sharp: f64,
    /// `(1 + 2(s² − r²)/c²)^{−1/2}`, valid for every `t`.
    pub uniform: f64,
}

pub fn two_annulus_bound(r: f64, s: f64, c: f64, t: f64) -> Result<TwoAnnulusBound, ExperimentError> {
    if !(r >= 0.0 && s > r && s.is_finite()) {
        return invalid(format!("need 0 ≤ r < s, got r = {r}, s = {s}"));
    }
    if !(c > 0.0 && c.is_finite()) {
        return invalid(format!("need c > 0, got {c}"));
    }
    if !(t > 0.0 && t < 1.0) {
        return invalid(format!("need t in (0, 1), got {t}"));
    }
    let gap = s * s - r * r;
    Ok(TwoAnnulusBound {
        sharp: (1.0 + gap / (c * c * t.max(1.0 - t))).powf(-0.5),
        uniform: (1.0 + 2.0 * gap / (c * c)).powf(-0.5),
    })
}

/// `c² t (1−t) / (s² − r²)`, the lower bound on `‖Y (1−p)‖₂²`.
pub fn ynorm_sq_bound(r: f64, s: f64, c: f64, t: f64) -> f64 {
    c * c * t * (1.0 - t) / (s * s - r * r)
}

fn default_atoms() -> usize {
    2
}

fn default_residual_cap() -> f64 {
    1e-6
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AngleExperimentConfig {
    pub r: f64,
    pub r_prime: f64,
    pub s_prime: f64,
    pub s: f64,
    pub t: f64,
    pub c: f64,
    pub n: usize,
    /// Number of terms kept in the `Y` series.
    pub k: usize,
    pub trials: usize,
    pub seed: u64,
    /// Circles per annulus, equally spaced in its interior.
    #[serde(default = "default_atoms")]
    pub atoms_per_annulus: usize,
    /// Abort when the truncation residual exceeds this multiple of `‖Z‖`.
    #[serde(default = "default_residual_cap")]
    pub residual_cap: f64,
}

impl AngleExperimentConfig {
    /// `r = 1, r′ = 1.05, s′ = 1.9, s = 2, t = ½, c = 1, N = 256, K = 40`,
    /// 20 trials.
    pub fn reference() -> Self {
        AngleExperimentConfig {
            r: 1.0,
            r_prime: 1.05,
            s_prime: 1.9,
            s: 2.0,
            t: 0.5,
            c: 1.0,
            n: 256,
            k: 40,
            trials: 20,
            seed: 0,
            atoms_per_annulus: default_atoms(),
            residual_cap: default_residual_cap(),
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let AngleExperimentConfig {
            r, r_prime, s_prime, s, ..
        } = *self;
        if !(0.0 <= r && r < r_prime && r_prime < s_prime && s_prime < s && s.is_finite()) {
            return invalid(format!("need 0 ≤ r < r′ < s′ < s, got {r}, {r_prime}, {s_prime}, {s}"));
        }
        if !(self.t > 0.0 && self.t < 1.0) {
            return invalid(format!("need t in (0, 1), got {}", self.t));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return invalid(format!("need c > 0, got {}", self.c));
        }
        if self.n < 4 || self.k == 0 || self.trials == 0 || self.atoms_per_annulus == 0 {
            return invalid("n ≥ 4, k ≥ 1, trials ≥ 1 and atoms_per_annulus ≥ 1 are required");
        }
        if !(self.residual_cap > 0.0) {
            return invalid("residual_cap must be positive");
        }
        Ok(())
    }

    /// `(μ₁, μ₂)`: equal-weight circles at the midpoints of `m` equal
    /// subintervals of `[r, r′]` and of `[s′, s]`.
    pub fn measures(&self) -> Result<(RadialMeasure, RadialMeasure), ExperimentError> {
        let m = self.atoms_per_annulus;
        let spread = |lo: f64, hi: f64| -> Vec<(f64, f64)> {
            (0..m)
                .map(|j| (lo + (hi - lo) * (j as f64 + 0.5) / m as f64, 1.0))
                .collect()
        };
        Ok((
            RadialMeasure::normalized(&spread(self.r, self.r_prime))?,
            RadialMeasure::normalized(&spread(self.s_prime, self.s))?,
        ))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwoAnnulusTrial {
    pub index: usize,
    pub seed: u64,
    pub z_norm: f64,
    /// `‖Y_K (1−p)‖₂²`.
    pub ynorm_sq: f64,
    pub cos_vector: f64,
    pub cos_subspace: f64,
    /// `‖Y_K Z₂ − Z₁ Y_K − B‖`, equal to `‖S diag(Z₁, Z₂) S⁻¹ − Z‖`.
    pub identity_residual: f64,
    pub truncation_residual: f64,
    /// `(‖Z₁ᴷ‖ ‖Z₂⁻ᴷ‖)^{1/K}`.
    pub rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AngleChecks {
    pub cos_subspace_reaches_bound: bool,
    pub ynorm_sq_reaches_bound: bool,
    pub identity_within_truncation: bool,
    pub vector_below_subspace: bool,
    pub rate_below_target: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AngleReport {
    pub config: AngleExperimentConfig,
    pub cos_bound: f64,
    pub bound_uniform: f64,
    pub ynorm_sq_limit: f64,
    pub ynorm_sq_est: f64,
    pub cos_vector_est: f64,
    pub cos_subspace_est: f64,
    pub cos_subspace_min: f64,
    /// Largest truncation residual over the trials.
    pub truncation_residual: f64,
    pub identity_residual: f64,
    pub rate: f64,
    /// `(r′/s′)·1.05`.
    pub rate_target: f64,
    pub checks: AngleChecks,
    /// Pass/fail of the declared criteria; the rate target is advisory.
    pub pass: bool,
    pub trials: Vec<TwoAnnulusTrial>,
}

fn one_trial(
    cfg: &AngleExperimentConfig,
    mu1: &RadialMeasure,
    mu2: &RadialMeasure,
    index: usize,
    seed: u64,
) -> Result<TwoAnnulusTrial, ExperimentError> {
    let model = build_block_dt(&[(mu1.clone(), cfg.t), (mu2.clone(), 1.0 - cfg.t)], cfg.c, cfg.n, seed)?;
    let n = cfg.n;
    let n1 = model.blocks[0].len;
    let n2 = n - n1;
    let z1 = block(&model.z, (0, n1), (0, n1));
    let z2 = block(&model.z, (n1, n2), (n1, n2));
    let b = block(&model.z, (0, n1), (n1, n2));
    let z2_inv = inverse(&z2)?;

    let mut term = matmul(&b, &z2_inv);
    let mut y = term.clone();
    for _ in 1..cfg.k {
        term = matmul(&matmul(&z1, &term), &z2_inv);
        y += &term;
    }

    let identity_residual = op_norm(&(matmul(&y, &z2) - matmul(&z1, &y) - &b));
    let q = op_norm(&power(&z1, cfg.k as u32)) * op_norm(&power(&z2_inv, cfg.k as u32));
    let rate = q.powf(1.0 / cfg.k as f64);
    let truncation_residual = if rate < 1.0 {
        q * op_norm(&b) / (1.0 - rate)
    } else {
        f64::INFINITY
    };
    let z_norm = op_norm(&model.z);
    let cap = cfg.residual_cap * z_norm;
    if !(truncation_residual <= cap) {
        return Err(ExperimentError::Truncation {
            residual: truncation_residual,
            cap,
        });
    }

    // Y (1−p) as an element of M_N occupies the upper right block.
    let ynorm_sq = frobenius_sq(&y) / n as f64;
    let tau_q = n2 as f64 / n as f64;
    let cos_vector = (ynorm_sq / (ynorm_sq + tau_q)).sqrt();

    let form = schur(&model.z)?;
    let inner = hs_projection_from_schur(&form, &Region::annulus(cfg.r, cfg.r_prime))?;
    let outer = hs_projection_from_schur(&form, &Region::annulus(cfg.s_prime, cfg.s))?;
    let cos_subspace = angle_cos(&inner, &outer)?;

    Ok(TwoAnnulusTrial {
        index,
        seed,
        z_norm,
        ynorm_sq,
        cos_vector,
        cos_subspace,
        identity_residual,
        truncation_residual,
        rate,
    })
}

pub fn run_two_annulus(cfg: &AngleExperimentConfig) -> Result<AngleReport, ExperimentError> {
    cfg.validate()?;
    let (mu1, mu2) = cfg.measures()?;
    let bound = two_annulus_bound(cfg.r, cfg.s, cfg.c, cfg.t)?;
    let ybound = ynorm_sq_bound(cfg.r, cfg.s, cfg.c, cfg.t);
    let trials = run_trials(cfg.trials, cfg.seed, |i, s| one_trial(cfg, &mu1, &mu2, i, s))?;

    let col = |f: fn(&TwoAnnulusTrial) -> f64| trials.iter().map(f).collect::<Vec<_>>();
    let ynorm_sq_est = mean(&col(|t| t.ynorm_sq));
    let cos_vector_est = mean(&col(|t| t.cos_vector));
    let cos_subspace_est = mean(&col(|t| t.cos_subspace));
    let rate = max(&col(|t| t.rate));
    let rate_target = cfg.r_prime / cfg.s_prime * 1.05;
    let checks = AngleChecks {
        cos_subspace_reaches_bound: cos_subspace_est >= FINITE_N_FRACTION * bound.sharp,
        ynorm_sq_reaches_bound: ynorm_sq_est >= FINITE_N_FRACTION * ybound,
        identity_within_truncation: trials.iter().all(|t| t.identity_residual <= t.truncation_residual),
        vector_below_subspace: trials.iter().all(|t| t.cos_vector <= t.cos_subspace + VECTOR_SLACK),
        rate_below_target: rate < rate_target,
    };
    let pass = checks.cos_subspace_reaches_bound
        && checks.ynorm_sq_reaches_bound
        && checks.identity_within_truncation
        && checks.vector_below_subspace;
    Ok(AngleReport {
        config: cfg.clone(),
        cos_bound: bound.sharp,
        bound_uniform: bound.uniform,
        ynorm_sq_limit: ybound,
        ynorm_sq_est,
        cos_vector_est,
        cos_subspace_est,
        cos_subspace_min: min(&col(|t| t.cos_subspace)),
        truncation_residual: max(&col(|t| t.truncation_residual)),
        identity_residual: max(&col(|t| t.identity_residual)),
        rate,
        rate_target,
        checks,
        pass,
        trials,
    })
}

impl TrialTable for AngleReport {
    fn csv_header(&self) -> Vec<&'static str> {
        vec![
            "trial",
            "seed",
            "z_norm",
            "ynorm_sq",
            "cos_vector",
            "cos_subspace",
            "identity_residual",
            "truncation_residual",
            "rate",
        ]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.trials
            .iter()
            .map(|t| {
                vec![
                    t.index.to_string(),
                    t.seed.to_string(),
                    format!("{:e}", t.z_norm),
                    format!("{:e}", t.ynorm_sq),
                    format!("{:e}", t.cos_vector),
                    format!("{:e}", t.cos_subspace),
                    format!("{:e}", t.identity_residual),
                    format!("{:e}", t.truncation_residual),
                    format!("{:e}", t.rate),
                ]
            })
            .collect()
    }
}

/// `S = [[1, Y], [0, 1]]`, whose inverse is `[[1, −Y], [0, 1]]`.
pub fn graph_similarity(y: &CMatrix) -> CMatrix {
    let (n1, n2) = y.shape();
    let mut s = CMatrix::identity(n1 + n2, n1 + n2);
    s.view_mut((0, n1), (n1, n2)).copy_from(y);
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reference_bound_is_inverse_sqrt_seven() {
        let b = two_annulus_bound(1.0, 2.0, 1.0, 0.5).unwrap();
        assert!((b.sharp - 7f64.powf(-0.5)).abs() < 1e-15);
        assert!((b.uniform - 7f64.powf(-0.5)).abs() < 1e-15);
        assert!((ynorm_sq_bound(1.0, 2.0, 1.0, 0.5) - 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn bound_limits() {
        assert!(two_annulus_bound(1.0, 1.0 + 1e-12, 1.0, 0.5).unwrap().sharp > 1.0 - 1e-9);
        assert!(two_annulus_bound(1.0, 2.0, 1e8, 0.3).unwrap().sharp > 1.0 - 1e-9);
        assert!(two_annulus_bound(2.0, 1.0, 1.0, 0.5).is_err());
        assert!(two_annulus_bound(1.0, 2.0, 0.0, 0.5).is_err());
        assert!(two_annulus_bound(1.0, 2.0, 1.0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn bound_monotonicity(r in 0.0f64..2.0, gap in 0.01f64..3.0, extra in 0.0f64..1.0,
                              c in 0.1f64..3.0, dc in 0.0f64..1.0, t in 0.01f64..0.99) {
            let s = r + gap;
            let base = two_annulus_bound(r, s, c, t).unwrap();
            prop_assert!(base.sharp > 0.0 && base.sharp < 1.0);
            prop_assert!(base.sharp >= base.uniform);
            // Nonincreasing in s² − r².
            prop_assert!(two_annulus_bound(r, s + extra, c, t).unwrap().sharp <= base.sharp);
            // Nondecreasing in c.
            prop_assert!(two_annulus_bound(r, s, c + dc, t).unwrap().sharp >= base.sharp);
            // Nondecreasing in max(t, 1−t).
            let m = t.max(1.0 - t);
            let further = (m + (1.0 - m) * extra).min(0.999);
            prop_assert!(two_annulus_bound(r, s, c, further).unwrap().sharp >= base.sharp - 1e-15);
        }
    }

    #[test]
    fn small_run_is_consistent() {
        let cfg = AngleExperimentConfig {
            n: 64,
            trials: 3,
            ..AngleExperimentConfig::reference()
        };
        let rep = run_two_annulus(&cfg).unwrap();
        assert!(rep.checks.identity_within_truncation);
        assert!(rep.checks.vector_below_subspace);
        assert_eq!(rep.trials.len(), 3);
        assert!(rep.cos_subspace_est > 0.0 && rep.cos_subspace_est < 1.0);
        assert_eq!(run_two_annulus(&cfg).unwrap(), rep);
    }

    #[test]
    fn weak_coupling_decouples_the_blocks() {
        let cfg = AngleExperimentConfig {
            n: 32,
            trials: 2,
            c: 1e-6,
            ..AngleExperimentConfig::reference()
        };
        let rep = run_two_annulus(&cfg).unwrap();
        assert!(rep.cos_subspace_est < 1e-5, "{}", rep.cos_subspace_est);
    }

    #[test]
    fn graph_similarity_layout() {
        let y = CMatrix::from_element(1, 2, crate::matrix_lab::linalg::c64(3.0, 0.0));
        let s = graph_similarity(&y);
        assert_eq!(s[(0, 1)].re, 3.0);
        assert_eq!(s[(0, 0)].re, 1.0);
        assert_eq!(s[(1, 0)].re, 0.0);
    }
}
