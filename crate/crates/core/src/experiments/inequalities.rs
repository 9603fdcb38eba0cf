//! Trace and norm inequalities for DT models at finite `N`:
//! `τ((Zᵏ)*Zᵏ) ≥ r^{2k}`, `τ((Z⁻ᵏ)*Z⁻ᵏ) ≥ s^{−2k}`, their conditional
//! expectation versions `E((Zⁿ)*Zⁿ) ≥ |bⁿ|²`, and the coefficient-word norm
//! inequality for the quasinilpotent model.

use serde::{Deserialize, Serialize};

use super::{invalid, mean, median, min, run_trials, ExperimentError, TrialTable, FINITE_N_SLACK};
use crate::bpoly::BElem;
use crate::cumulant::{EpsWord, Letter};
use crate::matrix_lab::linalg::{c64, diagonal_matrix, frobenius_sq, identity, inverse, matmul, op_norm, CMatrix};
use crate::matrix_lab::sampling::{diagonal_from_fn, sample_ut};
use crate::matrix_lab::words::word_product;
use crate::matrix_lab::{build_dt, MatrixModel, RadialMeasure};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerNormRow {
    pub k: usize,
    /// `τ_N((Zᵏ)*Zᵏ)`.
    pub forward: f64,
    /// `r^{2k}`.
    pub forward_reference: f64,
    /// `τ_N((Z⁻ᵏ)*Z⁻ᵏ)`.
    pub inverse: f64,
    /// `s^{−2k}`.
    pub inverse_reference: f64,
    pub forward_ok: bool,
    pub inverse_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerNormReport {
    pub r: f64,
    pub s: f64,
    pub rows: Vec<PowerNormRow>,
    pub pass: bool,
}

/// Checks both trace inequalities for `k = 0, …, k_max` with a relative
/// slack of 5%.
pub fn power_norm_check(model: &MatrixModel, r: f64, s: f64, k_max: usize) -> Result<PowerNormReport, ExperimentError> {
    if !(0.0 <= r && r <= s && s > 0.0) {
        return invalid(format!("need 0 ≤ r ≤ s, s > 0, got r = {r}, s = {s}"));
    }
    let n = model.dim() as f64;
    let z = &model.z;
    let z_inv = inverse(z)?;
    let mut fwd = identity(model.dim());
    let mut inv = identity(model.dim());
    let mut rows = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        if k > 0 {
            fwd = matmul(&fwd, z);
            inv = matmul(&inv, &z_inv);
        }
        let forward = frobenius_sq(&fwd) / n;
        let inverse = frobenius_sq(&inv) / n;
        let forward_reference = r.powi(2 * k as i32);
        let inverse_reference = s.powi(-2 * k as i32);
        rows.push(PowerNormRow {
            k,
            forward,
            forward_reference,
            inverse,
            inverse_reference,
            forward_ok: forward >= (1.0 - FINITE_N_SLACK) * forward_reference,
            inverse_ok: inverse >= (1.0 - FINITE_N_SLACK) * inverse_reference,
        });
    }
    let pass = rows.iter().all(|row| row.forward_ok && row.inverse_ok);
    Ok(PowerNormReport { r, s, rows, pass })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerNormConfig {
    pub measure: RadialMeasure,
    pub c: f64,
    pub r: f64,
    pub s: f64,
    pub n: usize,
    pub k_max: usize,
    pub trials: usize,
    pub seed: u64,
}

impl PowerNormConfig {
    /// `μ = ½δ₁ + ½δ₂`, `c = 1`, `N = 256`, 40 trials, `k ≤ 5`.
    pub fn reference() -> Self {
        PowerNormConfig {
            measure: RadialMeasure::normalized(&[(1.0, 1.0), (2.0, 1.0)]).expect("valid measure"),
            c: 1.0,
            r: 1.0,
            s: 2.0,
            n: 256,
            k_max: 5,
            trials: 40,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerNormBatteryRow {
    pub k: usize,
    pub forward_mean: f64,
    pub forward_min: f64,
    pub forward_reference: f64,
    pub inverse_mean: f64,
    pub inverse_min: f64,
    pub inverse_reference: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PowerNormBattery {
    pub config: PowerNormConfig,
    pub rows: Vec<PowerNormBatteryRow>,
    pub trials_passed: usize,
    pub pass: bool,
    #[serde(skip)]
    pub per_trial: Vec<PowerNormReport>,
}

/// Runs [`power_norm_check`] on independent DT(μ, c) samples; passes when every
/// trial passes.
pub fn power_norm_battery(cfg: &PowerNormConfig) -> Result<PowerNormBattery, ExperimentError> {
    if cfg.trials == 0 || cfg.n == 0 {
        return invalid("trials and n must be positive");
    }
    let per_trial = run_trials(cfg.trials, cfg.seed, |_, seed| {
        let model = build_dt(&cfg.measure, cfg.c, cfg.n, seed)?;
        power_norm_check(&model, cfg.r, cfg.s, cfg.k_max)
    })?;
    let rows = (0..=cfg.k_max)
        .map(|k| {
            let fwd: Vec<f64> = per_trial.iter().map(|t| t.rows[k].forward).collect();
            let inv: Vec<f64> = per_trial.iter().map(|t| t.rows[k].inverse).collect();
            PowerNormBatteryRow {
                k,
                forward_mean: mean(&fwd),
                forward_min: min(&fwd),
                forward_reference: per_trial[0].rows[k].forward_reference,
                inverse_mean: mean(&inv),
                inverse_min: min(&inv),
                inverse_reference: per_trial[0].rows[k].inverse_reference,
            }
        })
        .collect();
    let trials_passed = per_trial.iter().filter(|t| t.pass).count();
    Ok(PowerNormBattery {
        config: cfg.clone(),
        rows,
        trials_passed,
        pass: trials_passed == per_trial.len(),
        per_trial,
    })
}

impl TrialTable for PowerNormBattery {
    fn csv_header(&self) -> Vec<&'static str> {
        vec![
            "trial",
            "k",
            "forward",
            "forward_reference",
            "inverse",
            "inverse_reference",
            "pass",
        ]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let mut out = Vec::new();
        for (i, t) in self.per_trial.iter().enumerate() {
            for row in &t.rows {
                out.push(vec![
                    i.to_string(),
                    row.k.to_string(),
                    format!("{:e}", row.forward),
                    format!("{:e}", row.forward_reference),
                    format!("{:e}", row.inverse),
                    format!("{:e}", row.inverse_reference),
                    (row.forward_ok && row.inverse_ok).to_string(),
                ]);
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagonalPowerConfig {
    /// Diagonal symbol `b = diag(f(i/N))`.
    pub f: BElem,
    /// Coefficient of the quasinilpotent part.
    pub c: f64,
    pub n: usize,
    pub n_max: usize,
    pub trials: usize,
    pub seed: u64,
}

impl DiagonalPowerConfig {
    /// `b = 1 + x`, `c = 1`, `N = 256`, powers up to 5, 40 trials.
    pub fn reference() -> Self {
        DiagonalPowerConfig {
            f: BElem::from_ratios(&[(1, 1), (1, 1)]),
            c: 1.0,
            n: 256,
            n_max: 5,
            trials: 40,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagonalPowerRow {
    pub power: usize,
    /// `min_i E((Zⁿ)*Zⁿ)_ii / |b_i|^{2n}` over the trial average.
    pub forward_ratio_min: f64,
    /// `min_i E((Z⁻ⁿ)*Z⁻ⁿ)_ii / |b_i|^{−2n}`.
    pub inverse_ratio_min: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagonalPowerReport {
    pub config: DiagonalPowerConfig,
    pub rows: Vec<DiagonalPowerRow>,
    pub pass: bool,
}

/// Squared column norms, i.e. the diagonal of `A* A`.
fn gram_diagonal(a: &CMatrix) -> Vec<f64> {
    a.column_iter()
        .map(|col| col.iter().map(|z| z.norm_sqr()).sum())
        .collect()
}

/// Entrywise check of `E((Zⁿ)*Zⁿ) ≥ |bⁿ|²` and `E((Z⁻ⁿ)*Z⁻ⁿ) ≥ |b⁻ⁿ|²` for
/// `Z = b + c·T`, with `E` the diagonal extraction averaged over trials.
pub fn diagonal_power_check(cfg: &DiagonalPowerConfig) -> Result<DiagonalPowerReport, ExperimentError> {
    if cfg.n == 0 || cfg.trials == 0 {
        return invalid("n and trials must be positive");
    }
    let b: Vec<f64> = (0..cfg.n).map(|i| cfg.f.eval_f64(i as f64 / cfg.n as f64)).collect();
    if b.iter().any(|v| !(v.abs() > 1e-8)) {
        return invalid("the diagonal symbol must be bounded away from zero on the grid");
    }
    let b_diag = diagonal_matrix(&b.iter().map(|&v| c64(v, 0.0)).collect::<Vec<_>>());
    let per_trial = run_trials(cfg.trials, cfg.seed, |_, seed| {
        let z = &b_diag + sample_ut(cfg.n, seed) * c64(cfg.c, 0.0);
        let z_inv = inverse(&z)?;
        let mut fwd = identity(cfg.n);
        let mut inv = identity(cfg.n);
        let mut out = Vec::with_capacity(cfg.n_max + 1);
        for k in 0..=cfg.n_max {
            if k > 0 {
                fwd = matmul(&fwd, &z);
                inv = matmul(&inv, &z_inv);
            }
            out.push((gram_diagonal(&fwd), gram_diagonal(&inv)));
        }
        Ok(out)
    })?;
    let trials = cfg.trials as f64;
    let mut rows = Vec::with_capacity(cfg.n_max + 1);
    for k in 0..=cfg.n_max {
        let mut fwd_min = f64::INFINITY;
        let mut inv_min = f64::INFINITY;
        for i in 0..cfg.n {
            let fwd = per_trial.iter().map(|t| t[k].0[i]).sum::<f64>() / trials;
            let inv = per_trial.iter().map(|t| t[k].1[i]).sum::<f64>() / trials;
            let reference = b[i].abs().powi(2 * k as i32);
            fwd_min = fwd_min.min(fwd / reference);
            inv_min = inv_min.min(inv * reference);
        }
        rows.push(DiagonalPowerRow {
            power: k,
            forward_ratio_min: fwd_min,
            inverse_ratio_min: inv_min,
            pass: fwd_min >= 1.0 - FINITE_N_SLACK && inv_min >= 1.0 - FINITE_N_SLACK,
        });
    }
    let pass = rows.iter().all(|r| r.pass);
    Ok(DiagonalPowerReport {
        config: cfg.clone(),
        rows,
        pass,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientNormConfig {
    pub word: EpsWord,
    /// One coefficient per letter, realized as `diag(b_j(i/N))`.
    pub coeffs: Vec<BElem>,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
}

impl CoefficientNormConfig {
    /// `T* b₁ T b₂ T* b₃ T b₄` with `b = 1 + x, 2 − x, 1, ½ + x`, `N = 256`,
    /// 20 trials.
    pub fn reference() -> Self {
        CoefficientNormConfig {
            word: alternating_word(4),
            coeffs: vec![
                BElem::from_ratios(&[(1, 1), (1, 1)]),
                BElem::from_ratios(&[(2, 1), (-1, 1)]),
                BElem::one(),
                BElem::from_ratios(&[(1, 2), (1, 1)]),
            ],
            n: 256,
            trials: 20,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoefficientNormReport {
    pub config: CoefficientNormConfig,
    pub coefficient_word_median: f64,
    pub plain_word_median: f64,
    /// `∏_j sup_i |b_j(i/N)|`.
    pub coefficient_sup_product: f64,
    pub rhs: f64,
    pub pass: bool,
    pub trials: Vec<(f64, f64)>,
}

/// Trial-median check of
/// `‖T^{ε(1)} b₁ ⋯ T^{ε(n)} bₙ‖ ≤ (∏ ‖b_j‖) ‖T^{ε(1)} ⋯ T^{ε(n)}‖`.
pub fn coefficient_norm_check(cfg: &CoefficientNormConfig) -> Result<CoefficientNormReport, ExperimentError> {
    if cfg.coeffs.len() != cfg.word.len() {
        return invalid(format!(
            "word has {} letters but {} coefficients were given",
            cfg.word.len(),
            cfg.coeffs.len()
        ));
    }
    if cfg.n == 0 || cfg.trials == 0 {
        return invalid("n and trials must be positive");
    }
    let diagonals: Vec<CMatrix> = cfg
        .coeffs
        .iter()
        .map(|b| diagonal_from_fn(cfg.n, |x| b.eval_f64(x)))
        .collect();
    let sup_product: f64 = diagonals
        .iter()
        .map(|d| d.diagonal().iter().map(|z| z.norm()).fold(0.0, f64::max))
        .product();
    let trials = run_trials(cfg.trials, cfg.seed, |_, seed| {
        let t = sample_ut(cfg.n, seed);
        let with = op_norm(&word_product(&t, &cfg.word, Some(&diagonals)));
        let plain = op_norm(&word_product(&t, &cfg.word, None));
        Ok((with, plain))
    })?;
    let with_median = median(&trials.iter().map(|t| t.0).collect::<Vec<_>>());
    let plain_median = median(&trials.iter().map(|t| t.1).collect::<Vec<_>>());
    let rhs = sup_product * plain_median * (1.0 + FINITE_N_SLACK);
    Ok(CoefficientNormReport {
        config: cfg.clone(),
        coefficient_word_median: with_median,
        plain_word_median: plain_median,
        coefficient_sup_product: sup_product,
        rhs,
        pass: with_median <= rhs,
        trials,
    })
}

/// Word `*1*1…` of the given even length, used as a default probe.
pub fn alternating_word(len: usize) -> EpsWord {
    EpsWord::new(
        (0..len)
            .map(|i| if i % 2 == 0 { Letter::Star } else { Letter::One })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bpoly::rat;

    #[test]
    fn power_norm_equality_for_normal_circle() {
        let rho = 1.3;
        let model = build_dt(&RadialMeasure::circle(rho).unwrap(), 0.0, 32, 1).unwrap();
        let rep = power_norm_check(&model, rho, rho, 6).unwrap();
        assert!(rep.pass);
        for row in &rep.rows {
            assert!((row.forward / row.forward_reference - 1.0).abs() < 1e-10);
            assert!((row.inverse / row.inverse_reference - 1.0).abs() < 1e-10);
        }
        assert_eq!(rep.rows[0].forward, 1.0);
        assert_eq!(rep.rows[0].inverse, 1.0);
    }

    #[test]
    fn power_norm_small_battery() {
        let cfg = PowerNormConfig {
            n: 64,
            trials: 4,
            ..PowerNormConfig::reference()
        };
        let rep = power_norm_battery(&cfg).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert_eq!(rep.rows.len(), 6);
    }

    #[test]
    fn diagonal_power_equality_without_triangle() {
        let cfg = DiagonalPowerConfig {
            f: BElem::from_ratios(&[(1, 1), (1, 1)]),
            c: 0.0,
            n: 16,
            n_max: 4,
            trials: 2,
            seed: 0,
        };
        let rep = diagonal_power_check(&cfg).unwrap();
        for row in &rep.rows {
            assert!((row.forward_ratio_min - 1.0).abs() < 1e-12);
            assert!((row.inverse_ratio_min - 1.0).abs() < 1e-12);
        }
        assert!(rep.pass);
    }

    #[test]
    fn diagonal_power_rejects_vanishing_symbol() {
        let cfg = DiagonalPowerConfig {
            f: BElem::x(),
            c: 1.0,
            n: 16,
            n_max: 2,
            trials: 1,
            seed: 0,
        };
        assert!(diagonal_power_check(&cfg).is_err());
    }

    #[test]
    fn coefficient_norm_scalar_coefficients_scale_exactly() {
        let cfg = CoefficientNormConfig {
            word: alternating_word(4),
            coeffs: vec![
                BElem::constant(rat(2, 1)),
                BElem::constant(rat(1, 2)),
                BElem::constant(rat(-3, 1)),
                BElem::one(),
            ],
            n: 32,
            trials: 3,
            seed: 5,
        };
        let rep = coefficient_norm_check(&cfg).unwrap();
        for (with, plain) in &rep.trials {
            assert!((with - 3.0 * plain).abs() < 1e-10 * plain);
        }
        assert!(rep.pass);
        assert!((rep.coefficient_sup_product - 3.0).abs() < 1e-15);
    }
}
