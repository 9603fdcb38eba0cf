//! Restriction to invariant subspaces: angles can only open up, and the
//! restriction of a DT(μ, c) operator to `P(Z, B)` is DT(μ̃, c√μ(B)) with
//! `μ̃` the renormalized restriction of `μ` to `B`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{invalid, mean, run_trials, ExperimentError, TrialTable};
use crate::brown_hs::{angle_cos, hs_projection, hs_projection_from_schur, HsError, Region};
use crate::cumulant::EpsWord;
use crate::matrix_lab::linalg::{adjoint_mul, matmul, schur, CMatrix};
use crate::matrix_lab::words::all_word_traces;
use crate::matrix_lab::{build_dt, RadialMeasure};
use crate::seed;

pub const RESTRICTION_SLACK: f64 = 1e-6;
/// Relative tolerance for compressed-versus-direct moment comparisons.
pub const MOMENT_TOLERANCE: f64 = 0.07;

/// Matrix of `Z` compressed to the span of the orthonormal columns of `v`.
pub fn compress(z: &CMatrix, v: &CMatrix) -> CMatrix {
    adjoint_mul(v, &matmul(z, v))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RestrictionAngleReport {
    pub rank_b: usize,
    /// Angle cosine between `P(Z, C)` and `P(Z, Cᶜ)`.
    pub cos_full: f64,
    /// The same inside the compression of `Z` to `P(Z, B)`.
    pub cos_restricted: f64,
    pub pass: bool,
}

/// Checks that restricting `Z` to `P(Z, B)` does not increase the angle
/// cosine between the invariant subspaces for `C` and `Cᶜ`.
pub fn restriction_angle_check(z: &CMatrix, b: &Region, c: &Region) -> Result<RestrictionAngleReport, ExperimentError> {
    let form = schur(z)?;
    let q = hs_projection_from_schur(&form, b)?;
    if q.rank() == 0 {
        return Err(HsError::ZeroProjection.into());
    }
    let c_comp = c.complement();
    let full_c = hs_projection_from_schur(&form, c)?;
    let full_cc = hs_projection_from_schur(&form, &c_comp)?;
    let cos_full = angle_cos(&full_c, &full_cc)?;
    let zq = compress(z, &q.basis);
    let form_q = schur(&zq)?;
    let inner_c = hs_projection_from_schur(&form_q, c)?;
    let inner_cc = hs_projection_from_schur(&form_q, &c_comp)?;
    let cos_restricted = angle_cos(&inner_c, &inner_cc)?;
    Ok(RestrictionAngleReport {
        rank_b: q.rank(),
        cos_full,
        cos_restricted,
        pass: cos_restricted <= cos_full + RESTRICTION_SLACK,
    })
}

fn default_max_len() -> usize {
    4
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RestrictionConfig {
    pub measure: RadialMeasure,
    pub c: f64,
    pub region: Region,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    #[serde(default = "default_max_len")]
    pub max_len: usize,
}

impl RestrictionConfig {
    /// `μ = ½δ₁ + ½δ₂`, `c = 1`, `B = {|λ| < 1.5}`, `N = 512`, 40 trials.
    pub fn reference() -> Self {
        RestrictionConfig {
            measure: RadialMeasure::normalized(&[(1.0, 1.0), (2.0, 1.0)]).expect("valid measure"),
            c: 1.0,
            region: Region::open_annulus(0.0, 1.5),
            n: 512,
            trials: 40,
            seed: 0,
            max_len: default_max_len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentRow {
    pub word: EpsWord,
    pub balanced: bool,
    pub compressed: Complex64,
    pub direct: Complex64,
    /// Allowed `|compressed − direct|`.
    pub tolerance: f64,
    pub pass: bool,
}

/// Rank of `P(Z, B)`, then compressed and direct word traces of one trial.
pub type TrialMoments = (usize, Vec<Complex64>, Vec<Complex64>);

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RestrictionReport {
    pub config: RestrictionConfig,
    pub mass: f64,
    pub restricted_c: f64,
    pub rank_mean: f64,
    pub rows: Vec<MomentRow>,
    pub pass: bool,
    #[serde(skip)]
    pub per_trial: Vec<TrialMoments>,
}

/// Compares the *-moments of `Z` compressed to `P(Z, B)` with those of an
/// independently built DT(μ̃, c√μ(B)) model of the same size.
///
/// Balanced words are compared with relative tolerance 7%. Unbalanced words
/// vanish in the limit; they are compared with absolute tolerance
/// `7% · τ(Z*Z)^{len/2}` of the direct model.
pub fn restriction_dt_check(cfg: &RestrictionConfig) -> Result<RestrictionReport, ExperimentError> {
    cfg.region.validate()?;
    if cfg.n == 0 || cfg.trials == 0 || cfg.max_len == 0 {
        return invalid("n, trials and max_len must be positive");
    }
    let Some((restricted, mass)) = cfg.measure.restrict(|rho| cfg.region.contains_radius(rho)) else {
        return invalid("the region has zero measure");
    };
    let restricted_c = cfg.c * mass.sqrt();
    let per_trial = run_trials(cfg.trials, cfg.seed, |_, s| {
        let model = build_dt(&cfg.measure, cfg.c, cfg.n, s)?;
        let q = hs_projection(&model.z, &cfg.region)?;
        let k = q.rank();
        if k == 0 {
            return Err(HsError::ZeroProjection.into());
        }
        let zq = compress(&model.z, &q.basis);
        let direct = build_dt(&restricted, restricted_c, k, seed::derive(s, 1))?;
        let a: Vec<Complex64> = all_word_traces(&zq, cfg.max_len).into_iter().map(|w| w.1).collect();
        let b: Vec<Complex64> = all_word_traces(&direct.z, cfg.max_len)
            .into_iter()
            .map(|w| w.1)
            .collect();
        Ok((k, a, b))
    })?;
    let words: Vec<EpsWord> = all_word_traces(&CMatrix::zeros(1, 1), cfg.max_len)
        .into_iter()
        .map(|w| w.0)
        .collect();
    let trials = per_trial.len() as f64;
    let avg = |pick: fn(&TrialMoments) -> &Vec<Complex64>, i: usize| {
        per_trial.iter().map(|t| pick(t)[i]).sum::<Complex64>() / trials
    };
    let second_index = words.iter().position(|w| w.to_string() == "*1");
    let mut rows = Vec::with_capacity(words.len());
    for (i, word) in words.iter().enumerate() {
        let compressed = avg(|t| &t.1, i);
        let direct = avg(|t| &t.2, i);
        let balanced = word.is_balanced();
        let tolerance = if balanced {
            MOMENT_TOLERANCE * direct.norm()
        } else {
            let second = second_index.map_or(1.0, |j| avg(|t| &t.2, j).re);
            MOMENT_TOLERANCE * second.powf(word.len() as f64 / 2.0)
        };
        rows.push(MomentRow {
            word: word.clone(),
            balanced,
            compressed,
            direct,
            tolerance,
            pass: (compressed - direct).norm() <= tolerance,
        });
    }
    let pass = rows.iter().all(|r| r.pass);
    Ok(RestrictionReport {
        config: cfg.clone(),
        mass,
        restricted_c,
        rank_mean: mean(&per_trial.iter().map(|t| t.0 as f64).collect::<Vec<_>>()),
        rows,
        pass,
        per_trial,
    })
}

impl TrialTable for RestrictionReport {
    fn csv_header(&self) -> Vec<&'static str> {
        vec![
            "trial",
            "rank",
            "word",
            "compressed_re",
            "compressed_im",
            "direct_re",
            "direct_im",
        ]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let mut out = Vec::new();
        for (i, (k, a, b)) in self.per_trial.iter().enumerate() {
            for (j, row) in self.rows.iter().enumerate() {
                out.push(vec![
                    i.to_string(),
                    k.to_string(),
                    row.word.to_string(),
                    format!("{:e}", a[j].re),
                    format!("{:e}", a[j].im),
                    format!("{:e}", b[j].re),
                    format!("{:e}", b[j].im),
                ]);
            }
        }
        out
    }
}
