//! Monte-Carlo *-moments of the matrix models against exact values: words in
//! the strictly upper triangular model against the moment engine, and even
//! moments of semicircular models against Catalan numbers.

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::{invalid, run_trials, ExperimentError, TrialTable};
use crate::bpoly::format_rational;
use crate::cumulant::{scalar_moment, CoeffWord, EpsWord};
use crate::matrix_lab::linalg::{matmul, normalized_trace, trace_of_product, CMatrix};
use crate::matrix_lab::sampling::{block_projection, sample_gue, sample_ut, semicircular_mix};
use crate::matrix_lab::words::all_word_traces;
use crate::seed;

/// Relative tolerance of Monte-Carlo moments at `N = 512`, 40 trials.
pub const MONTE_CARLO_TOLERANCE: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    /// Longest word compared against the engine.
    pub max_len: usize,
    /// Largest `k` in the semicircle moments `τ(X^{2k})`.
    pub k_max: usize,
}

impl SimulateConfig {
    /// `N = 512`, 40 trials, words up to length 4, `k ≤ 4`.
    pub fn reference() -> Self {
        SimulateConfig {
            n: 512,
            trials: 40,
            seed: 0,
            max_len: 4,
            k_max: 4,
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.n < 2 || self.trials == 0 || self.max_len == 0 || self.k_max == 0 {
            return invalid("n ≥ 2 and positive trials, max_len, k_max are required");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WordRow {
    pub word: EpsWord,
    pub exact: String,
    pub exact_value: f64,
    pub monte_carlo: f64,
    pub monte_carlo_imag: f64,
    pub relative_error: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WordMomentReport {
    pub rows: Vec<WordRow>,
    pub pass: bool,
    #[serde(skip)]
    pub per_trial: Vec<Vec<f64>>,
}

/// Trial-averaged `τ_N` of every balanced word of length `≤ max_len` in the
/// strictly upper triangular Gaussian model, against the exact moments.
pub fn word_moments(cfg: &SimulateConfig) -> Result<WordMomentReport, ExperimentError> {
    cfg.validate()?;
    let words: Vec<EpsWord> = EpsWord::balanced_up_to(cfg.max_len)
        .into_iter()
        .filter(|w| !w.is_empty())
        .collect();
    let index: Vec<usize> = {
        let all: Vec<EpsWord> = all_word_traces(&CMatrix::zeros(1, 1), cfg.max_len)
            .into_iter()
            .map(|w| w.0)
            .collect();
        words
            .iter()
            .map(|w| all.iter().position(|v| v == w).expect("word listed"))
            .collect()
    };
    let per_trial_c = run_trials(cfg.trials, seed::derive(cfg.seed, 0), |_, s| {
        let t = sample_ut(cfg.n, s);
        let traces = all_word_traces(&t, cfg.max_len);
        Ok(index.iter().map(|&i| traces[i].1).collect::<Vec<_>>())
    })?;
    let trials = per_trial_c.len() as f64;
    let mut rows = Vec::with_capacity(words.len());
    for (j, word) in words.iter().enumerate() {
        let exact = scalar_moment(&CoeffWord::units(word.clone()))?;
        let exact_value = exact.to_f64().unwrap_or(f64::NAN);
        let re = per_trial_c.iter().map(|t| t[j].re).sum::<f64>() / trials;
        let im = per_trial_c.iter().map(|t| t[j].im).sum::<f64>() / trials;
        let relative_error = (re - exact_value).abs() / exact_value.abs();
        rows.push(WordRow {
            word: word.clone(),
            exact: format_rational(&exact),
            exact_value,
            monte_carlo: re,
            monte_carlo_imag: im,
            relative_error,
            pass: relative_error <= MONTE_CARLO_TOLERANCE,
        });
    }
    let pass = rows.iter().all(|r| r.pass);
    Ok(WordMomentReport {
        rows,
        pass,
        per_trial: per_trial_c.iter().map(|t| t.iter().map(|z| z.re).collect()).collect(),
    })
}

pub fn catalan(k: usize) -> u64 {
    let mut c: u64 = 1;
    for i in 0..k as u64 {
        c = c * 2 * (2 * i + 1) / (i + 2);
    }
    c
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SemicircleRow {
    pub model: String,
    pub k: usize,
    pub catalan: u64,
    pub monte_carlo: f64,
    pub relative_error: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SemicircleReport {
    pub rows: Vec<SemicircleRow>,
    pub pass: bool,
}

/// `τ_N(X^{2k})`, `k = 1..=k_max`, with shared products.
fn even_moments(x: &CMatrix, k_max: usize) -> Vec<f64> {
    let x2 = matmul(x, x);
    let mut power = x2.clone();
    let mut out = vec![normalized_trace(&x2).re];
    for _ in 2..=k_max {
        out.push(trace_of_product(&power, &x2).re);
        if out.len() < k_max {
            power = matmul(&power, &x2);
        }
    }
    out
}

pub const SEMICIRCLE_MODELS: [&str; 3] = ["gue", "two_block_mix", "ut_plus_adjoint"];

/// Even moments of three semicircular models against Catalan numbers: a GUE
/// sample, the two-block mixture of two independent GUE samples, and
/// `T + T*` for the strictly upper triangular model.
pub fn semicircle_moments(cfg: &SimulateConfig) -> Result<SemicircleReport, ExperimentError> {
    cfg.validate()?;
    let n = cfg.n;
    let half = n / 2;
    let projections = [block_projection(n, 0..half), block_projection(n, half..n)];
    let per_trial = run_trials(cfg.trials, seed::derive(cfg.seed, 1), |_, s| {
        let x = sample_gue(n, seed::derive(s, 0));
        let xt = sample_gue(n, seed::derive(s, 1));
        let y = semicircular_mix(&xt, &x, &projections)?;
        let t = sample_ut(n, seed::derive(s, 2));
        let h = &t + t.adjoint();
        Ok([
            even_moments(&x, cfg.k_max),
            even_moments(&y, cfg.k_max),
            even_moments(&h, cfg.k_max),
        ])
    })?;
    let trials = per_trial.len() as f64;
    let mut rows = Vec::new();
    for (m, name) in SEMICIRCLE_MODELS.iter().enumerate() {
        for k in 1..=cfg.k_max {
            let value = per_trial.iter().map(|t| t[m][k - 1]).sum::<f64>() / trials;
            let cat = catalan(k);
            let relative_error = (value - cat as f64).abs() / cat as f64;
            rows.push(SemicircleRow {
                model: name.to_string(),
                k,
                catalan: cat,
                monte_carlo: value,
                relative_error,
                pass: relative_error <= MONTE_CARLO_TOLERANCE,
            });
        }
    }
    let pass = rows.iter().all(|r| r.pass);
    Ok(SemicircleReport { rows, pass })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulateReport {
    pub config: SimulateConfig,
    pub words: WordMomentReport,
    pub semicircle: SemicircleReport,
    pub pass: bool,
}

pub fn simulate(cfg: &SimulateConfig) -> Result<SimulateReport, ExperimentError> {
    let words = word_moments(cfg)?;
    let semicircle = semicircle_moments(cfg)?;
    let pass = words.pass && semicircle.pass;
    Ok(SimulateReport {
        config: cfg.clone(),
        words,
        semicircle,
        pass,
    })
}

impl TrialTable for SimulateReport {
    fn csv_header(&self) -> Vec<&'static str> {
        vec!["trial", "word", "monte_carlo", "exact"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let mut out = Vec::new();
        for (i, t) in self.words.per_trial.iter().enumerate() {
            for (row, v) in self.words.rows.iter().zip(t) {
                out.push(vec![
                    i.to_string(),
                    row.word.to_string(),
                    format!("{v:e}"),
                    row.exact.clone(),
                ]);
            }
        }
        out
    }
}
