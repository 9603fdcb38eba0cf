//! Concentration families: radial measures with mass piling up near a
//! circle `|z| = x₀` faster than linearly, for which the angle between
//! complementary invariant subspaces can be made arbitrarily small.
//!
//! For each rung `N_param = 1, 2, 4, …` of a ladder, a radius `ε` is chosen
//! with `μ(A(x₀−ε, x₀+ε) ∖ C(x₀)) > ε·N_param`, the atoms in that annulus are
//! split into an inner and an outer group, and the cosine lower bound of the
//! two-annulus construction is evaluated for the restricted operator
//! DT(μ̃, c√μ(B)). Three values are reported per rung:
//!
//! * `annulus_bound = (1 + 2(s² − r²)/(c² μ(B)))^{−1/2}` with
//!   `r = max(0, x₀−ε)`, `s = x₀+ε`;
//! * `sharp_bound`, the same construction with the tight radii of the atoms in
//!   `B` and `max(t, 1−t)` in place of `½`, maximized over splits;
//! * `final_estimate = (1 + 8‖Z‖/(c² N_param))^{−1/2}`.

use serde::{Deserialize, Serialize};

use super::two_annulus::two_annulus_bound;
use super::{invalid, mean, run_trials, ExperimentError, TrialTable};
use crate::brown_hs::{angle_cos, hs_projection_from_schur, Region};
use crate::matrix_lab::linalg::schur;
use crate::matrix_lab::{build_dt, Atom, RadialMeasure};

pub const COMPARISON_SLACK: f64 = 1e-12;
/// Required value of the last rung's bound.
pub const FINAL_RUNG_TARGET: f64 = 0.8;

fn default_eps_grid() -> usize {
    256
}

fn default_max_rungs() -> usize {
    16
}

/// Circles of radius `a + 1/n`, `n = 1, …, n_max`, with weights
/// proportional to `n^{−b}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConcentrationFamilyConfig {
    pub a: f64,
    pub b: f64,
    pub n_max: usize,
    pub c: f64,
    /// Matrix size for the optional restricted-model angle estimates; `0`
    /// skips them.
    #[serde(default)]
    pub n: usize,
    #[serde(default)]
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    /// `ε` is searched over `{1/m : m = 1, …, eps_grid}`.
    #[serde(default = "default_eps_grid")]
    pub eps_grid: usize,
    #[serde(default = "default_max_rungs")]
    pub max_rungs: usize,
}

impl ConcentrationFamilyConfig {
    /// `a = 1`, `b = 1.5`, `n_max = 64`, `c = 1`, analytic part only.
    pub fn reference() -> Self {
        ConcentrationFamilyConfig {
            a: 1.0,
            b: 1.5,
            n_max: 64,
            c: 1.0,
            n: 0,
            trials: 0,
            seed: 0,
            eps_grid: default_eps_grid(),
            max_rungs: default_max_rungs(),
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if !(self.a >= 0.0 && self.a.is_finite()) {
            return invalid(format!("need a ≥ 0, got {}", self.a));
        }
        if !(self.b > 1.0 && self.b < 2.0) {
            return invalid(format!("need b in (1, 2), got {}", self.b));
        }
        if self.n_max < 2 {
            return invalid("n_max must be at least 2");
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return invalid(format!("need c > 0, got {}", self.c));
        }
        if self.eps_grid == 0 || self.max_rungs == 0 {
            return invalid("eps_grid and max_rungs must be positive");
        }
        if self.n > 0 && self.trials == 0 {
            return invalid("matrix estimates need trials ≥ 1");
        }
        Ok(())
    }

    pub fn measure(&self) -> Result<RadialMeasure, ExperimentError> {
        let pairs: Vec<(f64, f64)> = (1..=self.n_max)
            .rev()
            .map(|n| (self.a + 1.0 / n as f64, (n as f64).powf(-self.b)))
            .collect();
        Ok(RadialMeasure::normalized(&pairs)?)
    }
}

/// `μ(A(x₀−δ, x₀+δ) ∖ C(x₀))`, where `A(r, s)` with `r ≤ 0` is the closed
/// disc of radius `s`.
pub fn punctured_mass(mu: &RadialMeasure, x0: f64, delta: f64) -> f64 {
    mu.mass_where(|rho| (rho - x0).abs() <= delta && rho != x0)
}

/// `δ ↦ μ(A(x₀−δ, x₀+δ) ∖ C(x₀)) / δ` on the grid `δ = 1/m`.
pub fn concentration_profile(mu: &RadialMeasure, x0: f64, grid: usize) -> Vec<(f64, f64)> {
    (1..=grid)
        .map(|m| {
            let delta = 1.0 / m as f64;
            (delta, punctured_mass(mu, x0, delta) / delta)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatrixEstimate {
    pub n: usize,
    pub trials: usize,
    pub cos_mean: f64,
    pub cos_min: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Rung {
    pub n_param: u64,
    pub eps: f64,
    pub r: f64,
    pub s: f64,
    /// `μ(B)` for `B` the atoms of `A(r, s) ∖ C(x₀)`.
    pub mass: f64,
    pub atoms: usize,
    pub annulus_bound: f64,
    pub sharp_bound: f64,
    /// Inner group size and weight fraction of the best split.
    pub split: usize,
    pub split_t: f64,
    pub final_estimate: f64,
    pub ok: bool,
    pub matrix: Option<MatrixEstimate>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LadderChecks {
    pub rungs_respect_final_estimate: bool,
    pub nondecreasing: bool,
    pub final_rung_above_target: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConcentrationReport {
    pub config: ConcentrationFamilyConfig,
    pub x0: f64,
    /// Lower estimate of `‖Z‖`: the largest atom radius, a spectral value.
    pub z_norm_est: f64,
    pub max_concentration_ratio: f64,
    /// First `N_param` for which no admissible `ε` exists on the grid.
    pub exhausted_at: Option<u64>,
    pub rungs: Vec<Rung>,
    pub checks: LadderChecks,
    pub pass: bool,
}

fn atoms_in(mu: &RadialMeasure, x0: f64, eps: f64) -> Vec<Atom> {
    mu.atoms()
        .iter()
        .filter(|a| (a.radius - x0).abs() <= eps && a.radius != x0)
        .copied()
        .collect()
}

fn build_rung(
    mu: &RadialMeasure,
    x0: f64,
    c: f64,
    z_norm_est: f64,
    n_param: u64,
    eps_grid: usize,
) -> Result<Option<Rung>, ExperimentError> {
    // Smallest admissible ε on the grid; B needs atoms on both sides of a
    // split, so at least two circles.
    let choice = (1..=eps_grid).rev().map(|m| 1.0 / m as f64).find(|&eps| {
        let atoms = atoms_in(mu, x0, eps);
        let mass: f64 = atoms.iter().map(|a| a.weight).sum();
        atoms.len() >= 2 && mass > eps * n_param as f64
    });
    let Some(eps) = choice else {
        return Ok(None);
    };
    let atoms = atoms_in(mu, x0, eps);
    let mass: f64 = atoms.iter().map(|a| a.weight).sum();
    let r = (x0 - eps).max(0.0);
    let s = x0 + eps;
    let annulus_bound = (1.0 + 2.0 * (s * s - r * r) / (c * c * mass)).powf(-0.5);
    let c_restricted = c * mass.sqrt();
    let (lo, hi) = (atoms[0].radius, atoms[atoms.len() - 1].radius);
    let mut sharp_bound = f64::NEG_INFINITY;
    let mut split = 0;
    let mut split_t = 0.0;
    let mut inner = 0.0;
    for j in 1..atoms.len() {
        inner += atoms[j - 1].weight;
        let t = inner / mass;
        let value = two_annulus_bound(lo, hi, c_restricted, t)?.sharp;
        if value > sharp_bound {
            sharp_bound = value;
            split = j;
            split_t = t;
        }
    }
    let final_estimate = (1.0 + 8.0 * z_norm_est / (c * c * n_param as f64)).powf(-0.5);
    let ok = sharp_bound >= annulus_bound - COMPARISON_SLACK && annulus_bound >= final_estimate - COMPARISON_SLACK;
    Ok(Some(Rung {
        n_param,
        eps,
        r,
        s,
        mass,
        atoms: atoms.len(),
        annulus_bound,
        sharp_bound,
        split,
        split_t,
        final_estimate,
        ok,
        matrix: None,
    }))
}

/// Angle cosine between the inner and outer invariant subspaces of sampled
/// DT(μ̃, c√μ(B)) models for the rung's best split.
fn matrix_estimate(
    mu: &RadialMeasure,
    x0: f64,
    rung: &Rung,
    c: f64,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<MatrixEstimate, ExperimentError> {
    let atoms = atoms_in(mu, x0, rung.eps);
    let restricted = RadialMeasure::normalized(&atoms.iter().map(|a| (a.radius, a.weight)).collect::<Vec<_>>())?;
    let cut = 0.5 * (atoms[rung.split - 1].radius + atoms[rung.split].radius);
    let inner = Region::disc(cut);
    let outer = inner.complement();
    let c_restricted = c * rung.mass.sqrt();
    let cosines = run_trials(trials, seed, |_, s| {
        let model = build_dt(&restricted, c_restricted, n, s)?;
        let form = schur(&model.z)?;
        let p = hs_projection_from_schur(&form, &inner)?;
        let q = hs_projection_from_schur(&form, &outer)?;
        Ok(angle_cos(&p, &q)?)
    })?;
    Ok(MatrixEstimate {
        n,
        trials,
        cos_mean: mean(&cosines),
        cos_min: super::min(&cosines),
    })
}

/// Runs the ladder for an arbitrary radial measure around `x₀`.
pub fn concentration_ladder(
    mu: &RadialMeasure,
    x0: f64,
    cfg: &ConcentrationFamilyConfig,
) -> Result<ConcentrationReport, ExperimentError> {
    cfg.validate()?;
    let z_norm_est = mu.max_radius();
    if x0 > z_norm_est {
        return invalid(format!("x0 = {x0} exceeds the support radius {z_norm_est}"));
    }
    let mut rungs = Vec::new();
    let mut exhausted_at = None;
    for j in 0..cfg.max_rungs {
        let n_param = 1u64 << j;
        match build_rung(mu, x0, cfg.c, z_norm_est, n_param, cfg.eps_grid)? {
            Some(mut rung) => {
                if cfg.n > 0 {
                    let seed = crate::seed::derive(cfg.seed, j as u64);
                    rung.matrix = Some(matrix_estimate(mu, x0, &rung, cfg.c, cfg.n, cfg.trials, seed)?);
                }
                rungs.push(rung);
            }
            None => {
                exhausted_at = Some(n_param);
                break;
            }
        }
    }
    if rungs.is_empty() {
        return Err(ExperimentError::EmptyAnnulus(format!(
            "no ε = 1/m (m ≤ {}) gives μ(A(x₀−ε, x₀+ε) ∖ C(x₀)) > ε with two or more circles around x₀ = {x0}",
            cfg.eps_grid
        )));
    }
    let max_concentration_ratio = concentration_profile(mu, x0, cfg.eps_grid)
        .iter()
        .map(|p| p.1)
        .fold(0.0, f64::max);
    let checks = LadderChecks {
        rungs_respect_final_estimate: rungs.iter().all(|r| r.ok),
        nondecreasing: rungs.windows(2).all(|w| w[1].sharp_bound >= w[0].sharp_bound),
        final_rung_above_target: rungs.last().is_some_and(|r| r.sharp_bound > FINAL_RUNG_TARGET),
    };
    let pass = checks.rungs_respect_final_estimate && checks.nondecreasing && checks.final_rung_above_target;
    Ok(ConcentrationReport {
        config: cfg.clone(),
        x0,
        z_norm_est,
        max_concentration_ratio,
        exhausted_at,
        rungs,
        checks,
        pass,
    })
}

/// The ladder for circles of radius `a + 1/n` around `x₀ = a`.
pub fn concentration_family(cfg: &ConcentrationFamilyConfig) -> Result<ConcentrationReport, ExperimentError> {
    cfg.validate()?;
    concentration_ladder(&cfg.measure()?, cfg.a, cfg)
}

impl TrialTable for ConcentrationReport {
    fn csv_header(&self) -> Vec<&'static str> {
        vec![
            "n_param",
            "eps",
            "mass",
            "atoms",
            "annulus_bound",
            "sharp_bound",
            "final_estimate",
            "matrix_cos_mean",
        ]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.rungs
            .iter()
            .map(|r| {
                vec![
                    r.n_param.to_string(),
                    format!("{:e}", r.eps),
                    format!("{:e}", r.mass),
                    r.atoms.to_string(),
                    format!("{:e}", r.annulus_bound),
                    format!("{:e}", r.sharp_bound),
                    format!("{:e}", r.final_estimate),
                    r.matrix.as_ref().map_or(String::new(), |m| format!("{:e}", m.cos_mean)),
                ]
            })
            .collect()
    }
}

fn default_probes() -> usize {
    50
}

fn default_threshold() -> f64 {
    100.0
}

/// Radial density proportional to `x^{−exponent}` on `(0, 1]`, discretized
/// into `atoms` equal-weight circles at the quantile midpoints.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerDensityConfig {
    pub exponent: f64,
    pub atoms: usize,
    /// Number of smallest atom radii used as probe values of `δ`.
    #[serde(default = "default_probes")]
    pub probes: usize,
    /// Required ratio at the smallest probe.
    #[serde(default = "default_threshold")]
    pub threshold: f64,
}

impl PowerDensityConfig {
    /// Exponent ½, 1000 atoms.
    pub fn reference() -> Self {
        PowerDensityConfig {
            exponent: 0.5,
            atoms: 1000,
            probes: default_probes(),
            threshold: default_threshold(),
        }
    }

    /// Atom `k` sits at `F⁻¹((k+½)/K)` for the distribution function
    /// `F(x) = x^{1−exponent}`.
    pub fn measure(&self) -> Result<RadialMeasure, ExperimentError> {
        if !(self.exponent > 0.0 && self.exponent < 1.0) {
            return invalid(format!("need exponent in (0, 1), got {}", self.exponent));
        }
        if self.atoms < 2 || self.probes < 2 || self.probes > self.atoms {
            return invalid("need 2 ≤ probes ≤ atoms");
        }
        let k = self.atoms as f64;
        let pairs: Vec<(f64, f64)> = (0..self.atoms)
            .map(|j| (((j as f64 + 0.5) / k).powf(1.0 / (1.0 - self.exponent)), 1.0))
            .collect();
        Ok(RadialMeasure::normalized(&pairs)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub config: PowerDensityConfig,
    /// `(δ, μ(A(0, δ) ∖ {0})/δ)` at the smallest atom radii, `δ` increasing.
    pub profile: Vec<(f64, f64)>,
    pub increases_as_delta_decreases: bool,
    pub pass: bool,
}

/// Checks the concentration hypothesis at `x₀ = 0` on the discretized
/// power density: the ratio grows as `δ` shrinks and exceeds the threshold
/// at the smallest probe.
pub fn power_density_hypothesis(cfg: &PowerDensityConfig) -> Result<HypothesisReport, ExperimentError> {
    let mu = cfg.measure()?;
    let profile: Vec<(f64, f64)> = mu.atoms()[..cfg.probes]
        .iter()
        .map(|a| (a.radius, punctured_mass(&mu, 0.0, a.radius) / a.radius))
        .collect();
    let increases = profile.windows(2).all(|w| w[0].1 > w[1].1);
    let pass = increases && profile[0].1 >= cfg.threshold;
    Ok(HypothesisReport {
        config: cfg.clone(),
        profile,
        increases_as_delta_decreases: increases,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_measure_is_ordered_and_normalized() {
        let mu = ConcentrationFamilyConfig::reference().measure().unwrap();
        assert_eq!(mu.atoms().len(), 64);
        assert!((mu.atoms()[0].radius - (1.0 + 1.0 / 64.0)).abs() < 1e-15);
        assert!((mu.max_radius() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn two_atom_family_reduces_to_the_two_annulus_bound() {
        let mu = RadialMeasure::normalized(&[(1.0, 1.0), (2.0, 3.0)]).unwrap();
        let cfg = ConcentrationFamilyConfig {
            max_rungs: 1,
            ..ConcentrationFamilyConfig::reference()
        };
        let rep = concentration_ladder(&mu, 1.5, &cfg).unwrap();
        let rung = &rep.rungs[0];
        assert_eq!(rung.atoms, 2);
        assert_eq!(rung.split, 1);
        let direct = two_annulus_bound(1.0, 2.0, cfg.c * rung.mass.sqrt(), 0.25)
            .unwrap()
            .sharp;
        assert!((rung.sharp_bound - direct).abs() < 1e-15);
    }

    #[test]
    fn rungs_dominate_the_final_estimate() {
        let rep = concentration_family(&ConcentrationFamilyConfig::reference()).unwrap();
        assert!(!rep.rungs.is_empty());
        for r in &rep.rungs {
            assert!(r.sharp_bound >= r.annulus_bound - COMPARISON_SLACK);
            assert!(r.annulus_bound >= r.final_estimate - COMPARISON_SLACK);
            assert!(r.mass > r.eps * r.n_param as f64);
        }
    }

    #[test]
    fn empty_neighbourhood_is_diagnosed() {
        let mu = RadialMeasure::normalized(&[(5.0, 1.0), (6.0, 1.0)]).unwrap();
        let cfg = ConcentrationFamilyConfig::reference();
        assert!(matches!(
            concentration_ladder(&mu, 1.0, &cfg),
            Err(ExperimentError::EmptyAnnulus(_))
        ));
    }

    #[test]
    fn power_density_hypothesis_holds() {
        let rep = power_density_hypothesis(&PowerDensityConfig::reference()).unwrap();
        assert!(rep.pass);
        // μ(A(0, ρ₀)) = 1/K and ρ₀ = (1/(2K))², so the first ratio is 4K.
        assert!((rep.profile[0].1 - 4000.0).abs() < 1e-6);
    }
}
