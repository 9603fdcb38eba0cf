//! Command-line front end for the `dtlab` engines and experiment drivers.
//!
//! Every run resolves its flags and optional JSON config into a [`Job`]. The
//! job is executed, its report rendered as JSON or CSV, and when `--out` is
//! given a [`RunManifest`] is written next to the report so the run can be
//! replayed byte for byte.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use dtlab::bpoly::{format_rational, BElem};
use dtlab::brown_hs::HsError;
use dtlab::cumulant::{moment, pairing_oracle, CoeffWord, EngineError, EpsWord};
use dtlab::experiments::concentration::{power_density_hypothesis, HypothesisReport, PowerDensityConfig};
use dtlab::experiments::hs_laws::{hs_laws, HsLawsConfig};
use dtlab::experiments::inequalities::{
    coefficient_norm_check, diagonal_power_check, power_norm_battery, CoefficientNormConfig, CoefficientNormReport,
    DiagonalPowerConfig, DiagonalPowerReport, PowerNormBattery, PowerNormConfig,
};
use dtlab::experiments::moments::{simulate, SimulateConfig};
use dtlab::experiments::restriction::{restriction_dt_check, RestrictionConfig, RestrictionReport};
use dtlab::experiments::{
    concentration_family, run_two_annulus, AngleExperimentConfig, AngleReport, ConcentrationFamilyConfig,
    ConcentrationReport, ExperimentError, TrialTable,
};
use dtlab::matrix_lab::{LinalgError, MatrixError};
use dtlab::seed::SEED_SCHEME;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
/// Longest word accepted by `oracle`; enumeration cost grows factorially.
pub const ORACLE_MAX_LEN: usize = 20;

pub const EXIT_PASS: u8 = 0;
pub const EXIT_CRITERION: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "dtlab",
    version,
    about = "DT-operator moments, matrix models, invariant subspaces and angle bounds"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact moment polynomial E(word) and trace of a word in T, T*.
    Moment(MomentArgs),
    /// Trace of a word by direct enumeration of non-crossing pairings.
    Oracle(OracleArgs),
    /// Monte-Carlo *-moments of the matrix models against exact values.
    Simulate(RunArgs),
    /// Projection laws on random matrices with separated spectra.
    Hs(RunArgs),
    /// Two-annulus angle experiment and the trace, norm and restriction checks.
    Angle(RunArgs),
    /// Angle bound ladder for a concentration family.
    Concentration(RunArgs),
    /// Re-runs a manifest and compares the report byte for byte.
    Replay(ReplayArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct OutputArgs {
    /// Write the report here and the manifest to `<out>.manifest.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct MomentArgs {
    /// Word over the letters `*` and `1`.
    pub word: String,
    /// JSON array with one polynomial per letter, each an array of rational
    /// coefficient strings in increasing degree, e.g. `[["1","1/2"],["0","1"]]`.
    #[arg(long)]
    pub coeffs: Option<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    pub word: String,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    /// JSON config file; the reference configuration is used when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Matrix size.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
    /// Also write the reproduced report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
}

fn linalg_code(e: &LinalgError) -> &'static str {
    match e {
        LinalgError::DimensionMismatch(_) => "matrix_lab::linalg::dimension_mismatch",
        LinalgError::NotSquare { .. } => "matrix_lab::linalg::not_square",
        LinalgError::Singular { .. } => "matrix_lab::linalg::singular",
        LinalgError::InaccurateInverse { .. } => "matrix_lab::linalg::inaccurate_inverse",
        LinalgError::SchurNoConvergence => "matrix_lab::linalg::schur_no_convergence",
        LinalgError::ReorderFailed { .. } => "matrix_lab::linalg::reorder_failed",
        LinalgError::NonFinite => "matrix_lab::linalg::non_finite",
    }
}

fn matrix_code(e: &MatrixError) -> &'static str {
    match e {
        MatrixError::Linalg(l) => linalg_code(l),
        MatrixError::InvalidMeasure(_) => "matrix_lab::invalid_measure",
        MatrixError::InvalidParameter(_) => "matrix_lab::invalid_parameter",
        MatrixError::Resolution { .. } => "matrix_lab::resolution",
        MatrixError::BlockTooSmall { .. } => "matrix_lab::block_too_small",
        MatrixError::DimensionMismatch(_) => "matrix_lab::dimension_mismatch",
        MatrixError::Io(_) => "matrix_lab::io",
    }
}

fn hs_code(e: &HsError) -> &'static str {
    match e {
        HsError::Linalg(l) => linalg_code(l),
        HsError::BoundaryAmbiguity { .. } => "brown_hs::boundary_ambiguity",
        HsError::ZeroProjection => "brown_hs::zero_projection",
        HsError::IllConditioned { .. } => "brown_hs::ill_conditioned",
        HsError::InvalidRegion(_) => "brown_hs::invalid_region",
        HsError::NotNormalized(_) => "brown_hs::not_normalized",
    }
}

fn engine_code(e: &EngineError) -> &'static str {
    match e {
        EngineError::BadLetter(_) => "cumulant_engine::bad_letter",
        EngineError::LengthMismatch { .. } => "cumulant_engine::length_mismatch",
        EngineError::WordTooLong { .. } => "cumulant_engine::word_too_long",
        EngineError::Bpoly(_) => "bpoly::parse",
    }
}

impl CliError {
    /// Module-qualified identifier printed with the message.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Config(_) => "cli::config",
            CliError::Io { .. } => "cli::io",
            CliError::Engine(e) => engine_code(e),
            CliError::Experiment(e) => match e {
                ExperimentError::Matrix(m) => matrix_code(m),
                ExperimentError::Hs(h) => hs_code(h),
                ExperimentError::Linalg(l) => linalg_code(l),
                ExperimentError::Engine(g) => engine_code(g),
                ExperimentError::InvalidConfig(_) => "experiments::invalid_config",
                ExperimentError::Truncation { .. } => "experiments::truncation",
                ExperimentError::EmptyAnnulus(_) => "experiments::empty_annulus",
            },
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Experiment(e) if e.is_numerical() => EXIT_NUMERICAL,
            _ => EXIT_CONFIG,
        }
    }
}

fn config_err<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Config(msg.into()))
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

/// Sections of the `angle` command; absent sections are skipped.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AngleSuiteConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub two_annulus: Option<AngleExperimentConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power_norms: Option<PowerNormConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagonal_powers: Option<DiagonalPowerConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficient_norms: Option<CoefficientNormConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restriction: Option<RestrictionConfig>,
}

impl AngleSuiteConfig {
    /// The two-annulus experiment at its reference configuration only.
    pub fn reference() -> Self {
        AngleSuiteConfig {
            two_annulus: Some(AngleExperimentConfig::reference()),
            power_norms: None,
            diagonal_powers: None,
            coefficient_norms: None,
            restriction: None,
        }
    }

    /// Every section at its reference configuration.
    pub fn full() -> Self {
        AngleSuiteConfig {
            two_annulus: Some(AngleExperimentConfig::reference()),
            power_norms: Some(PowerNormConfig::reference()),
            diagonal_powers: Some(DiagonalPowerConfig::reference()),
            coefficient_norms: Some(CoefficientNormConfig::reference()),
            restriction: Some(RestrictionConfig::reference()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AngleSuiteReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub two_annulus: Option<AngleReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power_norms: Option<PowerNormBattery>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagonal_powers: Option<DiagonalPowerReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficient_norms: Option<CoefficientNormReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restriction: Option<RestrictionReport>,
    pub pass: bool,
}

fn reference_power_density() -> Option<PowerDensityConfig> {
    Some(PowerDensityConfig::reference())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConcentrationSuiteConfig {
    pub family: ConcentrationFamilyConfig,
    #[serde(default = "reference_power_density", skip_serializing_if = "Option::is_none")]
    pub power_density: Option<PowerDensityConfig>,
}

impl ConcentrationSuiteConfig {
    pub fn reference() -> Self {
        ConcentrationSuiteConfig {
            family: ConcentrationFamilyConfig::reference(),
            power_density: reference_power_density(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConcentrationSuiteReport {
    pub family: ConcentrationReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power_density: Option<HypothesisReport>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WordJob {
    pub word: EpsWord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Vec<BElem>>,
}

/// A fully resolved command.
#[derive(Clone, Debug, PartialEq)]
pub enum Job {
    Moment(WordJob),
    Oracle(WordJob),
    Simulate(SimulateConfig),
    Hs(HsLawsConfig),
    Angle(AngleSuiteConfig),
    Concentration(ConcentrationSuiteConfig),
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("configs serialize")
}

fn from_value<T: for<'de> Deserialize<'de>>(v: Value, what: &str) -> Result<T, CliError> {
    serde_json::from_value(v).map_err(|e| CliError::Config(format!("invalid {what} config: {e}")))
}

impl Job {
    pub fn name(&self) -> &'static str {
        match self {
            Job::Moment(_) => "moment",
            Job::Oracle(_) => "oracle",
            Job::Simulate(_) => "simulate",
            Job::Hs(_) => "hs",
            Job::Angle(_) => "angle",
            Job::Concentration(_) => "concentration",
        }
    }

    pub fn config(&self) -> Value {
        match self {
            Job::Moment(c) | Job::Oracle(c) => to_value(c),
            Job::Simulate(c) => to_value(c),
            Job::Hs(c) => to_value(c),
            Job::Angle(c) => to_value(c),
            Job::Concentration(c) => to_value(c),
        }
    }

    pub fn from_parts(name: &str, config: Value) -> Result<Job, CliError> {
        Ok(match name {
            "moment" => Job::Moment(from_value(config, name)?),
            "oracle" => Job::Oracle(from_value(config, name)?),
            "simulate" => Job::Simulate(from_value(config, name)?),
            "hs" => Job::Hs(from_value(config, name)?),
            "angle" => Job::Angle(from_value(config, name)?),
            "concentration" => Job::Concentration(from_value(config, name)?),
            other => return config_err(format!("unknown command {other:?}")),
        })
    }

    /// Top-level seed, when the command is random.
    pub fn seed(&self) -> Option<u64> {
        match self {
            Job::Moment(_) | Job::Oracle(_) => None,
            Job::Simulate(c) => Some(c.seed),
            Job::Hs(c) => Some(c.seed),
            Job::Angle(c) => c
                .two_annulus
                .as_ref()
                .map(|s| s.seed)
                .or(c.power_norms.as_ref().map(|s| s.seed))
                .or(c.diagonal_powers.as_ref().map(|s| s.seed))
                .or(c.coefficient_norms.as_ref().map(|s| s.seed))
                .or(c.restriction.as_ref().map(|s| s.seed)),
            Job::Concentration(c) => Some(c.family.seed),
        }
    }
}

fn read_config<T: for<'de> Deserialize<'de>>(path: &Path, what: &str) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    from_value(value, what)
}

fn apply_overrides(job: &mut Job, args: &RunArgs) {
    let (seed, n, trials) = (args.seed, args.n, args.trials);
    fn set<T: Copy>(slot: &mut T, v: Option<T>) {
        if let Some(v) = v {
            *slot = v;
        }
    }
    match job {
        Job::Moment(_) | Job::Oracle(_) => {}
        Job::Simulate(c) => {
            set(&mut c.seed, seed);
            set(&mut c.n, n);
            set(&mut c.trials, trials);
        }
        Job::Hs(c) => {
            set(&mut c.seed, seed);
            set(&mut c.n, n);
            set(&mut c.trials, trials);
        }
        Job::Angle(c) => {
            if let Some(s) = c.two_annulus.as_mut() {
                set(&mut s.seed, seed);
                set(&mut s.n, n);
                set(&mut s.trials, trials);
            }
            if let Some(s) = c.power_norms.as_mut() {
                set(&mut s.seed, seed);
                set(&mut s.n, n);
                set(&mut s.trials, trials);
            }
            if let Some(s) = c.diagonal_powers.as_mut() {
                set(&mut s.seed, seed);
                set(&mut s.n, n);
                set(&mut s.trials, trials);
            }
            if let Some(s) = c.coefficient_norms.as_mut() {
                set(&mut s.seed, seed);
                set(&mut s.n, n);
                set(&mut s.trials, trials);
            }
            if let Some(s) = c.restriction.as_mut() {
                set(&mut s.seed, seed);
                set(&mut s.n, n);
                set(&mut s.trials, trials);
            }
        }
        Job::Concentration(c) => {
            set(&mut c.family.seed, seed);
            set(&mut c.family.n, n);
            set(&mut c.family.trials, trials);
        }
    }
}

fn parse_word(word: &str) -> Result<EpsWord, CliError> {
    Ok(word.parse::<EpsWord>()?)
}

/// Resolves a parsed command line into a job and its output settings.
pub fn resolve(command: &Command) -> Result<(Job, &OutputArgs), CliError> {
    match command {
        Command::Moment(a) => {
            let coeffs = match &a.coeffs {
                Some(text) => Some(
                    serde_json::from_str::<Vec<BElem>>(text)
                        .map_err(|e| CliError::Config(format!("invalid --coeffs: {e}")))?,
                ),
                None => None,
            };
            let job = WordJob {
                word: parse_word(&a.word)?,
                coeffs,
            };
            Ok((Job::Moment(job), &a.output))
        }
        Command::Oracle(a) => Ok((
            Job::Oracle(WordJob {
                word: parse_word(&a.word)?,
                coeffs: None,
            }),
            &a.output,
        )),
        Command::Simulate(a) | Command::Hs(a) | Command::Angle(a) | Command::Concentration(a) => {
            let mut job = match (command, &a.config) {
                (Command::Simulate(_), Some(p)) => Job::Simulate(read_config(p, "simulate")?),
                (Command::Simulate(_), None) => Job::Simulate(SimulateConfig::reference()),
                (Command::Hs(_), Some(p)) => Job::Hs(read_config(p, "hs")?),
                (Command::Hs(_), None) => Job::Hs(HsLawsConfig::reference()),
                (Command::Angle(_), Some(p)) => Job::Angle(read_config(p, "angle")?),
                (Command::Angle(_), None) => Job::Angle(AngleSuiteConfig::reference()),
                (_, Some(p)) => Job::Concentration(read_config(p, "concentration")?),
                (_, None) => Job::Concentration(ConcentrationSuiteConfig::reference()),
            };
            apply_overrides(&mut job, a);
            Ok((job, &a.output))
        }
        Command::Replay(_) => config_err("replay has no job of its own"),
    }
}

/// A finished run: the JSON report, the per-trial CSV table if the command
/// has one, and the overall verdict.
#[derive(Clone, Debug)]
pub struct JobOutput {
    pub json: String,
    pub csv: Option<String>,
    pub pass: bool,
}

fn finish<R: Serialize>(report: &R, csv: Option<String>, pass: bool) -> JobOutput {
    let mut json = serde_json::to_string_pretty(report).expect("reports serialize");
    json.push('\n');
    JobOutput { json, csv, pass }
}

#[derive(Serialize)]
struct MomentReport<'a> {
    word: &'a EpsWord,
    #[serde(skip_serializing_if = "Option::is_none")]
    coeffs: Option<&'a Vec<BElem>>,
    moment: Vec<String>,
    trace: String,
}

#[derive(Serialize)]
struct OracleReport<'a> {
    word: &'a EpsWord,
    trace: String,
}

fn word_csv(word: &EpsWord, trace: &str) -> String {
    format!("word,trace\n{word},{trace}\n")
}

pub fn run_job(job: &Job) -> Result<JobOutput, CliError> {
    Ok(match job {
        Job::Moment(w) => {
            let cw = match &w.coeffs {
                Some(c) => CoeffWord::new(w.word.clone(), c.clone())?,
                None => CoeffWord::units(w.word.clone()),
            };
            let poly = moment(&cw)?;
            let mut coeffs = poly.to_strings();
            if coeffs.is_empty() {
                coeffs.push("0".to_string());
            }
            let trace = format_rational(&poly.trace());
            let csv = word_csv(&w.word, &trace);
            finish(
                &MomentReport {
                    word: &w.word,
                    coeffs: w.coeffs.as_ref(),
                    moment: coeffs,
                    trace,
                },
                Some(csv),
                true,
            )
        }
        Job::Oracle(w) => {
            if w.coeffs.is_some() {
                return config_err("the oracle evaluates plain words only");
            }
            if w.word.len() > ORACLE_MAX_LEN {
                return config_err(format!("oracle words are limited to {ORACLE_MAX_LEN} letters"));
            }
            let trace = format_rational(&pairing_oracle(&w.word));
            let csv = word_csv(&w.word, &trace);
            finish(&OracleReport { word: &w.word, trace }, Some(csv), true)
        }
        Job::Simulate(c) => {
            let r = simulate(c)?;
            finish(&r, Some(r.to_csv()), r.pass)
        }
        Job::Hs(c) => {
            let r = hs_laws(c)?;
            finish(&r, Some(r.to_csv()), r.pass)
        }
        Job::Angle(c) => {
            let report = AngleSuiteReport {
                two_annulus: c.two_annulus.as_ref().map(run_two_annulus).transpose()?,
                power_norms: c.power_norms.as_ref().map(power_norm_battery).transpose()?,
                diagonal_powers: c.diagonal_powers.as_ref().map(diagonal_power_check).transpose()?,
                coefficient_norms: c.coefficient_norms.as_ref().map(coefficient_norm_check).transpose()?,
                restriction: c.restriction.as_ref().map(restriction_dt_check).transpose()?,
                pass: false,
            };
            let pass = report.two_annulus.as_ref().is_none_or(|r| r.pass)
                && report.power_norms.as_ref().is_none_or(|r| r.pass)
                && report.diagonal_powers.as_ref().is_none_or(|r| r.pass)
                && report.coefficient_norms.as_ref().is_none_or(|r| r.pass)
                && report.restriction.as_ref().is_none_or(|r| r.pass);
            let csv = match (&report.two_annulus, &report.restriction) {
                (Some(r), _) => Some(r.to_csv()),
                (None, Some(r)) => Some(r.to_csv()),
                _ => None,
            };
            finish(&AngleSuiteReport { pass, ..report }, csv, pass)
        }
        Job::Concentration(c) => {
            let family = concentration_family(&c.family)?;
            let power_density = c.power_density.as_ref().map(power_density_hypothesis).transpose()?;
            let pass = family.pass && power_density.as_ref().is_none_or(|r| r.pass);
            let csv = family.to_csv();
            finish(
                &ConcentrationSuiteReport {
                    family,
                    power_density,
                    pass,
                },
                Some(csv),
                pass,
            )
        }
    })
}

/// The report text in the requested format.
pub fn render(output: &JobOutput, format: Format, job: &Job) -> Result<String, CliError> {
    match format {
        Format::Json => Ok(output.json.clone()),
        Format::Csv => match &output.csv {
            Some(csv) => Ok(csv.clone()),
            None => config_err(format!(
                "{} with this config has no per-trial table; use --format json",
                job.name()
            )),
        },
    }
}

/// Written next to every report as `<out>.manifest.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub command: String,
    pub config: Value,
    pub seed: Option<u64>,
    pub seed_scheme: String,
    pub version: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub format: Format,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn new(job: &Job, format: Format, outputs: Vec<PathBuf>) -> Self {
        let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        RunManifest {
            command: job.name().to_string(),
            config: job.config(),
            seed: job.seed(),
            seed_scheme: SEED_SCHEME.to_string(),
            version: VERSION.to_string(),
            timestamp,
            format,
            outputs,
        }
    }

    pub fn job(&self) -> Result<Job, CliError> {
        Job::from_parts(&self.command, self.config.clone())
    }
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| io_err(path, e))
}

/// Runs a job and writes its report; returns the rendered text and verdict.
pub fn run_and_write(job: &Job, output: &OutputArgs) -> Result<(String, bool), CliError> {
    let result = run_job(job)?;
    let text = render(&result, output.format, job)?;
    if let Some(out) = &output.out {
        write_file(out, &text)?;
        let manifest = RunManifest::new(job, output.format, vec![out.clone()]);
        let mut m = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        m.push('\n');
        write_file(&manifest_path(out), &m)?;
    }
    Ok((text, result.pass))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReplayOutcome {
    pub manifest: PathBuf,
    pub report: PathBuf,
    pub identical: bool,
    /// Byte offset of the first difference.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_difference: Option<usize>,
    pub pass: bool,
}

pub fn replay(manifest_file: &Path, out: Option<&Path>) -> Result<ReplayOutcome, CliError> {
    let text = fs::read_to_string(manifest_file).map_err(|e| io_err(manifest_file, e))?;
    let manifest: RunManifest =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", manifest_file.display())))?;
    let Some(report) = manifest.outputs.first().cloned() else {
        return config_err("manifest lists no outputs");
    };
    let job = manifest.job()?;
    let result = run_job(&job)?;
    let fresh = render(&result, manifest.format, &job)?;
    let original = fs::read(&report).map_err(|e| io_err(&report, e))?;
    if let Some(out) = out {
        write_file(out, &fresh)?;
    }
    let first_difference = fresh
        .as_bytes()
        .iter()
        .zip(&original)
        .position(|(a, b)| a != b)
        .or((fresh.len() != original.len()).then(|| fresh.len().min(original.len())));
    Ok(ReplayOutcome {
        manifest: manifest_file.to_path_buf(),
        report,
        identical: first_difference.is_none(),
        first_difference,
        pass: result.pass,
    })
}

/// Executes a parsed command line and returns the process exit code.
pub fn execute(cli: &Cli) -> Result<u8, CliError> {
    if let Command::Replay(a) = &cli.command {
        let outcome = replay(&a.manifest, a.out.as_deref())?;
        println!(
            "{}",
            serde_json::to_string_pretty(&outcome).expect("outcome serializes")
        );
        return Ok(if outcome.identical { EXIT_PASS } else { EXIT_CRITERION });
    }
    let (job, output) = resolve(&cli.command)?;
    let (text, pass) = run_and_write(&job, output)?;
    match &output.out {
        Some(out) => eprintln!("wrote {} and {}", out.display(), manifest_path(out).display()),
        None => print!("{text}"),
    }
    Ok(if pass { EXIT_PASS } else { EXIT_CRITERION })
}
