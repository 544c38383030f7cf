//! Runner behind the `garding-lab` binary: reads operator spec files, runs
//! check suites and renders deterministic JSON reports.

pub mod json;

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use garding_core::analysis::{
    check_central, check_dirichlet, check_hyperbolic, garding_eigenvalues, interlace_sampled, lemma22_check,
};
use garding_core::majorization::{
    basic_lemma_check, check_majorization, check_prop16_consistency, diag_coefficient_check, diagonal_restriction,
};
use garding_core::operator::Advisory;
use garding_core::tree::{parse_spec, parse_square_str, parse_sym_matrix_str};
use garding_core::{CheckReport, Flags, GardingOperator, SymMatrix};
use serde::Serialize;

pub const DEFAULT_SEED: u64 = 20_240_601;
pub const DEFAULT_SAMPLES: usize = 2000;
pub const DEFAULT_REFINE: usize = 500;
pub const SEED_ENV: &str = "GARDING_LAB_SEED";

/// Sample caps for the suites whose per-sample cost is far above a ratio evaluation.
const GRADIENT_DET_CAP: usize = 200;
const INTERLACE_CAP: usize = 200;
const DIAG_COEFF_CAP: usize = 20;
const LEMMA22_CAP: usize = 50;

/// The diagonal restriction is recovered by interpolation; relative
/// coefficients below this are recovery noise, not terms.
const RESTRICTION_CHOP: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Hyperbolic,
    Dirichlet,
    Central,
    Majorization,
    GradientDet,
    Interlace,
    DiagCoeffs,
    Lemma22,
    BasicLemma,
}

impl Suite {
    /// Order in which `all` expands and in which suites always run.
    pub const ALL: [Suite; 9] = [
        Suite::Hyperbolic,
        Suite::Dirichlet,
        Suite::Central,
        Suite::Majorization,
        Suite::GradientDet,
        Suite::Interlace,
        Suite::DiagCoeffs,
        Suite::Lemma22,
        Suite::BasicLemma,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Hyperbolic => "hyperbolic",
            Suite::Dirichlet => "dirichlet",
            Suite::Central => "central",
            Suite::Majorization => "majorization",
            Suite::GradientDet => "gradient-det",
            Suite::Interlace => "interlace",
            Suite::DiagCoeffs => "diag-coeffs",
            Suite::Lemma22 => "lemma22",
            Suite::BasicLemma => "basic-lemma",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A suite name or `all`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteSelection(pub Vec<Suite>);

impl FromStr for SuiteSelection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "all" {
            return Ok(SuiteSelection(Suite::ALL.to_vec()));
        }
        Suite::ALL.iter().find(|suite| suite.name() == s).map(|&suite| SuiteSelection(vec![suite])).ok_or_else(|| {
            let names: Vec<_> = Suite::ALL.iter().map(|s| s.name()).collect();
            format!("unknown suite {s:?}; expected one of {}, all", names.join(", "))
        })
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments, unreadable or malformed input: exit code 2.
    Config(String),
    /// A computation that could not produce its result: exit code 1.
    Compute(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Compute(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) | CliError::Compute(m) => f.write_str(m),
        }
    }
}

impl std::error::Error for CliError {}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub spec_path: PathBuf,
    pub suites: Vec<Suite>,
    pub seed: u64,
    pub samples: usize,
    pub refine_iters: usize,
    pub output_path: Option<PathBuf>,
}

impl RunConfig {
    /// Deduplicates and orders the suites; rejects an empty selection or zero samples.
    pub fn new(
        spec_path: PathBuf,
        selections: Vec<SuiteSelection>,
        seed: u64,
        samples: usize,
        refine_iters: usize,
        output_path: Option<PathBuf>,
    ) -> Result<Self, CliError> {
        let mut suites: Vec<Suite> = if selections.is_empty() {
            Suite::ALL.to_vec()
        } else {
            selections.into_iter().flat_map(|s| s.0).collect()
        };
        suites.sort();
        suites.dedup();
        if samples == 0 {
            return Err(CliError::Config("--samples must be at least 1".into()));
        }
        Ok(Self { spec_path, suites, seed, samples, refine_iters, output_path })
    }
}

/// `--seed` if given, else `GARDING_LAB_SEED`, else [`DEFAULT_SEED`].
pub fn resolve_seed(flag: Option<u64>, env: Option<&str>) -> Result<u64, CliError> {
    match (flag, env) {
        (Some(seed), _) => Ok(seed),
        (None, Some(text)) => {
            text.trim().parse().map_err(|_| CliError::Config(format!("{SEED_ENV}={text:?} is not an unsigned integer")))
        }
        (None, None) => Ok(DEFAULT_SEED),
    }
}

pub fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))
}

pub fn load_operator(path: &Path) -> Result<GardingOperator, CliError> {
    parse_spec(&read_file(path)?).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn load_matrix(path: &Path) -> Result<SymMatrix, CliError> {
    parse_sym_matrix_str(&read_file(path)?).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

#[derive(Debug, Serialize)]
pub struct OperatorSummary {
    pub name: String,
    pub n: usize,
    #[serde(rename = "N")]
    pub degree: usize,
    pub flags: Flags,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub advisories: Vec<Advisory>,
}

impl OperatorSummary {
    pub fn of(g: &GardingOperator) -> Self {
        Self {
            name: g.name().to_owned(),
            n: g.n(),
            degree: g.degree(),
            flags: g.flags(),
            advisories: g.advisories().to_vec(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Versions {
    #[serde(rename = "garding-lab")]
    pub lab: &'static str,
    #[serde(rename = "garding-core")]
    pub core: &'static str,
}

impl Versions {
    pub fn current() -> Self {
        Self { lab: env!("CARGO_PKG_VERSION"), core: garding_core::VERSION }
    }
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub operator: OperatorSummary,
    pub suites: Vec<CheckReport>,
    pub seed: u64,
    pub versions: Versions,
}

impl RunReport {
    pub fn all_pass(&self) -> bool {
        self.suites.iter().all(|r| r.pass)
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_pass() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        json::to_string(self).expect("report serializes")
    }
}

/// Turns an error from a suite into a failed report for that suite.
fn errored(suite: Suite, err: garding_core::Error) -> CheckReport {
    let mut report = CheckReport::new(suite.name());
    report.note(err.to_string());
    report.fail("error", None);
    report
}

pub fn run_suite(g: &GardingOperator, suite: Suite, samples: usize, refine: usize, seed: u64) -> CheckReport {
    let identity = SymMatrix::identity(g.n());
    let result = match suite {
        Suite::Hyperbolic => Ok(check_hyperbolic(g, &identity, samples, seed)),
        Suite::Dirichlet => Ok(check_dirichlet(g, samples, seed)),
        Suite::Central => check_central(g, seed).map(|c| c.to_report()),
        Suite::Majorization => check_majorization(g, samples, refine, seed).map(|m| m.to_report()),
        Suite::GradientDet => check_prop16_consistency(g, samples.min(GRADIENT_DET_CAP), refine, seed),
        Suite::Interlace => Ok(interlace_sampled(g, samples.min(INTERLACE_CAP), seed)),
        Suite::DiagCoeffs => diag_coefficient_check(g, samples.min(DIAG_COEFF_CAP), seed),
        Suite::Lemma22 => lemma22_check(g, samples.min(LEMMA22_CAP), seed),
        Suite::BasicLemma => diagonal_restriction(g, None).map(|p| {
            let p = p.chop(RESTRICTION_CHOP * p.max_abs_coeff());
            let mut report = basic_lemma_check(&p, samples, seed);
            report.note(format!(
                "applied to the diagonal restriction, coefficients below {RESTRICTION_CHOP:e}·max|c| dropped"
            ));
            report
        }),
    };
    result.unwrap_or_else(|e| errored(suite, e))
}

/// Runs the configured suites against an already parsed operator.
pub fn run_operator(g: &GardingOperator, config: &RunConfig) -> RunReport {
    let suites =
        config.suites.iter().map(|&s| run_suite(g, s, config.samples, config.refine_iters, config.seed)).collect();
    RunReport { operator: OperatorSummary::of(g), suites, seed: config.seed, versions: Versions::current() }
}

/// Parses the spec, runs the suites and writes the report to the output
/// file or returns it for standard output.
pub fn run(config: &RunConfig) -> Result<RunReport, CliError> {
    let g = load_operator(&config.spec_path)?;
    let report = run_operator(&g, config);
    if let Some(path) = &config.output_path {
        std::fs::write(path, report.to_json())
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(report)
}

#[derive(Debug, Serialize)]
pub struct EvalOutput {
    pub operator: String,
    pub value: f64,
}

pub fn eval(spec: &Path, matrix: &Path) -> Result<EvalOutput, CliError> {
    let g = load_operator(spec)?;
    let a = load_matrix(matrix)?;
    let value = g.evaluate(&a).map_err(|e| match e {
        garding_core::Error::DimensionMismatch { .. } => CliError::Config(e.to_string()),
        other => CliError::Compute(other.to_string()),
    })?;
    Ok(EvalOutput { operator: g.name().to_owned(), value })
}

#[derive(Debug, Serialize)]
pub struct EigenOutput {
    pub operator: String,
    /// Nonincreasing.
    pub eigenvalues: Vec<f64>,
    pub realness_residual: f64,
}

pub fn eigen(spec: &Path, matrix: &Path, direction: Option<&Path>) -> Result<EigenOutput, CliError> {
    let g = load_operator(spec)?;
    let a = load_matrix(matrix)?;
    let b = match direction {
        Some(path) => load_matrix(path)?,
        None => SymMatrix::identity(g.n()),
    };
    let eig = garding_eigenvalues(&g, &b, &a).map_err(|e| match e {
        garding_core::Error::DimensionMismatch { .. } => CliError::Config(e.to_string()),
        other => CliError::Compute(other.to_string()),
    })?;
    Ok(EigenOutput { operator: g.name().to_owned(), eigenvalues: eig.values, realness_residual: eig.realness_residual })
}

/// Coefficients of `x ↦ g(h·diag(x)·hᵗ)` in graded-lex order.
pub fn restrict_diag(spec: &Path, h: Option<&Path>) -> Result<garding_core::SparsePoly, CliError> {
    let g = load_operator(spec)?;
    let h = match h {
        Some(path) => {
            let text = read_file(path)?;
            Some(parse_square_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?)
        }
        None => None,
    };
    if let Some(h) = &h {
        if h.n() != g.n() {
            return Err(CliError::Config(format!("h is {}×{}, operator acts on n = {}", h.n(), h.n(), g.n())));
        }
    }
    diagonal_restriction(&g, h.as_ref()).map_err(|e| CliError::Compute(e.to_string()))
}
