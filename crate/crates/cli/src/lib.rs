//! Command logic behind the `hypermaj` binary.
//!
//! Every command returns a [`Verdict`]: a serializable report plus whether
//! the checked relation holds. `main` only parses flags, renders and maps
//! the verdict to an exit code.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hypermaj_core::schur::proof_suite;
use hypermaj_core::{
    default_grid, expand, klemes_example_with_tol, majorizes, power_majorizes,
    random_majorization_pair_with, recover_factorization, roots, sort_descending, EntryRange,
    ExampleBundle, MajorizationReport, PolynomialCoefficients, PowerMajorizationReport,
    ProofSuiteReport, QuadraticFactorization, RealVector,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const EXIT_HOLDS: u8 = 0;
pub const EXIT_FAILS: u8 = 1;
pub const EXIT_INPUT: u8 = 2;

/// Largest supported vector length in `verify-theorem`.
pub const N_MAX_LIMIT: usize = 64;
/// Entries of `u` in the randomized harness.
pub const THEOREM_RANGE: (f64, f64) = (1.0, 10.0);

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] hypermaj_core::Error),

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{0}")]
    Usage(String),
}

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(
    name = "hypermaj",
    version,
    about = "Majorization and power majorization between roots of palindromic-quadratic polynomials"
)]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Comparison tolerance (scaled by the magnitude of the compared sums).
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,

    /// Largest exponent of the power-majorization grid.
    #[arg(long, global = true, default_value_t = 64.0)]
    pub p_max: f64,

    /// Number of random instances for `verify-theorem`.
    #[arg(long, global = true, default_value_t = 1000)]
    pub trials: usize,

    /// Largest vector length for `verify-theorem`.
    #[arg(long, global = true, default_value_t = 6)]
    pub n_max: usize,

    /// Master seed for `verify-theorem`.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub output_format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            p_max: 64.0,
            trials: 1000,
            n_max: 6,
            seed: 0,
            output_format: OutputFormat::Text,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(CliError::Usage(format!(
                "--tol must be positive, got {}",
                self.tol
            )));
        }
        if !(self.p_max > 1.0 && self.p_max.is_finite()) {
            return Err(CliError::Usage(format!(
                "--p-max must exceed 1, got {}",
                self.p_max
            )));
        }
        if self.trials == 0 {
            return Err(CliError::Usage("--trials must be at least 1".into()));
        }
        if !(1..=N_MAX_LIMIT).contains(&self.n_max) {
            return Err(CliError::Usage(format!(
                "--n-max must be in 1..={N_MAX_LIMIT}, got {}",
                self.n_max
            )));
        }
        Ok(())
    }
}

/// A vector given inline (`7,2`, `"7 2"`, `[7,2]`) or as `@path` to a file
/// holding the same syntax.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorArg(pub String);

impl std::str::FromStr for VectorArg {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(Self(s.to_string()))
    }
}

impl VectorArg {
    pub fn load(&self) -> Result<RealVector> {
        match self.0.strip_prefix('@') {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                    path: path.into(),
                    source,
                })?;
                Ok(text.parse()?)
            }
            None => Ok(self.0.parse()?),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Is v majorized by u?
    Majorize {
        #[arg(long, allow_hyphen_values = true)]
        u: VectorArg,
        #[arg(long, allow_hyphen_values = true)]
        v: VectorArg,
    },
    /// Is y power majorized by x?
    PowerMajorize {
        #[arg(long, allow_hyphen_values = true)]
        x: VectorArg,
        #[arg(long, allow_hyphen_values = true)]
        y: VectorArg,
    },
    /// Roots u ± √(u² − 1) of every factor, sorted descending.
    Roots {
        #[arg(long, allow_hyphen_values = true)]
        u: VectorArg,
    },
    /// Coefficients of ∏(t² − 2uᵢt + 1), highest degree first.
    Expand {
        #[arg(long, allow_hyphen_values = true)]
        u: VectorArg,
    },
    /// Recover u from monic palindromic coefficients, highest degree first.
    Factor {
        #[arg(allow_hyphen_values = true)]
        coefficients: VectorArg,
    },
    /// Randomized check that v ≺ u implies roots(v) power majorized by roots(u).
    VerifyTheorem {
        /// Perturb one entry of v upward so that v is not majorized by u;
        /// every instance should then be reported as a violation.
        #[arg(long)]
        negate: bool,
    },
    /// The 4×4 Gram-matrix example.
    Klemes,
    /// Schur condition and sign suites of the proof functions at exponent p.
    SchurCheck {
        #[arg(long, allow_hyphen_values = true)]
        p: f64,
    },
}

/// A report and whether the relation it checks holds.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict<T> {
    pub report: T,
    pub holds: bool,
}

impl<T> Verdict<T> {
    pub fn exit_code(&self) -> u8 {
        if self.holds {
            EXIT_HOLDS
        } else {
            EXIT_FAILS
        }
    }
}

// ------------------------------------------------------------------ reports

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootsReport {
    pub u: RealVector,
    pub roots: RealVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpandReport {
    pub u: RealVector,
    pub coefficients: PolynomialCoefficients,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorReport {
    pub coefficients: Vec<f64>,
    pub factorizable: bool,
    pub u: Option<QuadraticFactorization>,
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailingInstance {
    pub trial: usize,
    pub u: RealVector,
    pub v: RealVector,
    pub p: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremSummary {
    pub trials: usize,
    pub n_max: usize,
    pub seed: u64,
    pub negate: bool,
    /// Instances whose roots are power majorized on the grid.
    pub passed: usize,
    /// Instances reported as violations.
    pub violations: usize,
    /// Smallest `Σxᵖ − Σyᵖ` over `p ≥ 1` across all instances.
    pub worst_margin_high: f64,
    /// Largest `Σxᵖ − Σyᵖ` over `0 < p < 1` across all instances.
    pub worst_margin_low: f64,
    /// First instance whose outcome contradicts the expectation.
    pub failing_instance: Option<FailingInstance>,
    pub scope: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KlemesReport {
    pub matches_expected: bool,
    pub bundle: ExampleBundle,
}

// ----------------------------------------------------------------- commands

pub fn cmd_majorize(
    u: &RealVector,
    v: &RealVector,
    config: &RunConfig,
) -> Result<Verdict<MajorizationReport>> {
    let report = majorizes(u, v, config.tol)?;
    Ok(Verdict {
        holds: report.holds,
        report,
    })
}

pub fn cmd_power_majorize(
    x: &RealVector,
    y: &RealVector,
    config: &RunConfig,
) -> Result<Verdict<PowerMajorizationReport>> {
    let report = power_majorizes(x, y, &default_grid(config.p_max)?, config.tol)?;
    Ok(Verdict {
        holds: report.holds,
        report,
    })
}

pub fn cmd_roots(u: &RealVector) -> Result<Verdict<RootsReport>> {
    let f = QuadraticFactorization::new(u.clone())?;
    let report = RootsReport {
        u: u.clone(),
        roots: sort_descending(&roots(&f))?,
    };
    Ok(Verdict {
        report,
        holds: true,
    })
}

pub fn cmd_expand(u: &RealVector) -> Result<Verdict<ExpandReport>> {
    let f = QuadraticFactorization::new(u.clone())?;
    let report = ExpandReport {
        u: u.clone(),
        coefficients: expand(&f),
    };
    Ok(Verdict {
        report,
        holds: true,
    })
}

/// Malformed coefficients are input errors; a well-formed polynomial that
/// simply has no such factorization is a failing verdict.
pub fn cmd_factor(coefficients: &RealVector, config: &RunConfig) -> Result<Verdict<FactorReport>> {
    use hypermaj_core::Error as E;
    let p = PolynomialCoefficients::new(coefficients.as_slice().to_vec())?;
    let (u, reason) = match recover_factorization(&p, config.tol) {
        Ok(f) => (Some(f), None),
        Err(e @ (E::NotPalindromic | E::Unpairable | E::NotInTheoremDomain(_))) => {
            (None, Some(e.to_string()))
        }
        Err(e) => return Err(e.into()),
    };
    let report = FactorReport {
        coefficients: p.coeffs().to_vec(),
        factorizable: u.is_some(),
        u,
        reason,
    };
    Ok(Verdict {
        holds: report.factorizable,
        report,
    })
}

struct Trial {
    u: RealVector,
    v: RealVector,
    report: PowerMajorizationReport,
}

/// One instance, drawn from its own ChaCha stream so trials are independent
/// of evaluation order.
fn run_trial(config: &RunConfig, trial: usize, negate: bool) -> Result<Trial> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(trial as u64);
    let n = rng.gen_range(1..=config.n_max);
    let transforms = rng.gen_range(0..=2 * n);
    let range = EntryRange::theorem(THEOREM_RANGE.0, THEOREM_RANGE.1)?;
    let (u, mut v) = random_majorization_pair_with(&mut rng, n, transforms, range)?;
    if negate {
        // raising one entry breaks Σv = Σu, so v is no longer majorized by u
        let mut entries = v.into_inner();
        let j = rng.gen_range(0..n);
        entries[j] += rng.gen_range(0.1..=1.0);
        v = RealVector::new(entries)?;
    }
    let grid = default_grid(config.p_max)?;
    let x = roots(&QuadraticFactorization::new(u.clone())?);
    let y = roots(&QuadraticFactorization::new(v.clone())?);
    let report = power_majorizes(&x, &y, &grid, config.tol)?;
    Ok(Trial { u, v, report })
}

/// Without `negate` every instance must be power majorized; with it every
/// instance must be reported as a violation.
pub fn cmd_verify_theorem(config: &RunConfig, negate: bool) -> Result<Verdict<TheoremSummary>> {
    let trials: Vec<Trial> = (0..config.trials)
        .into_par_iter()
        .map(|t| run_trial(config, t, negate))
        .collect::<Result<_>>()?;

    let passed = trials.iter().filter(|t| t.report.holds).count();
    let failing_instance = trials
        .iter()
        .enumerate()
        .find(|(_, t)| t.report.holds == negate)
        .map(|(trial, t)| FailingInstance {
            trial,
            u: t.u.clone(),
            v: t.v.clone(),
            p: t.report.violating_p,
        });
    let report = TheoremSummary {
        trials: config.trials,
        n_max: config.n_max,
        seed: config.seed,
        negate,
        passed,
        violations: config.trials - passed,
        worst_margin_high: trials
            .iter()
            .map(|t| t.report.min_margin_high)
            .fold(f64::INFINITY, f64::min),
        worst_margin_low: trials
            .iter()
            .map(|t| t.report.max_margin_low)
            .fold(f64::NEG_INFINITY, f64::max),
        failing_instance,
        scope: hypermaj_core::powermaj::VERDICT_SCOPE.to_string(),
    };
    Ok(Verdict {
        holds: report.failing_instance.is_none(),
        report,
    })
}

pub fn cmd_klemes(config: &RunConfig) -> Result<Verdict<KlemesReport>> {
    let bundle = klemes_example_with_tol(config.tol)?;
    let report = KlemesReport {
        matches_expected: bundle.matches_expected(),
        bundle,
    };
    Ok(Verdict {
        holds: report.matches_expected,
        report,
    })
}

pub fn cmd_schur_check(p: f64) -> Result<Verdict<ProofSuiteReport>> {
    let report = proof_suite(p)?;
    Ok(Verdict {
        holds: report.passed,
        report,
    })
}

// ---------------------------------------------------------------- rendering

/// `x` to 12 significant digits, trailing zeros trimmed; scientific outside
/// `[1e-5, 1e12)`.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        };
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        let s = format!("{x:.11e}");
        let (mantissa, exponent) = s.split_once('e').expect("scientific format");
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{mantissa}e{exponent}")
    }
}

fn fmt_vec(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|&x| fmt_num(x)).collect();
    format!("[{}]", parts.join(", "))
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_else(|| "none".into())
}

/// Human-readable rendering; JSON comes from `Serialize`.
pub trait Render: Serialize {
    fn text(&self) -> String;
}

impl Render for MajorizationReport {
    fn text(&self) -> String {
        let failing = self
            .failing_k
            .map(|k| k.to_string())
            .unwrap_or_else(|| "none".into());
        format!(
            "holds: {}\nprefix_margins: {}\nfailing_k: {failing}\ntotal_sum_gap: {}\n",
            self.holds,
            fmt_vec(&self.prefix_margins),
            fmt_num(self.total_sum_gap)
        )
    }
}

impl Render for PowerMajorizationReport {
    fn text(&self) -> String {
        format!(
            "holds: {}\nmin_margin_high: {}\nmax_margin_low: {}\nviolating_p: {}\nsum_gap_at_1: {}\ngrid_size: {}\nrefined: {}\nextrapolation_flag: {}\nscope: {}\n",
            self.holds,
            fmt_num(self.min_margin_high),
            fmt_num(self.max_margin_low),
            fmt_opt(self.violating_p),
            fmt_num(self.sum_gap_at_1),
            self.grid_size,
            self.refined,
            self.extrapolation_flag,
            self.scope
        )
    }
}

impl Render for RootsReport {
    fn text(&self) -> String {
        format!(
            "u: {}\nroots: {}\n",
            fmt_vec(self.u.as_slice()),
            fmt_vec(self.roots.as_slice())
        )
    }
}

impl Render for ExpandReport {
    fn text(&self) -> String {
        format!(
            "u: {}\ncoefficients: {}\n",
            fmt_vec(self.u.as_slice()),
            fmt_vec(self.coefficients.coeffs())
        )
    }
}

impl Render for FactorReport {
    fn text(&self) -> String {
        let mut out = format!(
            "coefficients: {}\nfactorizable: {}\n",
            fmt_vec(&self.coefficients),
            self.factorizable
        );
        if let Some(u) = &self.u {
            let _ = writeln!(out, "u: {}", fmt_vec(u.u().as_slice()));
        }
        if let Some(reason) = &self.reason {
            let _ = writeln!(out, "reason: {reason}");
        }
        out
    }
}

impl Render for TheoremSummary {
    fn text(&self) -> String {
        let mut out = format!(
            "trials: {}\nn_max: {}\nseed: {}\nnegate: {}\npassed: {}/{}\nviolations: {}\nworst_margin_high: {}\nworst_margin_low: {}\nscope: {}\n",
            self.trials,
            self.n_max,
            self.seed,
            self.negate,
            self.passed,
            self.trials,
            self.violations,
            fmt_num(self.worst_margin_high),
            fmt_num(self.worst_margin_low),
            self.scope
        );
        match &self.failing_instance {
            Some(f) => {
                let _ = writeln!(
                    out,
                    "failing_instance: trial {} u={} v={} p={}",
                    f.trial,
                    fmt_vec(f.u.as_slice()),
                    fmt_vec(f.v.as_slice()),
                    fmt_opt(f.p)
                );
            }
            None => out.push_str("failing_instance: none\n"),
        }
        out
    }
}

impl Render for KlemesReport {
    fn text(&self) -> String {
        let b = &self.bundle;
        let mut out = String::new();
        for (name, m) in [("X", &b.x_matrix), ("Y", &b.y_matrix)] {
            let _ = writeln!(out, "{name} = AAᵀ:");
            for row in m.to_rows() {
                let _ = writeln!(out, "  {}", fmt_vec(&row));
            }
        }
        let _ = writeln!(out, "char_poly(X): {}", fmt_vec(b.p_char.coeffs()));
        let _ = writeln!(out, "char_poly(Y): {}", fmt_vec(b.q_char.coeffs()));
        let _ = writeln!(out, "u: {}", fmt_vec(b.u.u().as_slice()));
        let _ = writeln!(out, "v: {}", fmt_vec(b.v.u().as_slice()));
        let _ = writeln!(out, "x (eigenvalues of X): {}", fmt_vec(b.x.as_slice()));
        let _ = writeln!(out, "y (eigenvalues of Y): {}", fmt_vec(b.y.as_slice()));
        let _ = writeln!(
            out,
            "2v majorized by 2u: {} (margins {})",
            b.coefficient_majorization.holds,
            fmt_vec(&b.coefficient_majorization.prefix_margins)
        );
        let _ = writeln!(
            out,
            "y majorized by x: {} (margins {})",
            b.root_majorization.holds,
            fmt_vec(&b.root_majorization.prefix_margins)
        );
        let pm = &b.root_power_majorization;
        let _ = writeln!(
            out,
            "y power majorized by x: {} (min high margin {}, max low margin {}, {})",
            pm.holds,
            fmt_num(pm.min_margin_high),
            fmt_num(pm.max_margin_low),
            pm.scope
        );
        let _ = writeln!(out, "matches_expected: {}", self.matches_expected);
        out
    }
}

impl Render for ProofSuiteReport {
    fn text(&self) -> String {
        let mut out = format!(
            "p: {}\nregime: {}\nschur: {} (min product {}, {})\n",
            fmt_num(self.p),
            self.regime,
            if self.schur.passed { "pass" } else { "fail" },
            fmt_num(self.schur.min_schur_product),
            self.schur.grid_description
        );
        for s in &self.suites {
            let _ = writeln!(
                out,
                "{}: {} ({} points, worst {})",
                s.name,
                if s.passed { "pass" } else { "fail" },
                s.points,
                fmt_num(s.worst)
            );
        }
        let _ = writeln!(out, "passed: {}", self.passed);
        out
    }
}

/// Pretty JSON or text, newline-terminated.
pub fn render<T: Render>(report: &T, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Text => Ok(report.text()),
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(report)
                .map_err(|e| CliError::Usage(format!("cannot serialize report: {e}")))?;
            s.push('\n');
            Ok(s)
        }
    }
}

/// Runs a parsed command; returns the rendered report and the exit code.
pub fn run(cli: &Cli) -> Result<(String, u8)> {
    let config = &cli.config;
    config.validate()?;
    let fmt = config.output_format;
    fn emit<T: Render>(v: Verdict<T>, fmt: OutputFormat) -> Result<(String, u8)> {
        Ok((render(&v.report, fmt)?, v.exit_code()))
    }
    match &cli.command {
        Command::Majorize { u, v } => emit(cmd_majorize(&u.load()?, &v.load()?, config)?, fmt),
        Command::PowerMajorize { x, y } => {
            emit(cmd_power_majorize(&x.load()?, &y.load()?, config)?, fmt)
        }
        Command::Roots { u } => emit(cmd_roots(&u.load()?)?, fmt),
        Command::Expand { u } => emit(cmd_expand(&u.load()?)?, fmt),
        Command::Factor { coefficients } => emit(cmd_factor(&coefficients.load()?, config)?, fmt),
        Command::VerifyTheorem { negate } => emit(cmd_verify_theorem(config, *negate)?, fmt),
        Command::Klemes => emit(cmd_klemes(config)?, fmt),
        Command::SchurCheck { p } => emit(cmd_schur_check(*p)?, fmt),
    }
}
