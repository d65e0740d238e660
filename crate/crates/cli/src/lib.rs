//! Front end for the `optaylor` binary: problem-file parsing and the
//! `expand`, `coeffs`, `verify` and `convergence` reports.
//!
//! Every command returns a [`Report`] whose text is a pure function of the
//! inputs, so reports can be compared byte for byte.

pub mod commands;
pub mod problem;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use optaylor::{ExpansionOptions, Function64, QuadratureOptions, Strategy};
use thiserror::Error;

pub use commands::{cmd_coeffs, cmd_convergence, cmd_expand, cmd_verify, parse_scales, Report};
pub use problem::{format_problem, parse_problem};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(
        "verify budget exceeded: N = {dim}, order {order} (limits N <= {}, order <= {})",
        commands::VERIFY_MAX_DIM,
        commands::VERIFY_MAX_ORDER
    )]
    VerifyBudget { dim: usize, order: usize },
    #[error(transparent)]
    Core(#[from] optaylor::Error),
}

#[derive(Debug, Parser)]
#[command(name = "optaylor", version, about = "Taylor expansion of f(λ + τ) around a diagonal matrix")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Expand f(λ + τ) order by order and compare with a dense reference.
    Expand(CommonArgs),
    /// Evaluate one path coefficient by several independent methods.
    Coeffs(CoeffsArgs),
    /// Cross-check path-sum, quadrature, lemma and dense reference.
    Verify(CommonArgs),
    /// Truncation error against the scale of τ, with fitted slopes.
    Convergence(ConvergenceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    PathSum,
    Quadrature,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::PathSum => Strategy::PathSum,
            StrategyArg::Quadrature => Strategy::Quadrature,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Problem file.
    pub problem: PathBuf,
    /// Function: exp, sin, cos, log, pow:<p>, poly:<c0>,<c1>,..., recip:<a>.
    #[arg(long = "f", value_name = "SPEC")]
    pub function: String,
    /// Highest expansion order.
    #[arg(long, value_name = "N_MAX", default_value_t = 4)]
    pub order: usize,
    #[arg(long, value_enum, default_value_t = StrategyArg::Quadrature)]
    pub strategy: StrategyArg,
    /// Largest accepted max-abs discrepancy.
    #[arg(long, default_value_t = 1e-8)]
    pub accept_tol: f64,
    #[arg(long, default_value_t = 1.25)]
    pub contour_radius_factor: f64,
    #[arg(long, default_value_t = 64)]
    pub quad_nodes: usize,
    #[arg(long, default_value_t = 4096)]
    pub quad_max_nodes: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub quad_tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct CoeffsArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Zero-based index path i,m1,...,p.
    #[arg(long, value_name = "PATH")]
    pub path: String,
}

#[derive(Debug, Clone, Args)]
pub struct ConvergenceArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Comma-separated positive scales; `a/b` fractions are accepted.
    #[arg(long, default_value = "1,0.5,0.25,0.125", allow_hyphen_values = true)]
    pub scales: String,
}

/// Parsed inputs shared by every command.
#[derive(Debug, Clone)]
pub struct Settings {
    pub function: Function64,
    pub order: usize,
    pub options: ExpansionOptions<f64>,
    pub accept_tol: f64,
}

impl CommonArgs {
    pub fn settings(&self) -> Result<Settings, CliError> {
        let function = Function64::parse_spec(&self.function)?;
        if self.accept_tol.is_nan() || self.accept_tol < 0.0 {
            return Err(optaylor::Error::Domain(format!("--accept-tol must be non-negative, got {}", self.accept_tol)).into());
        }
        let quadrature = QuadratureOptions {
            radius_factor: self.contour_radius_factor,
            initial_nodes: self.quad_nodes,
            max_nodes: self.quad_max_nodes,
            tol: self.quad_tol,
        };
        Ok(Settings {
            function,
            order: self.order,
            options: ExpansionOptions {
                strategy: self.strategy.into(),
                quadrature,
                ..ExpansionOptions::default()
            },
            accept_tol: self.accept_tol,
        })
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let common = match &cli.command {
        Command::Expand(a) | Command::Verify(a) => a,
        Command::Coeffs(a) => &a.common,
        Command::Convergence(a) => &a.common,
    };
    let (lambda, tau) = parse_problem(&read(&common.problem)?)?;
    let settings = common.settings()?;
    let report = match &cli.command {
        Command::Expand(_) => cmd_expand(&lambda, &tau, &settings)?,
        Command::Verify(_) => cmd_verify(&lambda, &tau, &settings)?,
        Command::Coeffs(a) => cmd_coeffs(&lambda, &tau, &settings, &a.path)?,
        Command::Convergence(a) => cmd_convergence(&lambda, &tau, &settings, &parse_scales(&a.scales)?)?,
    };
    Ok(report)
}
