use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

#[derive(Debug, Parser)]
#[command(name = "entropy-perturb", version, about = "Taylor series of the von Neumann entropy of ρ₀ + εH")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Series coefficients for an instance read from files.
    Series(SeriesArgs),
    /// Series coefficients for a built-in example.
    Example(SeriesArgs),
    /// Check closed forms against quadrature and finite differences.
    Validate(ValidateArgs),
    /// Residual of the truncated series over a halving ε sweep.
    Convergence(ConvergenceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExampleName {
    OnemodeThermal,
    TwomodeThermal,
    DisplacedThermal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Base {
    Nats,
    Bits,
}

#[derive(Debug, Clone, Args)]
pub struct InstanceArgs {
    /// Unperturbed state, matrix JSON.
    #[arg(long, value_name = "FILE")]
    pub rho0: Option<PathBuf>,
    /// Trace deficit allowed for --rho0.
    #[arg(long, default_value_t = 0.0, value_name = "X")]
    pub trace_deficit: f64,
    /// First-order perturbation, matrix JSON.
    #[arg(long = "H", value_name = "FILE")]
    pub h: Option<PathBuf>,
    /// Second-order perturbation term.
    #[arg(long = "H2", value_name = "FILE", requires = "h")]
    pub h2: Option<PathBuf>,
    /// Third-order perturbation term.
    #[arg(long = "H3", value_name = "FILE", requires = "h2")]
    pub h3: Option<PathBuf>,
    /// Fourth-order perturbation term.
    #[arg(long = "H4", value_name = "FILE", requires = "h3")]
    pub h4: Option<PathBuf>,
    /// All perturbation terms, {"terms": [matrix, ...]}.
    #[arg(long, value_name = "FILE", conflicts_with = "h")]
    pub terms: Option<PathBuf>,
    /// Built-in example instead of files.
    #[arg(long, value_enum, conflicts_with_all = ["rho0", "h", "terms"])]
    pub name: Option<ExampleName>,
    /// Thermal ratio N/(N+1).
    #[arg(long, default_value_t = 0.5)]
    pub v: f64,
    /// Perturbation amplitude.
    #[arg(long, default_value = "1", value_parser = parse_complex, value_name = "RE[,IM]", allow_hyphen_values = true)]
    pub alpha: Complex64,
    /// Fock truncation per mode (default: smallest D with v^D < 1e-12).
    #[arg(long = "D", value_name = "N")]
    pub dim: Option<usize>,
    /// Largest Fock tail mass v^D accepted for an example.
    #[arg(long, default_value_t = 1e-12, value_parser = parse_positive, value_name = "TAU")]
    pub tail_tol: f64,
}

#[derive(Debug, Clone, Args)]
pub struct Numerics {
    /// Series order K.
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..=12))]
    pub order: u32,
    /// Relative gap below which eigenvalues form a cluster.
    #[arg(long, value_name = "TOL", value_parser = parse_positive)]
    pub cluster_tol: Option<f64>,
    /// Relative tolerance of the resolvent quadrature.
    #[arg(long, value_name = "TOL", value_parser = parse_positive)]
    pub quad_tol: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long, value_enum, default_value = "nats")]
    pub base: Base,
}

#[derive(Debug, Clone, Args)]
pub struct SeriesArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub numerics: Numerics,
    /// Also report the exact entropy and the series residual at this ε.
    #[arg(long, value_name = "EPS", allow_hyphen_values = true)]
    pub exact_at: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub numerics: Numerics,
    /// Starting step of the finite-difference oracle.
    #[arg(long, default_value_t = 1e-2, value_parser = parse_positive)]
    pub eps: f64,
}

#[derive(Debug, Clone, Args)]
pub struct ConvergenceArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[command(flatten)]
    pub numerics: Numerics,
    /// Largest ε of the sweep.
    #[arg(long, default_value_t = 1e-1, value_parser = parse_positive)]
    pub eps: f64,
    /// Number of halvings.
    #[arg(long, default_value_t = 7, value_parser = clap::value_parser!(u32).range(1..=40))]
    pub steps: u32,
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    let z = match s.split_once(',') {
        Some((re, im)) => Complex64::new(num(re)?, num(im)?),
        None => Complex64::new(num(s)?, 0.0),
    };
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err("must be finite".into());
    }
    Ok(z)
}

fn parse_positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        Ok(x) => Err(format!("must be positive and finite, got {x}")),
        Err(e) => Err(e.to_string()),
    }
}
