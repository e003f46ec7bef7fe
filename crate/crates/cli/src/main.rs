//! `szbounds`: scattering coefficients, transmission bounds and self-checks
//! for one-dimensional potentials.

mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use szbounds::config::{OutputFormat, Spacing};
use szbounds::engine::PhaseVariant;

use error::CliError;

/// Environment variable holding the worker count for sweeps.
pub const WORKERS_ENV: &str = "SZBOUNDS_WORKERS";

#[derive(Parser, Debug)]
#[command(
    name = "szbounds",
    version,
    about = "1D scattering via Shabat-Zakharov systems, with rigorous transmission bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// |alpha|, |beta|, T, R and the conservation residual per energy.
    Compute {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        sweep: SweepArgs,
        /// Auxiliary phase: constant_k or wkb.
        #[arg(long)]
        phase: Option<PhaseVariant>,
    },
    /// Every admissible bound family joined with the numerical T and R.
    Bounds {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        sweep: SweepArgs,
        /// Restrict to these families (comma separated or repeated).
        #[arg(long = "family", value_delimiter = ',')]
        families: Vec<String>,
        /// Relative slack allowed when flagging dominance.
        #[arg(long, default_value_t = 1e-9)]
        slack: f64,
    },
    /// Born, distorted Born and above-barrier estimates of |beta| against the ODE.
    Approx {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Solvable potentials and their closed-form transmission.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Bogolubov coefficients and bounds for a time-dependent frequency.
    Parametric {
        #[command(flatten)]
        profile: ProfileArgs,
        /// Restrict to these cases: 1, 2, 2a, 2b, 2bAsym, 2c.
        #[arg(long = "case", value_delimiter = ',')]
        cases: Vec<String>,
        #[command(flatten)]
        output: OutputArgs,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Catalog equivalence, conservation and bound dominance suites.
    Verify(VerifyArgs),
    /// Per-step state of one integration, or the reconstructed wavefunction.
    Trace {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        energy: f64,
        #[arg(long)]
        phase: Option<PhaseVariant>,
        /// Emit x, psi, psi' and the probability current instead.
        #[arg(long)]
        wavefunction: bool,
        #[command(flatten)]
        output: OutputArgs,
        #[command(flatten)]
        tol: TolArgs,
    },
}

#[derive(Subcommand, Debug)]
enum CatalogAction {
    /// Names, parameters with defaults, and descriptions.
    List {
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact against numerical transmission over an energy grid.
    Eval {
        name: String,
        /// Parameter overrides, `name=value` (comma separated or repeated).
        #[arg(long = "params", alias = "param", value_delimiter = ',', value_parser = parse_param)]
        params: Vec<(String, f64)>,
        /// Width of the default grid above the lowest admissible energy.
        #[arg(long, default_value_t = 4.0)]
        span: f64,
        #[command(flatten)]
        sweep: SweepArgs,
        #[command(flatten)]
        units: UnitsArgs,
    },
}

/// Where the potential comes from. Flags override the config file.
#[derive(Args, Debug, Clone, Default)]
pub struct ProblemArgs {
    /// TOML config file (schema_version = 1).
    #[arg(short, long)]
    pub config: Option<PathBuf>,
    /// Catalog potential by name.
    #[arg(long, conflicts_with = "expr")]
    pub potential: Option<String>,
    /// Catalog parameter overrides, `name=value`.
    #[arg(long = "params", alias = "param", value_delimiter = ',', value_parser = parse_param)]
    pub params: Vec<(String, f64)>,
    /// V(x) as an expression in x.
    #[arg(long)]
    pub expr: Option<String>,
    /// Integration domain `lo,hi`.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub domain: Option<(f64, f64)>,
    #[command(flatten)]
    pub units: UnitsArgs,
}

#[derive(Args, Debug, Clone, Default)]
pub struct UnitsArgs {
    #[arg(long)]
    pub hbar: Option<f64>,
    #[arg(long)]
    pub mass: Option<f64>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct SweepArgs {
    #[arg(long)]
    pub e_min: Option<f64>,
    #[arg(long)]
    pub e_max: Option<f64>,
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long)]
    pub spacing: Option<Spacing>,
    /// Explicit energies; replaces the grid.
    #[arg(long, value_delimiter = ',')]
    pub energies: Option<Vec<f64>>,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub tol: TolArgs,
}

#[derive(Args, Debug, Clone, Default)]
pub struct OutputArgs {
    /// csv or json.
    #[arg(long)]
    pub format: Option<OutputFormat>,
    /// Write to a file instead of stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct TolArgs {
    /// Integrator relative tolerance (absolute tolerance follows it).
    #[arg(long)]
    pub rtol: Option<f64>,
    #[arg(long)]
    pub atol: Option<f64>,
}

/// A frequency profile from a config file or flags.
#[derive(Args, Debug, Clone, Default)]
pub struct ProfileArgs {
    #[arg(short, long)]
    pub config: Option<PathBuf>,
    /// omega(t) as an expression in t.
    #[arg(long)]
    pub omega: Option<String>,
    /// Time window `lo,hi`.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub domain: Option<(f64, f64)>,
    #[command(flatten)]
    pub units: UnitsArgs,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 20240601)]
    pub seed: u64,
    /// Random Gaussian-sum potentials in the dominance suite.
    #[arg(long, default_value_t = 200)]
    pub random_count: usize,
    #[arg(long, default_value_t = 10)]
    pub energies_per_random: usize,
    /// Energies per catalog potential.
    #[arg(long, default_value_t = 50)]
    pub catalog_points: usize,
    #[command(flatten)]
    pub tol: TolArgs,
    #[arg(long, default_value_t = 1e-9)]
    pub slack: f64,
    /// Failing cases printed per check.
    #[arg(long, default_value_t = 20)]
    pub max_failures: usize,
    /// Test fixture: flips the sign of one theta contribution.
    #[arg(long)]
    pub inject_theta_fault: bool,
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=value, got {s:?}"))?;
    let v: f64 = v.trim().parse().map_err(|e| format!("{k}: {e}"))?;
    Ok((k.trim().to_string(), v))
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected lo,hi, got {s:?}"))?;
    let a: f64 = a.trim().parse().map_err(|e| format!("{a}: {e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("{b}: {e}"))?;
    Ok((a, b))
}

fn workers() -> Result<Option<usize>, CliError> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) if !v.trim().is_empty() => {
            v.trim()
                .parse::<usize>()
                .ok()
                .filter(|n| *n >= 1)
                .map(Some)
                .ok_or_else(|| {
                    CliError::input(
                        format!("{WORKERS_ENV} must be a positive integer, got {v:?}"),
                        "environment",
                    )
                })
        }
        _ => Ok(None),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let workers = workers()?;
    match cli.command {
        Command::Compute { problem, sweep, phase } => commands::compute(&problem, &sweep, phase, workers),
        Command::Bounds {
            problem,
            sweep,
            families,
            slack,
        } => commands::bounds(&problem, &sweep, &families, slack, workers),
        Command::Approx { problem, sweep } => commands::approx(&problem, &sweep, workers),
        Command::Catalog { action } => match action {
            CatalogAction::List { output } => commands::catalog_list(&output),
            CatalogAction::Eval {
                name,
                params,
                span,
                sweep,
                units,
            } => commands::catalog_eval(&name, &params, span, &sweep, &units, workers),
        },
        Command::Parametric {
            profile,
            cases,
            output,
            tol,
        } => commands::parametric(&profile, &cases, &output, &tol),
        Command::Verify(args) => commands::verify(&args, workers),
        Command::Trace {
            problem,
            energy,
            phase,
            wavefunction,
            output,
            tol,
        } => commands::trace(&problem, energy, phase, wavefunction, &output, &tol),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.render().to_string();
            let first = rendered.lines().next().unwrap_or("invalid arguments");
            let msg = first.strip_prefix("error: ").unwrap_or(first);
            eprintln!("{}", CliError::input(msg, "arguments").diagnostic());
            return ExitCode::from(3);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        // reader went away, e.g. `| head`
        Err(CliError::Io { source, .. }) if source.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.diagnostic());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn parses_params_and_pairs() {
        assert_eq!(parse_param("V0=1.5").unwrap(), ("V0".into(), 1.5));
        assert!(parse_param("V0").is_err());
        assert_eq!(parse_pair("-10,10").unwrap(), (-10.0, 10.0));
    }
}
