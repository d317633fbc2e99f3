//! Command-line front end for synclattice experiments.
//!
//! Exit codes: 0 success, 1 parse or configuration error, 2 analysis
//! precondition failure, 3 integration failure.

mod commands;
pub mod config;
pub mod svg;
pub mod table;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

pub const EXIT_CONFIG: u8 = 1;
pub const EXIT_PRECONDITION: u8 = 2;
pub const EXIT_INTEGRATION: u8 = 3;
pub const THREADS_ENV: &str = "SYNCLATTICE_THREADS";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }

    /// Integration failures map to 3, every other analysis error to 2.
    pub fn analysis(e: synclattice::Error) -> Self {
        let code = match e.root() {
            synclattice::Error::IntegrationFailure { .. } => EXIT_INTEGRATION,
            _ => EXIT_PRECONDITION,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

#[derive(Debug, Parser)]
#[command(name = "synclattice", version, about = "Synchronization analysis for coupled lattices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Run configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// CSV output path (overrides [output] csv).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// SVG plot path (overrides [output] svg).
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// RNG seed (overrides [experiment] seed).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Suppress progress output.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate one trajectory and record distances to synchrony.
    Simulate(CommonArgs),
    /// Order parameter and stability diagnostics over a coupling grid.
    Sweep(CommonArgs),
    /// Locate the coherence threshold by bisection.
    Threshold(CommonArgs),
    /// Coarsest balanced partition and its invariance.
    Clusters(CommonArgs),
    /// Equivariance defects of permutation generators.
    Symmetry(CommonArgs),
}

impl Command {
    pub fn common(&self) -> &CommonArgs {
        match self {
            Command::Simulate(a)
            | Command::Sweep(a)
            | Command::Threshold(a)
            | Command::Clusters(a)
            | Command::Symmetry(a) => a,
        }
    }
}

/// Outcome of a successful run: lines for standard output.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    pub lines: Vec<String>,
}

fn thread_count(value: Option<String>) -> Result<Option<usize>, CliError> {
    match value {
        None => Ok(None),
        Some(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::config(format!(
                "{THREADS_ENV} must be a positive integer, got `{v}`"
            ))),
        },
    }
}

/// Loads the configuration and applies command-line overrides.
pub fn load_config(args: &CommonArgs) -> Result<config::RunConfig, CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", args.config.display())))?;
    let mut cfg = config::parse_config(&text)
        .map_err(|e| CliError::config(format!("{}: {e}", args.config.display())))?;
    if let Some(seed) = args.seed {
        cfg.experiment.seed = seed;
    }
    Ok(cfg)
}

fn dispatch(command: &Command) -> Result<Report, CliError> {
    let args = command.common();
    let cfg = load_config(args)?;
    let csv = args
        .out
        .clone()
        .or_else(|| cfg.output.csv.as_ref().map(PathBuf::from))
        .ok_or_else(|| CliError::config("no output path: set [output] csv or pass --out"))?;
    let svg = args
        .svg
        .clone()
        .or_else(|| cfg.output.svg.as_ref().map(PathBuf::from));
    let out = commands::Outputs {
        csv: &csv,
        svg: svg.as_deref().map(Path::new),
    };
    let lines = match command {
        Command::Simulate(_) => commands::simulate(&cfg, &out),
        Command::Sweep(_) => commands::sweep_cmd(&cfg, &out),
        Command::Threshold(_) => commands::threshold(&cfg, &out),
        Command::Clusters(_) => commands::clusters(&cfg, &out),
        Command::Symmetry(_) => commands::symmetry(&cfg, &out),
    }?;
    Ok(Report {
        lines: if args.quiet { Vec::new() } else { lines },
    })
}

/// Runs a parsed command, honouring the thread-count environment variable.
pub fn run(cli: &Cli) -> Result<Report, CliError> {
    match thread_count(std::env::var(THREADS_ENV).ok())? {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::config(format!("cannot start thread pool: {e}")))?
            .install(|| dispatch(&cli.command)),
        None => dispatch(&cli.command),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thread_count_parsing() {
        assert_eq!(thread_count(None).unwrap(), None);
        assert_eq!(thread_count(Some("4".into())).unwrap(), Some(4));
        assert_eq!(thread_count(Some("0".into())).unwrap_err().code, EXIT_CONFIG);
        assert!(thread_count(Some("many".into())).is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
