//! Batch front end for the monopole gauge-field simulator.
//!
//! Every subcommand reads one JSON configuration, applies `--set` overrides,
//! and writes its results under the output directory with the resolved
//! configuration embedded in every file. Exit codes: 0 success, 1
//! configuration or I/O error, 2 numerical non-convergence, 3 a physics
//! domain error (degenerate point, axis singularity, invalid quantum
//! numbers).

use std::ffi::OsString;
use std::path::PathBuf;
use std::sync::Once;

use clap::{Args, Parser, Subcommand};

pub mod config;
pub mod output;
pub mod repro;
pub mod tasks;

use config::RunConfig;
use output::OutputWriter;

/// One failure, tagged with the exit code it maps to.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Unreadable, unparsable, or invalid configuration; I/O failures.
    Config(String),
    /// The computation ran but did not converge to the requested accuracy.
    Numeric(String),
    /// The request is outside the physical domain of the model.
    Physics(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numeric(_) => 2,
            CliError::Physics(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Numeric(m) | CliError::Physics(m) => m,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::Config(format!("i/o error: {e}"))
    }
}

impl From<monopole::fields::FieldsError> for CliError {
    fn from(e: monopole::fields::FieldsError) -> CliError {
        use monopole::fields::FieldsError::*;
        match e {
            InvalidConfig(_) => CliError::Config(e.to_string()),
            DegeneratePoint => CliError::Physics(e.to_string()),
        }
    }
}

impl From<monopole::gauge::GaugeError> for CliError {
    fn from(e: monopole::gauge::GaugeError) -> CliError {
        use monopole::gauge::GaugeError::*;
        match e {
            ImaginaryResidue { .. } => CliError::Numeric(e.to_string()),
            Fields(f) => f.into(),
            OnAxisSingular { .. } | PatchBoundary { .. } | OutsideOverlap { .. } => {
                CliError::Physics(e.to_string())
            }
        }
    }
}

impl From<monopole::angular::AngularError> for CliError {
    fn from(e: monopole::angular::AngularError) -> CliError {
        CliError::Physics(e.to_string())
    }
}

impl From<monopole::spectrum::SpectrumError> for CliError {
    fn from(e: monopole::spectrum::SpectrumError) -> CliError {
        use monopole::spectrum::SpectrumError::*;
        match e {
            DomainError(_) => CliError::Physics(e.to_string()),
            GridTooCoarse { .. } | NonConverged(_) => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<monopole::adiabatic::AdiabaticError> for CliError {
    fn from(e: monopole::adiabatic::AdiabaticError) -> CliError {
        use monopole::adiabatic::AdiabaticError::*;
        match e {
            DomainError(_) | UnsupportedDetuning { .. } | NoThreshold { .. } => {
                CliError::Physics(e.to_string())
            }
        }
    }
}

#[derive(Parser)]
#[command(
    name = "monopole",
    version,
    about = "Simulates the artificial monopole field seen by a trapped three-level atom"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct TaskArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Dot-path override, e.g. --set beam.g=2 or --set tasks.flux.radii=[1e-6,1e-5].
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory; defaults to the one named in the configuration.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReproArgs {
    /// Output directory, default "out".
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Beam envelopes and internal energies on an x-z slice, as CSV.
    Fields(TaskArgs),
    /// Gauge connection, analytic next to finite-difference, per patch.
    GaugeMap(TaskArgs),
    /// Curvature flux through spheres and the charge quantization verdict.
    Flux(TaskArgs),
    /// Transition-function holonomy around circles of constant colatitude.
    Holonomy(TaskArgs),
    /// Monopole harmonics on a grid plus their orthonormality matrix.
    Harmonics(TaskArgs),
    /// Closed-form trap spectrum with the frequency-shift decomposition.
    SpectrumAnalytic(TaskArgs),
    /// Finite-difference trap spectrum per angular-momentum sector.
    SpectrumNumeric(TaskArgs),
    /// Adiabaticity thresholds along rays and a validity map over a region.
    Adiabatic(TaskArgs),
    /// Runs the built-in case studies and grades them against the published claims.
    PaperRepro(ReproArgs),
}

fn init_threads() {
    static ONCE: Once = Once::new();
    ONCE.call_once(|| {
        if let Ok(raw) = std::env::var("MONOPOLE_THREADS") {
            if let Ok(n) = raw.trim().parse::<usize>() {
                if n > 0 {
                    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
                }
            }
        }
    });
}

fn run_task(
    args: &TaskArgs,
    task: impl FnOnce(&RunConfig, &OutputWriter) -> Result<(), CliError>,
) -> Result<(), CliError> {
    let (cfg, resolved) = config::load(&args.config, &args.set)?;
    let dir = args.out.clone().unwrap_or_else(|| cfg.output.directory.clone());
    let writer = OutputWriter::new(dir, resolved)?;
    task(&cfg, &writer)
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Fields(a) => run_task(a, tasks::fields),
        Command::GaugeMap(a) => run_task(a, tasks::gauge_map),
        Command::Flux(a) => run_task(a, tasks::flux),
        Command::Holonomy(a) => run_task(a, tasks::holonomy),
        Command::Harmonics(a) => run_task(a, tasks::harmonics),
        Command::SpectrumAnalytic(a) => run_task(a, tasks::spectrum_analytic),
        Command::SpectrumNumeric(a) => run_task(a, tasks::spectrum_numeric),
        Command::Adiabatic(a) => run_task(a, tasks::adiabatic),
        Command::PaperRepro(a) => {
            let dir = a.out.clone().unwrap_or_else(|| PathBuf::from("out"));
            repro::paper_repro(dir)
        }
    }
}

/// Parses `args`, runs the requested subcommand, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    init_threads();
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}
