//! `su2dd`: exact diagonalization and dynamical-decoupling experiments for
//! a one dimensional truncated SU(2) lattice gauge model.
//!
//! Subcommands: `check` (operator-algebra and invariance suite),
//! `spectrum` (eigenvalues and degeneracies), `converge` (eigenvalue
//! convergence versus the number of SU(2) grid points), `drive`
//! (stroboscopic driven evolution and Magnus scaling).
//!
//! Exit codes: 0 success, 1 validation error, 2 numerical failure,
//! 3 check-suite failure.

mod checks;
mod commands;
mod config;
mod output;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{BoundaryOpt, ExperimentConfig, FormatOpt, ModeOpt, PerturbationOpt, SchemeOpt};
use output::{emit, render_csv, render_json};

#[derive(Debug)]
pub struct CliError {
    pub message: String,
    pub code: i32,
}

impl CliError {
    pub fn validation(message: String) -> Self {
        Self { message, code: 1 }
    }

    pub fn numerical_msg(message: String) -> Self {
        Self { message, code: 2 }
    }

    pub fn check_failure(message: String) -> Self {
        Self { message, code: 3 }
    }

    /// Classify a core error: bad inputs exit 1, numerical trouble exits 2.
    pub fn from_core(e: su2dd_core::Error) -> Self {
        use su2dd_core::Error::*;
        let code = match e {
            FillingOutOfRange { .. } | LatticeTooSmall(_) | LatticeMismatch { .. }
            | InvalidSite { .. } | InvalidLink { .. } | InvalidAxis(_)
            | IndexOutOfRange { .. } | AnglesOutOfRange { .. } | EmptyGrid
            | MultiIndexOutOfRange { .. } | InvalidPeriod(_) | MissingSite(_)
            | NotNormalized(_) | Invalid(_) => 1,
            NonHermitian { .. } | NonConvergence { .. } | AboveDenseThreshold { .. }
            | DimensionMismatch { .. } | NonUniformWeights | NotFlaggedHermitian => 2,
        };
        Self {
            message: e.to_string(),
            code,
        }
    }

    pub fn from_core_validation(e: su2dd_core::Error) -> Self {
        Self::from_core(e)
    }

    pub fn numerical(e: su2dd_core::Error) -> Self {
        Self::from_core(e)
    }
}

#[derive(Parser)]
#[command(
    name = "su2dd",
    version,
    about = "Truncated SU(2) lattice gauge model with group-averaging dynamical decoupling"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the operator-algebra and gauge-invariance check suite.
    Check(CommonArgs),
    /// Eigenvalues and degeneracies of the (optionally averaged) Hamiltonian.
    Spectrum(CommonArgs),
    /// Eigenvalue convergence versus the number of grid points per axis.
    Converge(CommonArgs),
    /// Stroboscopic driven evolution, gauge violation and Magnus scaling.
    Drive(CommonArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Cube,
    Haar,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    PerVertex,
    Staggered,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundaryArg {
    Open,
    Periodic,
}

#[derive(Clone, Copy, ValueEnum)]
enum PerturbationArg {
    None,
    Charge,
    Tunneling,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct CommonArgs {
    /// JSON experiment configuration; flags below override file keys.
    #[arg(long)]
    config: Option<String>,
    /// Output path (stdout when absent).
    #[arg(long)]
    out: Option<String>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Grid points per axis.
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated list of grid sizes for converge.
    #[arg(long, value_delimiter = ',')]
    n_list: Option<Vec<usize>>,
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, value_enum)]
    boundary: Option<BoundaryArg>,
    /// Number of lattice sites.
    #[arg(long)]
    sites: Option<usize>,
    #[arg(long, value_enum)]
    perturbation: Option<PerturbationArg>,
    #[arg(long)]
    seed: Option<u64>,
}

impl CommonArgs {
    fn resolve(&self) -> Result<ExperimentConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(n) = self.n {
            cfg.grid.n = n;
        }
        if let Some(list) = &self.n_list {
            cfg.grid.n_list = Some(list.clone());
        }
        if let Some(s) = self.scheme {
            cfg.grid.scheme = match s {
                SchemeArg::Cube => SchemeOpt::Cube,
                SchemeArg::Haar => SchemeOpt::Haar,
            };
        }
        if let Some(m) = self.mode {
            cfg.grid.mode = match m {
                ModeArg::PerVertex => ModeOpt::PerVertex,
                ModeArg::Staggered => ModeOpt::Staggered,
            };
        }
        if let Some(b) = self.boundary {
            cfg.lattice.boundary = match b {
                BoundaryArg::Open => BoundaryOpt::Open,
                BoundaryArg::Periodic => BoundaryOpt::Periodic,
            };
        }
        if let Some(s) = self.sites {
            cfg.lattice.n_sites = s;
        }
        if let Some(p) = self.perturbation {
            cfg.run.perturbation = match p {
                PerturbationArg::None => PerturbationOpt::None,
                PerturbationArg::Charge => PerturbationOpt::Charge,
                PerturbationArg::Tunneling => PerturbationOpt::Tunneling,
            };
        }
        if let Some(seed) = self.seed {
            cfg.run.seed = seed;
        }
        if let Some(f) = self.format {
            cfg.run.format = match f {
                FormatArg::Csv => FormatOpt::Csv,
                FormatArg::Json => FormatOpt::Json,
            };
        }
        if let Some(out) = &self.out {
            cfg.run.out = Some(out.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run() -> Result<(), CliError> {
    let cli = Cli::try_parse().unwrap_or_else(|e| {
        if matches!(
            e.kind(),
            ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
        ) {
            print!("{e}");
            std::process::exit(0);
        }
        eprint!("{e}");
        std::process::exit(1);
    });

    match cli.command {
        Command::Check(args) => {
            let cfg = args.resolve()?;
            let results = checks::run_all(&cfg)?;
            let report = checks::render_report(&cfg, &results);
            emit(cfg.run.out.as_deref(), &report)?;
            if results.iter().all(checks::CheckResult::passed) {
                Ok(())
            } else {
                Err(CliError::check_failure(
                    results
                        .iter()
                        .filter(|r| !r.passed())
                        .map(|r| r.name)
                        .collect::<Vec<_>>()
                        .join(", "),
                ))
            }
        }
        Command::Spectrum(args) => {
            let cfg = args.resolve()?;
            let (table, payload) = commands::run_spectrum(&cfg)?;
            let text = match cfg.run.format {
                FormatOpt::Csv => render_csv("spectrum", &cfg, &table),
                FormatOpt::Json => render_json("spectrum", &cfg, &payload)?,
            };
            emit(cfg.run.out.as_deref(), &text)
        }
        Command::Converge(args) => {
            let cfg = args.resolve()?;
            let (table, payload) = commands::run_converge(&cfg)?;
            let text = match cfg.run.format {
                FormatOpt::Csv => render_csv("converge", &cfg, &table),
                FormatOpt::Json => render_json("converge", &cfg, &payload)?,
            };
            emit(cfg.run.out.as_deref(), &text)
        }
        Command::Drive(args) => {
            let cfg = args.resolve()?;
            let (table, payload) = commands::run_drive(&cfg)?;
            let text = match cfg.run.format {
                FormatOpt::Csv => render_csv("drive", &cfg, &table),
                FormatOpt::Json => render_json("drive", &cfg, &payload)?,
            };
            emit(cfg.run.out.as_deref(), &text)
        }
    }
}

fn main() {
    if let Err(e) = run() {
        eprintln!("su2dd: {}", e.message);
        std::process::exit(e.code);
    }
}
