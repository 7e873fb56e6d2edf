//! Benchmark driver: runs the named case, a mesh-refinement study over it,
//! or one of the optimization showcases.
//!
//! Exit codes: 0 success, 1 validation error, 2 numerical blow-up,
//! 3 optimizer failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lbkit::cases::{self, CaseReport};

#[derive(Parser)]
#[command(
    name = "lbkit",
    about = "2D lattice Boltzmann benchmark cases",
    after_help = "Cases: poiseuille2d, advectionDiffusion1d, advectionDiffusion2d, \
                  porousPlate2d, cavity2d, rosenbrock, poiseuilleIdentification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation case once.
    Run {
        /// Case name.
        case: String,
        /// Configuration file overriding the case defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory (also via LBKIT_OUTPUT_DIR).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run a mesh-refinement study of a case.
    Eoc {
        case: String,
        /// Comma-separated list of strictly increasing resolutions.
        #[arg(long)]
        resolutions: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run an optimization case.
    Optimize {
        case: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn print_report(report: &CaseReport) {
    let tag = report.case.as_str();
    for warning in &report.warnings {
        println!("[{tag}] note: {warning}");
    }
    for row in &report.error_table {
        println!(
            "[{tag}] N = {}: rel errors L1 = {:.4e}, L2 = {:.4e}, Linf = {:.4e}",
            row.resolution, row.rel[0], row.rel[1], row.rel[2]
        );
    }
    if let Some(slope) = report.eoc_slope {
        println!("[{tag}] fitted order of convergence: {slope:.4}");
    }
    for (key, value) in &report.values {
        println!("[{tag}] {key} = {value:.8e}");
    }
    println!("[{tag}] output files:");
    for path in &report.manifest {
        println!("[{tag}]   {}", path.display());
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run {
            case,
            config,
            output,
        } => cases::run_case(case, config.as_deref(), output.clone()),
        Command::Eoc {
            case,
            resolutions,
            config,
            output,
        } => {
            let parsed: Result<Vec<usize>, _> = resolutions
                .split(',')
                .map(|token| token.trim().parse::<usize>())
                .collect();
            match parsed {
                Ok(list) => cases::run_eoc(case, &list, config.as_deref(), output.clone()),
                Err(_) => Err(lbkit::Error::Validation(format!(
                    "cannot parse resolution list `{resolutions}`"
                ))),
            }
        }
        Command::Optimize {
            case,
            config,
            output,
        } => cases::run_optimization(case, config.as_deref(), output.clone()),
    };

    match result {
        Ok(report) => {
            print_report(&report);
            ExitCode::SUCCESS
        }
        Err(error) => {
            eprintln!("[lbkit] error: {error}");
            ExitCode::from(cases::exit_code(&error) as u8)
        }
    }
}
