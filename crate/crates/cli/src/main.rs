//! `isotoda`: spectral invariants, Toda trajectories, monodromy, forbidden
//! zones, the permutohedral tiling and Betti tables from the command line.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numeric failure (including a
//! drift monitor tripping), 4 I/O.

mod commands;
mod config;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Overrides, RunConfig};

#[derive(Parser, Debug)]
#[command(
    name = "isotoda",
    version,
    about = "Isospectral periodic tridiagonal matrices and the periodic Toda lattice"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Overrides,
}

/// A matrix file `{"a": [..], "b": [[re, im], ..]}` or a random one.
#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct MatrixInput {
    matrix: Option<PathBuf>,
    /// Random matrix of this size, seeded by ISOTODA_SEED.
    #[arg(long)]
    random: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// m, M, n_plus, n_minus of a spectrum file `{"lambda": [..]}`.
    Analyze { spectrum: PathBuf },
    /// The image set of B: JSON summary and point query, or SVG.
    Bset {
        spectrum: PathBuf,
        /// Point to classify, as `re,im`.
        #[arg(long, allow_hyphen_values = true)]
        z: Option<String>,
    },
    /// RK4 trajectory of the periodic Toda flow as CSV; drift report on stderr.
    Toda {
        #[command(flatten)]
        input: MatrixInput,
    },
    /// Monodromy samples and the spectral polynomial.
    Monodromy {
        #[command(flatten)]
        input: MatrixInput,
    },
    /// Forbidden zones of the operator.
    Zones {
        #[command(flatten)]
        input: MatrixInput,
    },
    /// f/h/h'/h'' numbers and the wonderful subdivision summary.
    Tiling {
        n: usize,
        /// Include the full face poset.
        #[arg(long)]
        poset: bool,
    },
    /// Betti numbers for the manifold case and the most degenerate case.
    BettiTable {
        #[arg(long, default_value_t = 6)]
        n_max: usize,
    },
    /// Equivariant Hilbert series coefficients.
    Hilbert { n: usize },
}

fn run(cli: Cli) -> Result<(), output::CliError> {
    let cfg = RunConfig::resolve(&cli.flags)?;
    match cli.command {
        Command::Analyze { spectrum } => commands::analyze(&cfg, &spectrum),
        Command::Bset { spectrum, z } => commands::bset(&cfg, &spectrum, z.as_deref()),
        Command::Toda { input } => {
            commands::toda(&cfg, &commands::load_matrix(input.matrix, input.random)?)
        }
        Command::Monodromy { input } => {
            commands::monodromy(&cfg, &commands::load_matrix(input.matrix, input.random)?)
        }
        Command::Zones { input } => {
            commands::zones(&cfg, &commands::load_matrix(input.matrix, input.random)?)
        }
        Command::Tiling { n, poset } => commands::tiling(&cfg, n, poset),
        Command::BettiTable { n_max } => commands::betti_table(&cfg, n_max),
        Command::Hilbert { n } => commands::hilbert(&cfg, n),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
