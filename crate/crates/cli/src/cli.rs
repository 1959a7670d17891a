use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};

use crate::commands::{self, Outcome};

pub const EXIT_OK: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
/// Epistemic outcomes: an inconclusive verdict or nothing found within the search budget.
pub const EXIT_INCONCLUSIVE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "stochdom", version, about = "Exact stochastic dominance between random walks on cone-ordered spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct Common {
    /// `halfline`, `orthant`, or a cone file.
    #[arg(long, default_value = "halfline")]
    pub cone: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sampled dual directions beyond the cone's normals and their midpoints.
    #[arg(long, default_value_t = 64)]
    pub samples: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub margin_tol: f64,
    /// Grid points in the angular sweep of each direction.
    #[arg(long, default_value_t = 257)]
    pub grid_points: usize,
    /// Largest number of atoms any convolution may produce.
    #[arg(long, default_value_t = stochdom_core::measure::DEFAULT_ATOM_CAP)]
    pub cap: usize,
    /// Rescale input measures to unit mass.
    #[arg(long)]
    pub normalize: bool,
    /// Write the JSON report here (`-` for standard output instead of the summary).
    #[arg(long, value_name = "OUT")]
    pub json: Option<PathBuf>,
    /// Write the command's CSV table here.
    #[arg(long, value_name = "OUT")]
    pub csv: Option<PathBuf>,
    /// Write a gnuplot script for the CSV table here; needs --csv.
    #[arg(long, value_name = "OUT")]
    pub plot: Option<PathBuf>,
    /// Worker threads; defaults to one per core.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide X ≤ Y exactly and print a coupling or a violating upset.
    OrderCheck {
        x: PathBuf,
        y: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Compare the normalized cumulant curves of X and Y along dual directions.
    Spectrum {
        x: PathBuf,
        y: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Spectral verdict, backed by a minimal-n search when dominance is predicted.
    Dominate {
        x: PathBuf,
        y: PathBuf,
        #[arg(long, default_value_t = stochdom_core::dominance::DEFAULT_N_MAX)]
        n_max: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Smallest n0 with X^{*n} ≤ Y^{*n} for every n in [n0, n_max].
    MinN {
        x: PathBuf,
        y: PathBuf,
        #[arg(long, default_value_t = stochdom_core::dominance::DEFAULT_N_MAX)]
        n_max: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Search a catalyst Z on {0, step, ..., max} with X + Z ≤ Y + Z (one dimension).
    Catalyst {
        x: PathBuf,
        y: PathBuf,
        /// Defaults to the lattice step of the joint support.
        #[arg(long)]
        grid_step: Option<String>,
        /// Defaults to the width of the joint support.
        #[arg(long)]
        grid_max: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Rate function of the sample mean at the threshold c.
    RateFn {
        mu: PathBuf,
        /// Threshold point, comma-separated coordinates.
        #[arg(long)]
        c: String,
        #[command(flatten)]
        common: Common,
    },
    /// Relative decay rate: exact (n, eps) table and its limit from the cumulants.
    RelRate {
        x: PathBuf,
        y: PathBuf,
        /// Comma-separated list of n.
        #[arg(long, default_value = "8,16,32,64")]
        n: String,
        /// Comma-separated list of eps.
        #[arg(long, default_value = "1/64")]
        eps: String,
        /// Also write the curve (r, g(r)) along the maximizing direction here.
        #[arg(long, value_name = "OUT")]
        curve: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Empirical tail exponent (1/n) log P(S_n ≥ n c) against the rate function.
    Cramer {
        mu: PathBuf,
        #[arg(long)]
        c: String,
        /// Comma-separated list of n.
        #[arg(long, default_value = "64,256,1024")]
        n: String,
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::OrderCheck { common, .. }
            | Command::Spectrum { common, .. }
            | Command::Dominate { common, .. }
            | Command::MinN { common, .. }
            | Command::Catalyst { common, .. }
            | Command::RateFn { common, .. }
            | Command::RelRate { common, .. }
            | Command::Cramer { common, .. } => common,
        }
    }
}

fn dispatch(command: &Command) -> Result<Outcome> {
    match command {
        Command::OrderCheck { x, y, common } => commands::order_check(x, y, common),
        Command::Spectrum { x, y, common } => commands::spectrum(x, y, common),
        Command::Dominate { x, y, n_max, common } => commands::dominate(x, y, *n_max, common),
        Command::MinN { x, y, n_max, common } => commands::min_n(x, y, *n_max, common),
        Command::Catalyst { x, y, grid_step, grid_max, common } => {
            commands::catalyst(x, y, grid_step.as_deref(), grid_max.as_deref(), common)
        }
        Command::RateFn { mu, c, common } => commands::rate_fn(mu, c, common),
        Command::RelRate { x, y, n, eps, curve, common } => commands::rel_rate(x, y, n, eps, curve.as_deref(), common),
        Command::Cramer { mu, c, n, common } => commands::cramer(mu, c, n, common),
    }
}

fn execute(cli: &Cli) -> Result<u8> {
    let common = cli.command.common();
    if common.plot.is_some() && common.csv.is_none() {
        bail!("--plot needs --csv");
    }
    let outcome = match common.jobs {
        Some(0) => bail!("--jobs must be at least 1"),
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build()?.install(|| dispatch(&cli.command))?,
        None => dispatch(&cli.command)?,
    };
    outcome.emit(common)?;
    Ok(outcome.exit)
}

/// Runs one invocation and returns its exit code; errors go to standard error.
pub fn run(cli: Cli) -> u8 {
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_ERROR
        }
    }
}
