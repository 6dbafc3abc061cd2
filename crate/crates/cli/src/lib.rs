//! Command-line front end of `ou-spectra`: model ingestion, analysis
//! pipelines, verification suites and report emission.
//!
//! Exit codes: 0 success, 1 input or validation error, 2 failed numerical
//! hypothesis, 3 failed invariant check.

pub mod commands;
pub mod error;
pub mod grid;
pub mod io;
pub mod model_file;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use ou_spectra::verify::{self, SuiteOptions};

use crate::commands::spectrum::SpectrumArgs;
use crate::commands::verify::Target;
use crate::error::{CliError, CliResult};
use crate::model_file::{load_matrix, load_model, resolve_tolerances, LoadedModel};

#[derive(Debug, Parser)]
#[command(name = "ou-spectra", version, about = "Spectral analysis of finite-dimensional Ornstein-Uhlenbeck operators")]
pub struct Cli {
    /// Override the relative rank threshold used for every rank decision.
    #[arg(long, global = true, value_name = "TOL")]
    pub rank_tol: Option<f64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Gramians, invariant measure, strong Feller and invertibility flags,
    /// and the contractivity curve of the restricted semigroup.
    Analyze {
        /// Model file (JSON with keys "A", "Q", optional "name", "tolerances").
        model: PathBuf,
        /// Time grid start:stop:step, endpoints inclusive.
        #[arg(long, default_value = "0.1:5:0.1")]
        t_grid: String,
        /// Report path; the curve goes to a `.contractivity.csv` sidecar.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Galerkin spectrum of the generator against the predicted lattice.
    Spectrum {
        model: PathBuf,
        /// Polynomial degree of the Galerkin space.
        #[arg(long, default_value_t = 4)]
        degree: usize,
        /// Keep points with real part at least this (negative) value.
        #[arg(long, allow_negative_numbers = true)]
        re_min: Option<f64>,
        /// Keep points with imaginary part at most this in modulus.
        #[arg(long)]
        im_max: Option<f64>,
        /// Matching tolerance between computed and predicted points.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant suites on a model file or on seeded random models.
    Verify {
        #[arg(required_unless_present = "random", conflicts_with = "random")]
        model: Option<PathBuf>,
        /// Seed and number of random stable models.
        #[arg(long, num_args = 2, value_names = ["SEED", "COUNT"])]
        random: Option<Vec<u64>>,
        /// Dimension of the random models.
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 3)]
        degree: usize,
        /// Highest Fock level in the second-quantization checks.
        #[arg(long, default_value_t = 3)]
        levels: usize,
        /// Tolerance of the Galerkin-vs-lattice check.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Adds this constant to Q_inf before the Gramian checks.
        #[arg(long, hide = true, allow_negative_numbers = true)]
        corrupt_qinf: Option<f64>,
    },
    /// Spectra of the truncated symmetric and full Fock second quantizations.
    Fock {
        /// Matrix file: {"T": [[..]]} or a bare nested array.
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, default_value_t = 3)]
        levels: usize,
        /// Accept operators with norm above 1.
        #[arg(long)]
        allow_noncontraction: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn with_rank_tol(mut m: LoadedModel, rank_tol: Option<f64>) -> CliResult<LoadedModel> {
    if let Some(r) = rank_tol {
        if !(r.is_finite() && r >= 0.0) {
            return Err(CliError::Input(format!("--rank-tol must be finite and nonnegative, got {r}")));
        }
        m.tol.rank_tol = r;
    }
    Ok(m)
}

fn dispatch(cli: Cli) -> CliResult<()> {
    let rank_tol = cli.rank_tol;
    match cli.command {
        Command::Analyze { model, t_grid, out } => {
            let grid = grid::parse_t_grid(&t_grid)?;
            let m = with_rank_tol(load_model(&model)?, rank_tol)?;
            commands::analyze::run(&m, &grid, out)
        }
        Command::Spectrum { model, degree, re_min, im_max, tol, out } => {
            let m = with_rank_tol(load_model(&model)?, rank_tol)?;
            commands::spectrum::run(&m, &SpectrumArgs { degree, re_min, im_max, tol }, out)
        }
        Command::Verify { model, random, dim, degree, levels, tol, out, corrupt_qinf } => {
            if !(tol > 0.0) {
                return Err(CliError::Input(format!("--tol must be positive, got {tol}")));
            }
            let mut opts = SuiteOptions { degree, levels, corrupt_q_inf: corrupt_qinf, lattice_tol: tol, ..SuiteOptions::default() };
            let targets = match (model, random) {
                (Some(path), _) => {
                    let m = with_rank_tol(load_model(&path)?, rank_tol)?;
                    vec![Target { label: m.name.clone(), model: m.model, tol: m.tol }]
                }
                (None, Some(r)) => {
                    let (seed, count) = (r[0], r[1] as usize);
                    if dim == 0 {
                        return Err(CliError::Input("--dim must be at least 1".into()));
                    }
                    opts.seed = seed;
                    let mut tol = resolve_tolerances(None)?;
                    if let Some(r) = rank_tol {
                        tol.rank_tol = r;
                    }
                    verify::random_models(seed, count, dim, &tol)?
                        .into_iter()
                        .map(|(label, model)| Target { label, model, tol })
                        .collect()
                }
                (None, None) => return Err(CliError::Input("give a model file or --random SEED COUNT".into())),
            };
            commands::verify::run(&targets, &opts, out)
        }
        Command::Fock { matrix, levels, allow_noncontraction, out } => {
            let t = load_matrix(&matrix)?;
            let mut tol = resolve_tolerances(None)?;
            if let Some(r) = rank_tol {
                tol.rank_tol = r;
            }
            commands::fock::run(&t, levels, allow_noncontraction, &tol, out)
        }
    }
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
