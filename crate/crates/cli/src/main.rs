//! `coulombium`: ground-state solves, charge-ratio scans and property suites.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 non-convergence
//! (or failed checks), 3 subcritical divergence detected.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Format, Method, RunConfig};
use error::CliError;

#[derive(Parser)]
#[command(name = "coulombium", version, about = "1-D Schrödinger–Coulomb ground states with a background charge")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the ground state for one background.
    Solve {
        /// Point-charge ratio.
        #[arg(long)]
        z: Option<f64>,
        /// Sampled background table (`x rho` per line, '#' comments).
        #[arg(long)]
        background: Option<PathBuf>,
        /// Add the background self-energy to the reported energies.
        #[arg(long)]
        include_self_energy: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Solve for each charge ratio in a list.
    Scan {
        /// Comma-separated charge ratios.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        z_list: Option<Vec<f64>>,
        #[command(flatten)]
        common: Common,
    },
    /// Run a randomized property suite.
    Verify {
        /// forms | bnorm | rearrange | counterexample | delta | innerprod | all
        suite: Option<String>,
        /// Charge ratio for the counterexample suite.
        #[arg(long)]
        z: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    /// TOML configuration file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Allow charge ratios below 1.
    #[arg(long)]
    allow_subcritical: bool,
    #[arg(long)]
    half_width: Option<f64>,
    #[arg(long)]
    n_points: Option<usize>,
    #[arg(long, value_enum)]
    method: Option<Method>,
    #[arg(long)]
    scf_damping: Option<f64>,
    #[arg(long)]
    tol_energy: Option<f64>,
    #[arg(long)]
    tol_residual: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    gd_step: Option<f64>,
    #[arg(long)]
    gd_precondition: Option<bool>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    random_start: Option<bool>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl Common {
    fn resolve(self) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::load(self.config.as_deref())?;
        cfg.background.allow_subcritical |= self.allow_subcritical;
        set(&mut cfg.grid.half_width, self.half_width);
        set(&mut cfg.grid.n_points, self.n_points);
        let s = &mut cfg.solver;
        set(&mut s.method, self.method);
        set(&mut s.scf_damping, self.scf_damping);
        set(&mut s.tol_energy, self.tol_energy);
        set(&mut s.tol_residual, self.tol_residual);
        set(&mut s.max_iter, self.max_iter);
        set(&mut s.gd_step, self.gd_step);
        set(&mut s.gd_precondition, self.gd_precondition);
        set(&mut s.seed, self.seed);
        set(&mut s.random_start, self.random_start);
        set(&mut cfg.output.dir, self.out);
        set(&mut cfg.output.format, self.format);
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve {
            z,
            background,
            include_self_energy,
            common,
        } => {
            let mut cfg = common.resolve()?;
            if z.is_some() && background.is_some() {
                return Err(CliError::Usage("--z and --background are mutually exclusive".into()));
            }
            if z.is_some() {
                cfg.background.file = None;
            }
            set(&mut cfg.background.z, z);
            if background.is_some() {
                cfg.background.file = background;
            }
            cfg.background.include_self_energy |= include_self_energy;
            commands::solve(&cfg)
        }
        Command::Scan { z_list, common } => {
            let mut cfg = common.resolve()?;
            set(&mut cfg.scan.z, z_list);
            commands::scan(&cfg)
        }
        Command::Verify { suite, z, common } => {
            let mut cfg = common.resolve()?;
            if suite.is_some() {
                cfg.verify.suite = suite;
            }
            set(&mut cfg.verify.z, z);
            commands::verify(&cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
