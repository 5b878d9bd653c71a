//! `e91-squash`: rate curves, key lengths, squash checks and protocol
//! simulation from the command line.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::Format;

#[derive(Parser)]
#[command(
    name = "e91-squash",
    version,
    about = "Device-independent E91 analysis toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
pub struct Common {
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// TOML file with the same keys as the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Clone, Default)]
pub struct ParamArgs {
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub s0: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub eps_cor: Option<f64>,
    #[arg(long)]
    pub f_ec: Option<f64>,
    /// Syndrome budget; defaults to ⌈f_ec·n·h(p_est)⌉.
    #[arg(long)]
    pub l_syn: Option<u64>,
    /// QBER estimate for the syndrome; 0.02 for the default budget, and
    /// inferred from the CHSH value in simulations.
    #[arg(long)]
    pub p_est: Option<f64>,
}

#[derive(Args, Clone, Default)]
pub struct EveArgs {
    /// `depolarizing` or `misalignment`.
    #[arg(long)]
    pub strategy: Option<String>,
    /// Depolarization, giving QBER p for the calibrated source.
    #[arg(long)]
    pub p: Option<f64>,
    /// Alice's x-detector phase angle in radians.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha_angle: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta_angle: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Asymptotic key rate against QBER.
    RateCurve {
        #[arg(long)]
        p_min: Option<f64>,
        #[arg(long)]
        p_max: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        f_ec: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Finite-size secret key length.
    Keylength {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Check the bipartite squash channel on a grid of detector phases.
    VerifySquash {
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Single-party squash feasibility around the unit circle.
    Nogo {
        #[arg(long)]
        grid: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// |μ|, |ν|, φ and the flip amplitude on a phase grid.
    ChshSpectrum {
        #[arg(long)]
        grid: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo runs of the full protocol.
    Simulate {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        eve: EveArgs,
        #[arg(long)]
        runs: Option<usize>,
        /// Overrides the finite-size key length.
        #[arg(long)]
        key_length: Option<u64>,
        /// Directory for one transcript JSON per run.
        #[arg(long)]
        transcripts: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Monte Carlo tails against the abort and Azuma bounds.
    BoundsCheck {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        eve: EveArgs,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        delta_s: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
}

/// Why a command did not succeed.
pub enum Failure {
    /// Exit 1.
    Verification(String),
    /// Exit 2.
    Config(String),
}

/// Wraps anything printable as a configuration failure.
pub fn config_err<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Config(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::RateCurve {
            p_min,
            p_max,
            steps,
            f_ec,
            common,
        } => commands::rate_curve(p_min, p_max, steps, f_ec, &common),
        Command::Keylength { params, common } => commands::keylength(&params, &common),
        Command::VerifySquash { grid, tol, common } => commands::verify_squash(grid, tol, &common),
        Command::Nogo { grid, common } => commands::nogo(grid, &common),
        Command::ChshSpectrum { grid, common } => commands::chsh_spectrum(grid, &common),
        Command::Simulate {
            params,
            eve,
            runs,
            key_length,
            transcripts,
            common,
        } => commands::simulate(
            &params,
            &eve,
            runs,
            key_length,
            transcripts.as_deref(),
            &common,
        ),
        Command::BoundsCheck {
            params,
            eve,
            runs,
            delta_s,
            common,
        } => commands::bounds_check(&params, &eve, runs, delta_s, &common),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
