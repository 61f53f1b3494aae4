mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "loglift", version, about = "Lift parabolic Lie algebra actions to p-adic group actions")]
pub struct Cli {
    /// Precision cap used when a file does not set one.
    #[arg(long, global = true, env = "LOGLIFT_CAP", default_value_t = loglift::field::DEFAULT_CAP)]
    pub default_cap: i64,
    /// Overrides the cap stored in every input file.
    #[arg(long, global = true)]
    pub cap: Option<i64>,
    /// Seed for every randomized check.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the lifted action on a parabolic group element.
    Lift {
        #[arg(long)]
        module: PathBuf,
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        element: PathBuf,
    },
    /// Truncated induced module: dimension, basis and optionally weights.
    Verma {
        #[arg(long)]
        module: PathBuf,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// Print weight multiplicities.
        #[arg(long)]
        weights: bool,
        /// Print the basis monomials.
        #[arg(long)]
        basis: bool,
    },
    /// Generalized weight decomposition of a module.
    Weights {
        #[arg(long)]
        module: PathBuf,
        /// Print the projectors as well.
        #[arg(long)]
        projectors: bool,
    },
    /// Run every invariant suite; exits nonzero if any fails.
    Check {
        #[arg(long)]
        module: PathBuf,
        /// Needed for the suites that use the lift.
        #[arg(long)]
        log: Option<PathBuf>,
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
    /// Compatibility of the lifted action with the Lie action on sampled deltas.
    CheckDgh {
        #[arg(long)]
        module: PathBuf,
        #[arg(long)]
        log: PathBuf,
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
    /// Built-in two- and three-dimensional examples.
    Example(ExampleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExampleName {
    Breuil,
    Schraen,
}

#[derive(Debug, Args)]
pub struct ExampleArgs {
    pub name: ExampleName,
    /// Branch value, a field literal such as "2 + O(5^10)".
    #[arg(long = "L", default_value = "1")]
    pub l: String,
    /// Second branch value (schraen only).
    #[arg(long = "Lp", default_value = "0")]
    pub lp: String,
    /// Weight parameter of the twist (breuil only).
    #[arg(long, default_value_t = 2)]
    pub k: i64,
    #[arg(long, default_value_t = 5)]
    pub p: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
