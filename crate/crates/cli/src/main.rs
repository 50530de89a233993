//! Command-line front end: synthesize wake snapshots, run plane-wise modal
//! decomposition, reconstruct fields, derive kinematic quantities, run
//! coupled model problems and morph meshes.
//!
//! Every subcommand reads an optional JSON config (`--config`); the listed
//! flags mirror config keys and take precedence. Exit codes: 0 success,
//! 2 configuration/validation error, 3 numerical non-convergence,
//! 4 I/O error.

mod commands;
mod error;
mod pgm;
mod util;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::derive::{DeriveOverrides, DerivedQuantity};
use commands::fsi::FsiOverrides;
use commands::morph::MorphOverrides;
use commands::pod::PodOverrides;
use commands::reconstruct::ReconstructOverrides;
use commands::synth::SynthOverrides;
use error::CliError;

#[derive(Parser)]
#[command(name = "wakekit", version, about = "Wake snapshot analysis toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON parameter file; flags override its keys
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long)]
    out: PathBuf,
    /// Overwrite a non-empty output directory
    #[arg(long)]
    force: bool,
    /// Worker threads for independent analyses
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic wake snapshot set
    Synth {
        #[command(flatten)]
        common: Common,
        /// Seed of the phase jitter
        #[arg(long)]
        seed: Option<u64>,
        /// Number of snapshots
        #[arg(long)]
        snapshots: Option<usize>,
        /// Time spacing between snapshots [s]
        #[arg(long)]
        dt: Option<f64>,
    },
    /// Plane-wise modal decomposition of a snapshot set
    Pod {
        #[command(flatten)]
        common: Common,
        /// Input snapshot-set directory
        #[arg(long)]
        input: Option<PathBuf>,
        /// Field to analyse (default: first field of the set)
        #[arg(long)]
        field: Option<String>,
        /// Component index to analyse
        #[arg(long, conflicts_with = "all_components")]
        component: Option<usize>,
        /// Flatten all components instead of selecting one
        #[arg(long)]
        all_components: bool,
        /// Subtract the temporal mean before decomposing
        #[arg(long)]
        mean: bool,
        /// Mode counts for the retained/loss summary, e.g. 1,2,3
        #[arg(long, value_delimiter = ',')]
        modes: Option<Vec<usize>>,
    },
    /// Rebuild snapshots from a stored mode set
    Reconstruct {
        #[command(flatten)]
        common: Common,
        /// Mode-set directory (the modes/ folder of a pod output)
        #[arg(long)]
        input: Option<PathBuf>,
        /// Number of modes to keep (default: full rank)
        #[arg(long)]
        modes: Option<usize>,
    },
    /// Compute gradient, strain-rate or Q-criterion fields
    Derive {
        #[command(flatten)]
        common: Common,
        /// Input snapshot-set directory
        #[arg(long)]
        input: Option<PathBuf>,
        /// Field to differentiate (default: first field of the set)
        #[arg(long)]
        field: Option<String>,
        /// Quantities to derive: gradient, strain, q (comma separated)
        #[arg(long, value_delimiter = ',')]
        what: Option<Vec<String>>,
    },
    /// Run a coupled fluid-structure model problem
    Fsi {
        #[command(flatten)]
        common: Common,
        /// End time of the run [s]
        #[arg(long)]
        t_end: Option<f64>,
        /// Time step [s]
        #[arg(long)]
        dt: Option<f64>,
    },
    /// Morph a node grid from control-point displacements
    Morph {
        #[command(flatten)]
        common: Common,
        /// Control-point CSV (x, y[, z], dx, dy[, dz])
        #[arg(long)]
        points: Option<PathBuf>,
    },
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Synth {
            common,
            seed,
            snapshots,
            dt,
        } => commands::synth::run(
            common.config.as_deref(),
            &common.out,
            common.force,
            &SynthOverrides {
                seed,
                snapshots,
                dt,
            },
        ),
        Command::Pod {
            common,
            input,
            field,
            component,
            all_components,
            mean,
            modes,
        } => commands::pod::run(
            common.config.as_deref(),
            &common.out,
            common.force,
            common.threads.max(1),
            &PodOverrides {
                input,
                field,
                component,
                all_components,
                mean,
                modes,
            },
        ),
        Command::Reconstruct {
            common,
            input,
            modes,
        } => commands::reconstruct::run(
            common.config.as_deref(),
            &common.out,
            common.force,
            &ReconstructOverrides { input, modes },
        ),
        Command::Derive {
            common,
            input,
            field,
            what,
        } => {
            let what = what
                .map(|list| {
                    list.iter()
                        .map(|s| DerivedQuantity::parse(s))
                        .collect::<Result<Vec<_>, _>>()
                })
                .transpose()?;
            commands::derive::run(
                common.config.as_deref(),
                &common.out,
                common.force,
                &DeriveOverrides { input, field, what },
            )
        }
        Command::Fsi { common, t_end, dt } => commands::fsi::run(
            common.config.as_deref(),
            &common.out,
            common.force,
            &FsiOverrides { t_end, dt },
        ),
        Command::Morph { common, points } => commands::morph::run(
            common.config.as_deref(),
            &common.out,
            common.force,
            &MorphOverrides { points },
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
