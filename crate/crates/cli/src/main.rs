use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;

use config::SimConfig;

/// Pseudo-spectral Chern-Simons-Schrodinger solver on a periodic box.
#[derive(Parser)]
#[command(name = "css2d", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the system (or run the Picard iteration) per the config
    /// and write metrics.csv plus field snapshots.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the property suite (transforms, partition identities, gauge
    /// constraints, short conservation run); nonzero exit on failure.
    CheckInvariants {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// dt- and grid-refinement ladder reporting measured orders.
    Convergence {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 3)]
        levels: usize,
    },
}

const EXIT_OK: u8 = 0;
const EXIT_GENERIC: u8 = 1;
const EXIT_INVARIANT: u8 = 2;
const EXIT_BLOWUP: u8 = 3;
const EXIT_CONFIG: u8 = 4;

/// Fallback configuration for `check-invariants` without `--config`.
const DEFAULT_CHECK_CONFIG: &str = r#"
[grid]
n = 64
length = 6.283185307179586

[physics]
kappa = 1.0
s = 1.0

[stepper]
dt = 1e-3
t_end = 0.05

[data]
kind = "random_hs"
amplitude = 0.5
seed = 2718
"#;

fn load_config(path: &PathBuf) -> Result<SimConfig, u8> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        EXIT_CONFIG
    })?;
    SimConfig::parse(&text).map_err(|e| {
        eprintln!("error: invalid config {}: {e}", path.display());
        EXIT_CONFIG
    })
}

fn exit_code_for(err: &css2d_core::Error) -> u8 {
    match err {
        css2d_core::Error::Blowup { .. } => EXIT_BLOWUP,
        css2d_core::Error::InvalidConfig(_)
        | css2d_core::Error::InvalidGrid(_)
        | css2d_core::Error::IncommensurateWavevector(..) => EXIT_CONFIG,
        _ => EXIT_GENERIC,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { config } => match load_config(&config) {
            Err(c) => c,
            Ok(cfg) => match commands::run(&cfg) {
                Ok(()) => EXIT_OK,
                Err(e) => {
                    eprintln!("error: {e}");
                    exit_code_for(&e)
                }
            },
        },
        Command::CheckInvariants { config } => {
            let cfg = match config {
                Some(path) => match load_config(&path) {
                    Err(c) => return ExitCode::from(c),
                    Ok(cfg) => cfg,
                },
                None => SimConfig::parse(DEFAULT_CHECK_CONFIG).expect("builtin config parses"),
            };
            println!("invariant suite:");
            match commands::check_invariants(&cfg) {
                Ok(0) => {
                    println!("all invariants hold");
                    EXIT_OK
                }
                Ok(failures) => {
                    eprintln!("{failures} invariant(s) failed");
                    EXIT_INVARIANT
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    exit_code_for(&e)
                }
            }
        }
        Command::Convergence { config, levels } => match load_config(&config) {
            Err(c) => c,
            Ok(cfg) => match commands::convergence(&cfg, levels) {
                Ok(()) => EXIT_OK,
                Err(e) => {
                    eprintln!("error: {e}");
                    exit_code_for(&e)
                }
            },
        },
    };
    ExitCode::from(code)
}
