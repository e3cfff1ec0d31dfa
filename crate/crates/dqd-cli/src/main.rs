//! `dqd`: exact-diagonalization runs over two coupled quantum dots between
//! metallic leads. Subcommands cover single-point solves, grid sweeps,
//! phase-boundary scans, analytic scale tables, and a concurrence
//! self-check. Exit codes: 0 success, 1 failed self-check, 2 usage or
//! config error, 3 numerical failure.

mod commands;
mod config;
mod fail;
mod table;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use commands::{OracleArgs, ScalesArgs};
use config::{CommonArgs, ConstantArgs, EngineArgs, ModelArgs, PhaseGridArgs, SweepArgs};

#[derive(Parser)]
#[command(
    name = "dqd",
    version,
    about = "Spin entanglement of a double quantum dot between metallic leads"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one parameter point and print a single result row.
    Solve {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        engine: EngineArgs,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Sweep one model axis over a grid, one result row per point.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        engine: EngineArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Locate critical couplings for a list of U/Gamma boundary columns.
    Phase {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        engine: EngineArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        grid: PhaseGridArgs,
        #[command(flatten)]
        constants: ConstantArgs,
    },
    /// Evaluate the analytic screening and exchange scales for (U, Gamma, J).
    Scales {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        args: ScalesArgs,
        #[command(flatten)]
        constants: ConstantArgs,
    },
    /// Compare the closed-form concurrence against the spin-flip
    /// construction on seeded random states.
    OracleCheck {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        args: OracleArgs,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let outcome = match &cli.command {
        Command::Solve {
            common,
            engine,
            model,
        } => commands::cmd_solve(common, engine, model),
        Command::Sweep {
            common,
            engine,
            model,
            sweep,
        } => commands::cmd_sweep(common, engine, model, sweep),
        Command::Phase {
            common,
            engine,
            model,
            grid,
            constants,
        } => commands::cmd_phase(common, engine, model, grid, constants),
        Command::Scales {
            common,
            args,
            constants,
        } => commands::cmd_scales(common, args, constants),
        Command::OracleCheck { common, args } => commands::cmd_oracle_check(common, args),
    };
    if let Err(failure) = outcome {
        eprintln!("dqd: {}", failure.message);
        std::process::exit(failure.code);
    }
}
