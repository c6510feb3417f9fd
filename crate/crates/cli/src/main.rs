//! `ricci`: batch front end for the flow and soliton laboratory.
//!
//! Exit codes: 0 success, 1 numerical failure, 2 extinction, 3 I/O,
//! 4 no Einstein closure, 5 invalid configuration.

mod cmd;
mod config;
mod exit;
mod json;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::exit::Exit;

#[derive(Debug, Parser)]
#[command(
    name = "ricci",
    version,
    about = "Rotationally symmetric Ricci flow and soliton shooting"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run normalized or unnormalized Ricci flow and write diagnostics.
    Flow(cmd::flow::FlowArgs),
    /// Shoot the reduced soliton ODE over a range of `a`.
    SolitonSweep(cmd::sweep::SweepArgs),
    /// Find the `a` whose shot closes smoothly.
    Solve(cmd::solve::SolveArgs),
    /// Check the energy identity and its convergence order.
    IdentityCheck(cmd::identity::IdentityArgs),
    /// Run the invariant suite and report every check.
    Verify(cmd::verify::VerifyArgs),
    /// Curvature and closure diagnostics of a profile file.
    Diagnose(cmd::diagnose::DiagnoseArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                Exit::Config
            } else {
                Exit::Ok
            }
            .into();
        }
    };
    let result = match cli.command {
        Command::Flow(a) => cmd::flow::run(a),
        Command::SolitonSweep(a) => cmd::sweep::run(a),
        Command::Solve(a) => cmd::solve::run(a),
        Command::IdentityCheck(a) => cmd::identity::run(a),
        Command::Verify(a) => cmd::verify::run(a),
        Command::Diagnose(a) => cmd::diagnose::run(a),
    };
    match result {
        Ok(code) => code.into(),
        Err(f) => {
            eprintln!("ricci: {f}");
            f.exit.into()
        }
    }
}
