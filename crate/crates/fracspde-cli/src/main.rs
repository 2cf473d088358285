//! Command-line harness: parses flags and config files, resolves one
//! experiment, runs it, and emits results plus a manifest.

mod config;
mod runner;

use clap::{Parser, Subcommand};
use config::{Command, Flags};

#[derive(Parser)]
#[command(
    name = "fracspde",
    about = "Simulation and verification experiments for the fractional \
             stochastic heat equation"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Kernel identity checks: mass, positivity, scaling, closed forms.
    VerifyKernel(Flags),
    /// One trajectory of the mild-solution scheme under sampled noise.
    Simulate(Flags),
    /// Picard fixed-point iteration against the scheme under frozen noise.
    PicardDemo(Flags),
    /// Monte Carlo Hoelder exponent estimates in time and space.
    RegularitySweep(Flags),
    /// Monte Carlo moment estimates of the solution field at one time.
    Moments(Flags),
    /// Randomized inequality suites for the analysis toolbox.
    AppendixCheck(Flags),
}

fn main() {
    let cli = Cli::parse();
    if let Ok(v) = std::env::var("FRACSPDE_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n >= 1 => {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .ok();
            }
            _ => {
                eprintln!("error: FRACSPDE_THREADS must be a positive integer, got `{v}`");
                std::process::exit(2);
            }
        }
    }
    let (command, flags) = match &cli.command {
        Sub::VerifyKernel(f) => (Command::VerifyKernel, f),
        Sub::Simulate(f) => (Command::Simulate, f),
        Sub::PicardDemo(f) => (Command::PicardDemo, f),
        Sub::RegularitySweep(f) => (Command::RegularitySweep, f),
        Sub::Moments(f) => (Command::Moments, f),
        Sub::AppendixCheck(f) => (Command::AppendixCheck, f),
    };
    match config::resolve(command, flags).and_then(|cfg| runner::run(&cfg)) {
        Ok(summary) => println!("{summary}"),
        Err(message) => {
            eprintln!("error: {message}");
            std::process::exit(1);
        }
    }
}
