use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pl_lab_cli::{
    cmd_certify, cmd_counterexample, cmd_figure, cmd_prox, parse_bounds, Outcome, EXIT_USAGE,
};

/// Lojasiewicz-type inequalities for powered distance functions.
#[derive(Parser)]
#[command(name = "pl-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample-based check of PL, p-Lojasiewicz, conditioning, submetric or
    /// sandwich inequalities. Exit 0 holds, 2 violated, 3 inconclusive.
    Certify {
        #[arg(long)]
        config: PathBuf,
    },
    /// Proximal point trace with its finite-length certificate.
    Prox {
        #[arg(long)]
        config: PathBuf,
        /// Write the trace as CSV here.
        #[arg(long)]
        trace_out: Option<PathBuf>,
    },
    /// Grid values of (mu/p) d^p as CSV.
    Figure {
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        p: f64,
        /// LO,HI for both axes.
        #[arg(long, allow_hyphen_values = true)]
        bounds: String,
        #[arg(long)]
        res: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// PL under limiting vs Clarke subgradients at the center of the circle.
    Counterexample,
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    match cli.command {
        Command::Certify { config } => cmd_certify(&config),
        Command::Prox { config, trace_out } => cmd_prox(&config, trace_out.as_deref()),
        Command::Figure {
            set,
            mu,
            p,
            bounds,
            res,
            out,
        } => cmd_figure(&set, mu, p, parse_bounds(&bounds)?, res, &out),
        Command::Counterexample => cmd_counterexample(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    match run(cli) {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            ExitCode::from(outcome.code as u8)
        }
        Err(e) => {
            eprintln!("pl-lab: {e:#}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
