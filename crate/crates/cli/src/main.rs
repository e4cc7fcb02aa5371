mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use crate::commands::Outcome;
use crate::config::{FormatArg, Options, RunConfig};

/// Weyl-algebra normal forms, operator actions, series coefficients and
/// residue checks.
#[derive(Parser, Debug)]
#[command(name = "weylres", version, allow_negative_numbers = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON file with default option values; command-line flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(flatten)]
    opts: Options,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Normal-order an algebra expression, e.g. "d*X".
    Normalize { expr: String },
    /// Reduce an algebra expression modulo the left ideal generated by d.
    Reduce { expr: String },
    /// Apply an algebra expression to --f (default: the generator) at --at.
    Expand { expr: String },
    /// Series coefficients of --f by oracle and/or residue.
    Extract,
    /// Raw and calibrated residue of --g.
    Residue,
    /// Liouville-type hypothesis and conclusion checks for --f.
    Liouville,
    /// Charlier polynomial C_n(x; a) by several independent routes.
    Charlier,
}

fn run(cli: Cli) -> Result<(Outcome, FormatArg)> {
    let opts = match &cli.config {
        Some(path) => cli.opts.merged_over(Options::load_file(path)?),
        None => cli.opts,
    };
    let cfg = RunConfig::build(opts)?;
    let outcome = match &cli.command {
        Command::Normalize { expr } => commands::normalize(&cfg, expr)?,
        Command::Reduce { expr } => commands::reduce(&cfg, expr)?,
        Command::Expand { expr } => commands::expand(&cfg, expr)?,
        Command::Extract => commands::extract(&cfg)?,
        Command::Residue => commands::residue(&cfg)?,
        Command::Liouville => commands::liouville(&cfg)?,
        Command::Charlier => commands::charlier(&cfg)?,
    };
    Ok((outcome, cfg.format))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((outcome, format)) => {
            let text = match format {
                FormatArg::Json => outcome.report.to_json(),
                FormatArg::Text => outcome.report.to_text(),
            };
            print!("{text}");
            if outcome.hypothesis_violated {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
