//! Thin command-line front end over the library's experiment harness.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cmc_swipt::baselines::BaselineKind;
use cmc_swipt::sim::{self, ExperimentConfig, RunOptions};

#[derive(Parser)]
#[command(
    name = "cmc-sim",
    version,
    about = "Seeded Monte-Carlo experiments for collaborative-cloud energy allocation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment a TOML config describes.
    Run {
        /// Path to the experiment config.
        config: PathBuf,
        /// Output directory (default: alongside the config).
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Override the configured trial count.
        #[arg(long)]
        trials: Option<usize>,
        /// Override the configured master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the configured scheme list, comma separated
        /// (ps,rsa,rus-rsa,max,multicast,es).
        #[arg(long, value_delimiter = ',')]
        schemes: Option<Vec<String>>,
        /// Disable the harvesting path in both the optimizer and the books.
        #[arg(long)]
        no_swipt: bool,
        /// Dump solver traces of each sweep point's first trial.
        #[arg(long)]
        trace: bool,
        /// Dump realized gain matrices of each sweep point's first trial.
        #[arg(long)]
        dump_channels: bool,
    },
    /// Print the default config as TOML.
    DefaultConfig,
}

fn run(cli: Cli) -> cmc_swipt::Result<()> {
    match cli.command {
        Command::DefaultConfig => {
            print!("{}", ExperimentConfig::default().to_toml_string());
            Ok(())
        }
        Command::Run {
            config,
            out_dir,
            trials,
            seed,
            schemes,
            no_swipt,
            trace,
            dump_channels,
        } => {
            let mut cfg = ExperimentConfig::from_path(&config)?;
            if let Some(t) = trials {
                cfg.trials = t;
            }
            if let Some(s) = seed {
                cfg.master_seed = s;
            }
            if let Some(names) = schemes {
                cfg.schemes = names
                    .iter()
                    .map(|n| n.parse::<BaselineKind>())
                    .collect::<cmc_swipt::Result<Vec<_>>>()?;
            }
            if no_swipt {
                cfg.swipt_enabled = false;
            }
            cfg.validate()?;

            let config_dir = config
                .parent()
                .map(|p| p.to_path_buf())
                .unwrap_or_else(|| PathBuf::from("."));
            let out_dir = out_dir
                .or_else(|| cfg.out_dir.clone().map(|d| config_dir.join(d)))
                .unwrap_or(config_dir);
            let artifacts = sim::run(
                &cfg,
                &RunOptions {
                    out_dir,
                    trace,
                    dump_channels,
                },
            )?;
            println!(
                "wrote {} records to {}",
                artifacts.records,
                artifacts.results_csv.display()
            );
            println!("summary: {}", artifacts.summary_csv.display());
            for p in artifacts.plots.iter().chain(artifacts.extra.iter()) {
                println!("plot/dump: {}", p.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // One machine-readable line on stderr: error: <kind>: <detail>
            eprintln!("error: {}: {e}", error_kind(&e));
            ExitCode::FAILURE
        }
    }
}

fn error_kind(e: &cmc_swipt::Error) -> &'static str {
    use cmc_swipt::Error::*;
    match e {
        InvalidConfig(_) => "invalid-config",
        InfeasibleLink { .. } => "infeasible-link",
        AllCandidatesInfeasible { .. } => "infeasible",
        NonConvergence { .. } => "non-convergence",
        EmptyInput(_) => "empty-input",
        BudgetExceeded { .. } => "budget-exceeded",
        ZeroBaseline(_) => "zero-baseline",
        Parse(_) => "parse",
        Io(_) => "io",
    }
}
