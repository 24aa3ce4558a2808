use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use smol_cli::{
    cmd_compare, cmd_export_centroids, cmd_run, cmd_sweep, cmd_trace, load_config, parse_seeds, resolve, RunRequest,
    SweepRequest, OUTPUT_ROOT_ENV,
};
use smol_core::config::parse_assignment;

#[derive(Parser)]
#[command(name = "smol", version, about = "MAP-Elites with scheduled actuator strength")]
struct Cli {
    /// Directory that relative output paths are resolved against.
    #[arg(long, global = true, env = OUTPUT_ROOT_ENV)]
    output_root: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one config key (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE", value_parser = parse_assignment)]
    set: Vec<(String, String)>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment.
    Run {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (overrides `output_dir`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overwrite an existing run.
        #[arg(long)]
        force: bool,
    },
    /// Compare final metric values across labelled runs.
    Compare {
        #[arg(long, default_value = "coverage")]
        metric: String,
        /// Label per run directory, in order. Defaults to the directory name
        /// without its `_seed<N>` suffix.
        #[arg(long = "label")]
        labels: Vec<String>,
        /// Where to write the table (default `comparison_<metric>.csv`).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(required = true)]
        run_dirs: Vec<PathBuf>,
    },
    /// Run every schedule × seed pair, then compare the schedules.
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
        /// Comma-separated schedule names.
        #[arg(long, value_delimiter = ',', default_value = "smol,constant")]
        schedules: Vec<String>,
        /// Seeds, e.g. `1..7` or `1,2,3`.
        #[arg(long, default_value = "1..7")]
        seeds: String,
        #[arg(long, default_value = "sweep")]
        out: PathBuf,
        #[arg(long, default_value = "coverage")]
        metric: String,
        #[arg(long)]
        force: bool,
    },
    /// Write the CVT centroids a config would use.
    ExportCentroids {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value = "centroids.csv")]
        out: PathBuf,
    },
    /// Replay a crawler elite and dump its trajectory.
    Trace {
        run_dir: PathBuf,
        #[arg(long)]
        cell: usize,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value = "trajectory.csv")]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let root = cli.output_root.as_deref();
    match cli.command {
        Command::Run { config, seed, out, force } => {
            let dir = cmd_run(&RunRequest {
                config: config.config,
                overrides: config.set,
                seed,
                out,
                output_root: root.map(Into::into),
                force,
            })?;
            println!("wrote {}", dir.display());
        }
        Command::Compare { metric, labels, out, run_dirs } => {
            let out = resolve(root, &out.unwrap_or_else(|| format!("comparison_{metric}.csv").into()));
            let table = cmd_compare(&metric, &run_dirs, &labels, &out)?;
            print!("{}", table.to_csv());
            eprintln!("wrote {}", out.display());
        }
        Command::Sweep { config, schedules, seeds, out, metric, force } => {
            let result = cmd_sweep(&SweepRequest {
                config: config.config,
                overrides: config.set,
                schedules,
                seeds: parse_seeds(&seeds)?,
                out: resolve(root, &out),
                metric,
                force,
            })?;
            eprintln!("{} runs under {}", result.run_dirs.len(), resolve(root, &out).display());
            match result.comparison {
                Some(table) => {
                    print!("{}", table.to_csv());
                    eprintln!("wrote {}", result.comparison_path.display());
                }
                None => eprintln!("comparison skipped: needs at least 2 schedules and 2 seeds"),
            }
        }
        Command::ExportCentroids { config, out } => {
            let c = load_config(config.config.as_deref(), &config.set)?;
            let out = resolve(root, &out);
            cmd_export_centroids(&c, &out)?;
            println!("wrote {}", out.display());
        }
        Command::Trace { run_dir, cell, alpha, out } => {
            let out = resolve(root, &out);
            let (fitness, duty) = cmd_trace(&run_dir, cell, alpha, &out)?;
            println!("fitness {fitness} duty {} {}; wrote {}", duty[0], duty[1], out.display());
        }
    }
    Ok(())
}
