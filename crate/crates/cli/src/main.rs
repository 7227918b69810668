use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use pilotsim::experiments::ExperimentName;
use pilotsim_cli::{run, RunOptions};

/// Uplink multi-cell massive MIMO experiments: DOP versus FPR pilots.
#[derive(Parser, Debug)]
#[command(name = "pilotsim", version, about)]
struct Args {
    /// sinr_vs_n, cdf_compare, capacity_theta or capacity_kappa
    #[arg(long)]
    experiment: Option<String>,

    /// Experiment file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,

    /// Master seed for every random stream
    #[arg(long)]
    seed: Option<u64>,

    /// Monte-Carlo trials per grid point
    #[arg(long)]
    trials: Option<usize>,

    /// Output directory for .dat tables and manifest.txt
    #[arg(long, default_value = "out")]
    out: PathBuf,

    /// Directory for cached ensemble moments
    #[arg(long)]
    moments_cache: Option<PathBuf>,

    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let experiment = match args.experiment.as_deref().map(str::parse::<ExperimentName>).transpose() {
        Ok(e) => e,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let opts = RunOptions {
        experiment,
        config: args.config,
        seed: args.seed,
        trials: args.trials,
        out: args.out,
        moments_cache: args.moments_cache,
        threads: args.threads,
    };
    match run(&opts) {
        Ok(m) => {
            for o in &m.outputs {
                println!("{}/{} ({} rows)", opts.out.display(), o.file, o.rows);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
