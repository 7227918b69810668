//! Command-line driver: experiment files, `.dat` tables and run manifests.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cache;
pub mod config;
pub mod manifest;
pub mod table;

use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use pilotsim::experiments::{run_experiment, ComputeMoments, ExperimentName, ExperimentSpec, MomentSource};

pub use cache::DiskMomentCache;
pub use config::{emit_config, parse_config, parse_config_file};
pub use manifest::RunManifest;
pub use table::{format_table, write_table};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("line {line}: key `{key}`: {msg}")]
    Parse { line: usize, key: String, msg: String },

    #[error("{0}")]
    Io(String),

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] pilotsim::Error),
}

/// Everything `main` needs after flag parsing. `None` leaves the config-file
/// (or preset) value in place.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub experiment: Option<ExperimentName>,
    pub config: Option<PathBuf>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub out: PathBuf,
    pub moments_cache: Option<PathBuf>,
    pub threads: Option<usize>,
}

/// Effective experiment: preset or file, then flag overrides.
pub fn resolve_spec(opts: &RunOptions) -> Result<ExperimentSpec, CliError> {
    let mut spec = match &opts.config {
        Some(path) => parse_config_file(path, opts.experiment)?,
        None => ExperimentSpec::preset(
            opts.experiment
                .ok_or_else(|| CliError::Usage("either --experiment or --config naming an experiment is required".into()))?,
        ),
    };
    if let Some(seed) = opts.seed {
        spec.seed = seed;
    }
    if let Some(trials) = opts.trials {
        spec.trials = trials;
    }
    spec.validate()?;
    Ok(spec)
}

/// Runs the experiment, writes its tables and the manifest into `opts.out`.
pub fn run(opts: &RunOptions) -> Result<RunManifest, CliError> {
    let spec = resolve_spec(opts)?;
    let started = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let clock = Instant::now();
    let cache = opts.moments_cache.as_ref().map(DiskMomentCache::new);
    let source: &dyn MomentSource = match &cache {
        Some(c) => c,
        None => &ComputeMoments,
    };
    let tables = match opts.threads {
        Some(0) => return Err(CliError::Usage("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?
            .install(|| run_experiment(&spec, source))?,
        None => run_experiment(&spec, source)?,
    };
    let mut manifest = RunManifest::new(spec, started);
    for t in &tables {
        let entry = write_table(t, &opts.out)?;
        manifest.record(t, entry);
    }
    manifest.elapsed_secs = clock.elapsed().as_secs_f64();
    manifest.write(&opts.out)?;
    Ok(manifest)
}
