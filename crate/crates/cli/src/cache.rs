//! Ensemble moments kept on disk between runs.

use std::fmt::Write as _;
use std::path::PathBuf;

use pilotsim::experiments::{moment_cache_key, MomentSource};
use pilotsim::{Error, MomentMode, MomentSet, SystemConfig};

use crate::table::write_atomic;

/// [`MomentSource`] that stores computed moments under `dir`, keyed by
/// geometry, sample count and seed.
#[derive(Debug, Clone)]
pub struct DiskMomentCache {
    pub dir: PathBuf,
}

impl DiskMomentCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        DiskMomentCache { dir: dir.into() }
    }

    pub fn path_for(&self, config: &SystemConfig, n_samples: usize, seed: u64) -> PathBuf {
        self.dir.join(format!("moments-{}.txt", moment_cache_key(config, n_samples, seed)))
    }
}

fn encode(m: &MomentSet) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "cells {}", m.cells());
    for (tag, table) in [("m1", &m.m1), ("m2", &m.m2)] {
        for row in table.iter() {
            let vals: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            let _ = writeln!(out, "{tag} {}", vals.join(" "));
        }
    }
    out
}

fn decode(text: &str, config: &SystemConfig) -> Option<MomentSet> {
    let mut lines = text.lines();
    let cells: usize = lines.next()?.strip_prefix("cells ")?.parse().ok()?;
    let mut m1 = Vec::new();
    let mut m2 = Vec::new();
    for line in lines {
        let (tag, rest) = line.split_once(' ')?;
        let row = rest.split(' ').map(|v| v.parse::<f64>().ok()).collect::<Option<Vec<_>>>()?;
        match tag {
            "m1" => m1.push(row),
            "m2" => m2.push(row),
            _ => return None,
        }
    }
    if m1.len() != cells || cells != config.cells {
        return None;
    }
    let (alpha, kappa) = MomentSet::ratios(config);
    MomentSet::new(alpha, kappa, m1, m2, MomentMode::PowerControlled).ok()
}

impl MomentSource for DiskMomentCache {
    fn ensemble(&self, config: &SystemConfig, n_samples: usize, seed: u64) -> pilotsim::Result<MomentSet> {
        let path = self.path_for(config, n_samples, seed);
        if let Some(m) = std::fs::read_to_string(&path).ok().and_then(|t| decode(&t, config)) {
            return Ok(m);
        }
        let m = MomentSet::ensemble_seeded(config, n_samples, seed)?;
        write_atomic(&path, encode(&m).as_bytes()).map_err(|e| Error::Io(e.to_string()))?;
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cached_equals_fresh() {
        let dir = tempfile::tempdir().unwrap();
        let cache = DiskMomentCache::new(dir.path());
        let cfg = SystemConfig::default();
        let fresh = MomentSet::ensemble_seeded(&cfg, 2_000, 5).unwrap();
        let first = cache.ensemble(&cfg, 2_000, 5).unwrap();
        assert!(cache.path_for(&cfg, 2_000, 5).exists());
        let second = cache.ensemble(&cfg, 2_000, 5).unwrap();
        assert_eq!(first, fresh);
        assert_eq!(second, fresh);
    }

    #[test]
    fn corrupt_entry_is_recomputed() {
        let dir = tempfile::tempdir().unwrap();
        let cache = DiskMomentCache::new(dir.path());
        let cfg = SystemConfig::default();
        std::fs::write(cache.path_for(&cfg, 1_000, 1), "garbage").unwrap();
        let m = cache.ensemble(&cfg, 1_000, 1).unwrap();
        assert_eq!(m, MomentSet::ensemble_seeded(&cfg, 1_000, 1).unwrap());
    }
}
