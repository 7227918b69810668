//! Flat key-value record of one run.

use std::fmt::Write as _;
use std::path::Path;

use pilotsim::experiments::{ExperimentSpec, ResultTable};

use crate::config::emit_config;
use crate::table::{write_atomic, OutputEntry};
use crate::CliError;

pub const MANIFEST_FILE: &str = "manifest.txt";

#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub spec: ExperimentSpec,
    pub tool_version: String,
    /// Seconds since the Unix epoch at start.
    pub started_unix: u64,
    pub elapsed_secs: f64,
    pub outputs: Vec<OutputEntry>,
    /// `(table, key, value)` metadata emitted by the experiment.
    pub meta: Vec<(String, String, String)>,
}

impl RunManifest {
    pub fn new(spec: ExperimentSpec, started_unix: u64) -> Self {
        RunManifest {
            spec,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            started_unix,
            elapsed_secs: 0.0,
            outputs: Vec::new(),
            meta: Vec::new(),
        }
    }

    pub fn record(&mut self, table: &ResultTable, entry: OutputEntry) {
        for (k, v) in &table.meta {
            self.meta.push((table.name.clone(), k.clone(), v.clone()));
        }
        self.outputs.push(entry);
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "experiment = {}", self.spec.name);
        let _ = writeln!(out, "seed = {}", self.spec.seed);
        let _ = writeln!(out, "tool_version = {}", self.tool_version);
        let _ = writeln!(out, "started_unix = {}", self.started_unix);
        let _ = writeln!(out, "elapsed_secs = {:.3}", self.elapsed_secs);
        let mut section = String::new();
        for line in emit_config(&self.spec).lines() {
            if let Some(s) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = s.to_string();
            } else if let Some((k, v)) = line.split_once(" = ") {
                let _ = writeln!(out, "spec.{section}.{k} = {v}");
            }
        }
        for o in &self.outputs {
            let _ = writeln!(out, "output.{} = sha256:{} rows:{}", o.file, o.sha256, o.rows);
        }
        for (t, k, v) in &self.meta {
            let _ = writeln!(out, "meta.{t}.{k} = {v}");
        }
        out
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        write_atomic(&dir.join(MANIFEST_FILE), self.to_text().as_bytes())
    }
}

/// `(file, sha256)` pairs listed in a manifest's text.
pub fn manifest_checksums(text: &str) -> Vec<(String, String)> {
    text.lines()
        .filter_map(|l| l.strip_prefix("output."))
        .filter_map(|l| l.split_once(" = sha256:"))
        .map(|(file, rest)| (file.to_string(), rest.split_whitespace().next().unwrap_or("").to_string()))
        .collect()
}
