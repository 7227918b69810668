//! Flat, sectioned key-value experiment files.
//!
//! ```text
//! [experiment]
//! name = sinr_vs_n
//! trials = 500
//!
//! [system]
//! K = 20
//! tau = 30
//! Pu_dB = 0
//! ```
//!
//! Keys ending in `_dB` set the linear key of the same stem. Unknown keys,
//! duplicates and invariant violations are reported with key and line.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use pilotsim::config::HexOrientation;
use pilotsim::experiments::{ExperimentName, ExperimentSpec};
use pilotsim::uplink::AvgDomain;
use pilotsim::{from_db, PilotScheme, PowerMode};

use crate::CliError;

const SECTIONS: [(&str, &[&str]); 3] = [
    ("experiment", &["name", "trials", "seed", "avg_domain", "redraw_geometry"]),
    (
        "system",
        &[
            "L", "K", "N", "tau", "T", "sigma2", "Pu", "zeta", "bs_spacing", "inner_radius", "orientation", "scheme",
            "power_mode", "p",
        ],
    ),
    (
        "sweep",
        &[
            "N_list",
            "kappa_list",
            "theta_list",
            "gamma_th_dB_grid",
            "alpha",
            "beta",
            "realizations",
            "moment_samples",
            "headline_N",
        ],
    ),
];

/// Keys that also accept a `_dB` spelling.
const LINEAR_KEYS: [&str; 3] = ["sigma2", "Pu", "p"];

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: usize,
}

/// Raw entries keyed by `section.key`, with dB spellings already resolved.
#[derive(Debug, Default)]
struct Document {
    entries: HashMap<String, Entry>,
    db: HashMap<String, bool>,
}

fn parse_error(line: usize, key: &str, msg: impl Into<String>) -> CliError {
    CliError::Parse { line, key: key.to_string(), msg: msg.into() }
}

fn tokenize(text: &str) -> Result<Document, CliError> {
    let mut doc = Document::default();
    let mut section: Option<&str> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let name = name.trim();
            section = Some(
                SECTIONS
                    .iter()
                    .find(|(s, _)| *s == name)
                    .map(|(s, _)| *s)
                    .ok_or_else(|| parse_error(line, name, "unknown section"))?,
            );
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| parse_error(line, content, "expected `key = value`"))?;
        let (key, value) = (key.trim(), value.trim());
        let sec = section.ok_or_else(|| parse_error(line, key, "key outside of any section"))?;
        let allowed = SECTIONS.iter().find(|(s, _)| *s == sec).map(|(_, k)| *k).unwrap_or(&[]);
        let (base, is_db) = match key.strip_suffix("_dB") {
            Some(stem) if LINEAR_KEYS.contains(&stem) => (stem, true),
            _ => (key, false),
        };
        if !allowed.contains(&base) {
            return Err(parse_error(line, key, format!("unknown key in section [{sec}]")));
        }
        let full = format!("{sec}.{base}");
        if let Some(prev) = doc.entries.get(&full) {
            return Err(parse_error(line, key, format!("duplicate key (first set on line {})", prev.line)));
        }
        doc.entries.insert(full.clone(), Entry { value: value.to_string(), line });
        doc.db.insert(full, is_db);
    }
    Ok(doc)
}

struct Reader {
    doc: Document,
}

impl Reader {
    fn get(&self, key: &str) -> Option<&Entry> {
        self.doc.entries.get(key)
    }

    fn line(&self, key: &str) -> usize {
        self.get(key).map_or(0, |e| e.line)
    }

    fn short(key: &str) -> &str {
        key.rsplit('.').next().unwrap_or(key)
    }

    fn parse<T: std::str::FromStr>(&self, key: &str, what: &str) -> Result<Option<T>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some(e) => e
                .value
                .parse()
                .map(Some)
                .map_err(|_| parse_error(e.line, Self::short(key), format!("expected {what}, got `{}`", e.value))),
        }
    }

    fn float(&self, key: &str) -> Result<Option<f64>, CliError> {
        let v = self.parse::<f64>(key, "a number")?;
        let db = self.doc.db.get(key).copied().unwrap_or(false);
        Ok(v.map(|x| if db { from_db(x) } else { x }))
    }

    fn positive(&self, key: &str) -> Result<Option<f64>, CliError> {
        let v = self.float(key)?;
        if let Some(x) = v {
            if !(x > 0.0 && x.is_finite()) {
                return Err(parse_error(self.line(key), Self::short(key), format!("must be positive, got {x}")));
            }
        }
        Ok(v)
    }

    fn count(&self, key: &str, min: usize) -> Result<Option<usize>, CliError> {
        let v = self.parse::<usize>(key, "a non-negative integer")?;
        if let Some(x) = v {
            if x < min {
                return Err(parse_error(self.line(key), Self::short(key), format!("must be at least {min}, got {x}")));
            }
        }
        Ok(v)
    }

    fn list<T: std::str::FromStr>(&self, key: &str, what: &str) -> Result<Option<Vec<T>>, CliError> {
        let Some(e) = self.get(key) else { return Ok(None) };
        let items = e
            .value
            .split(',')
            .map(|s| s.trim().parse::<T>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| parse_error(e.line, Self::short(key), format!("expected a comma-separated list of {what}")))?;
        if items.is_empty() {
            return Err(parse_error(e.line, Self::short(key), "list must not be empty"));
        }
        Ok(Some(items))
    }

    fn enumerated<T: std::str::FromStr<Err = pilotsim::Error>>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some(e) => e.value.parse().map(Some).map_err(|err: pilotsim::Error| {
                parse_error(e.line, Self::short(key), err.to_string())
            }),
        }
    }
}

/// `a:step:b` (inclusive) or a comma-separated list.
fn parse_grid(text: &str) -> Option<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').map(str::trim).collect();
    if parts.len() == 3 {
        let (a, step, b) = (parts[0].parse::<f64>().ok()?, parts[1].parse::<f64>().ok()?, parts[2].parse::<f64>().ok()?);
        if !(step > 0.0) || b < a {
            return None;
        }
        let n = ((b - a) / step + 1e-9).floor() as usize;
        return Some((0..=n).map(|i| a + step * i as f64).collect());
    }
    text.split(',').map(|s| s.trim().parse::<f64>().ok()).collect()
}

/// Reads and validates an experiment file. `name` overrides or supplies the
/// experiment name.
pub fn parse_config_file(path: &Path, name: Option<ExperimentName>) -> Result<ExperimentSpec, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text, name)
}

pub fn parse_config(text: &str, name: Option<ExperimentName>) -> Result<ExperimentSpec, CliError> {
    let r = Reader { doc: tokenize(text)? };
    let name = match name {
        Some(n) => n,
        None => r
            .enumerated::<ExperimentName>("experiment.name")?
            .ok_or_else(|| parse_error(0, "name", "missing required key in section [experiment]"))?,
    };
    let mut spec = ExperimentSpec::preset(name);

    if let Some(v) = r.count("experiment.trials", 1)? {
        spec.trials = v;
    }
    if let Some(v) = r.parse("experiment.seed", "an unsigned 64-bit integer")? {
        spec.seed = v;
    }
    if let Some(v) = r.enumerated::<AvgDomain>("experiment.avg_domain")? {
        spec.avg_domain = v;
    }
    if let Some(v) = r.parse("experiment.redraw_geometry", "true or false")? {
        spec.redraw_geometry = v;
    }

    let c = &mut spec.config;
    if let Some(l) = r.count("system.L", 1)? {
        if l != 1 && l != 7 {
            return Err(parse_error(r.line("system.L"), "L", format!("only 1 or 7 cells are supported, got {l}")));
        }
        *c = c.clone().with_cells(l);
    }
    if let Some(k) = r.list::<usize>("system.K", "user counts")? {
        let users = match k.len() {
            1 => vec![k[0]; c.cells],
            n if n == c.cells => k,
            n => return Err(parse_error(r.line("system.K"), "K", format!("{n} entries for L = {}", c.cells))),
        };
        if users.contains(&0) {
            return Err(parse_error(r.line("system.K"), "K", "every cell needs at least one user"));
        }
        c.users = users;
    }
    if let Some(v) = r.count("system.N", 1)? {
        c.antennas = v;
    }
    if let Some(v) = r.count("system.tau", 1)? {
        c.tau = v;
    }
    if let Some(v) = r.count("system.T", 1)? {
        c.coherence = v;
    }
    if let Some(v) = r.positive("system.sigma2")? {
        c.sigma2 = v;
    }
    if let Some(v) = r.positive("system.Pu")? {
        c.pu = v;
    }
    if let Some(v) = r.positive("system.zeta")? {
        c.zeta = v;
    }
    if let Some(v) = r.positive("system.bs_spacing")? {
        c.bs_spacing = v;
    }
    if let Some(v) = r.positive("system.inner_radius")? {
        c.inner_radius = v;
    }
    if let Some(v) = r.enumerated::<HexOrientation>("system.orientation")? {
        c.orientation = v;
    }
    if let Some(v) = r.enumerated::<PilotScheme>("system.scheme")? {
        c.scheme = v;
    }
    let mode = r.get("system.power_mode").map(|e| (e.value.to_ascii_uppercase(), e.line));
    match mode.as_ref().map(|(m, l)| (m.as_str(), *l)) {
        None | Some(("CONTROLLED", _)) => {
            if r.get("system.p").is_some() {
                return Err(parse_error(r.line("system.p"), "p", "transmit powers require power_mode = FIXED"));
            }
            c.power = PowerMode::Controlled;
        }
        Some(("FIXED", line)) => {
            let p = r.get("system.p").ok_or_else(|| parse_error(line, "p", "power_mode = FIXED requires key `p`"))?;
            c.power = parse_powers(&p.value, &c.users, r.doc.db["system.p"])
                .ok_or_else(|| parse_error(p.line, "p", "expected one positive power or `;`-separated per-cell lists"))?;
        }
        Some((other, line)) => {
            return Err(parse_error(line, "power_mode", format!("expected CONTROLLED or FIXED, got `{other}`")));
        }
    }
    for (j, &k) in c.users.iter().enumerate() {
        if k > c.tau {
            let (key, line) = if r.get("system.K").is_some() { ("K", r.line("system.K")) } else { ("tau", r.line("system.tau")) };
            return Err(parse_error(line, key, format!("K = {k} in cell {j} exceeds tau = {}", c.tau)));
        }
    }
    if c.tau > c.coherence {
        let (key, line) = if r.get("system.tau").is_some() { ("tau", r.line("system.tau")) } else { ("T", r.line("system.T")) };
        return Err(parse_error(line, key, format!("tau = {} exceeds T = {}", c.tau, c.coherence)));
    }

    let s = &mut spec.sweep;
    if let Some(v) = r.list::<usize>("sweep.N_list", "antenna counts")? {
        if v.contains(&0) {
            return Err(parse_error(r.line("sweep.N_list"), "N_list", "antenna counts must be positive"));
        }
        s.n_list = v;
    }
    if let Some(v) = r.list::<f64>("sweep.kappa_list", "numbers")? {
        if v.iter().any(|&k| !(k > 0.0 && k <= 1.0)) {
            return Err(parse_error(r.line("sweep.kappa_list"), "kappa_list", "entries must lie in (0, 1]"));
        }
        s.kappa_list = v;
    }
    if let Some(v) = r.list::<f64>("sweep.theta_list", "numbers")? {
        if v.iter().any(|&t| !(t > 0.0)) {
            return Err(parse_error(r.line("sweep.theta_list"), "theta_list", "entries must be positive"));
        }
        s.theta_list = v;
    }
    if let Some(e) = r.get("sweep.gamma_th_dB_grid") {
        s.gamma_db = parse_grid(&e.value)
            .filter(|g| !g.is_empty())
            .ok_or_else(|| parse_error(e.line, "gamma_th_dB_grid", "expected `start:step:stop` or a comma-separated list"))?;
    }
    if let Some(v) = r.positive("sweep.alpha")? {
        s.alpha = v;
    }
    if let Some(v) = r.float("sweep.beta")? {
        if !(v > 0.0 && v < 1.0) {
            return Err(parse_error(r.line("sweep.beta"), "beta", format!("must lie in (0, 1), got {v}")));
        }
        s.beta = v;
    }
    if let Some(v) = r.count("sweep.realizations", 1)? {
        s.realizations = v;
    }
    if let Some(v) = r.count("sweep.moment_samples", 1)? {
        s.moment_samples = v;
    }
    if let Some(v) = r.count("sweep.headline_N", 1)? {
        s.headline_antennas = v;
    }

    spec.validate().map_err(|e| parse_error(0, "config", e.to_string()))?;
    Ok(spec)
}

fn parse_powers(text: &str, users: &[usize], db: bool) -> Option<PowerMode> {
    let conv = |x: f64| if db { from_db(x) } else { x };
    let cells: Vec<Vec<f64>> = text
        .split(';')
        .map(|cell| cell.split(',').map(|v| v.trim().parse::<f64>().ok().map(conv)).collect::<Option<Vec<_>>>())
        .collect::<Option<Vec<_>>>()?;
    let table = if cells.len() == 1 && cells[0].len() == 1 {
        users.iter().map(|&k| vec![cells[0][0]; k]).collect()
    } else {
        if cells.len() != users.len() || cells.iter().zip(users).any(|(c, &k)| c.len() != k) {
            return None;
        }
        cells
    };
    if table.iter().flatten().any(|&p| !(p > 0.0 && p.is_finite())) {
        return None;
    }
    Some(PowerMode::Fixed(table))
}

fn join<T: std::fmt::Debug>(v: &[T]) -> String {
    v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(", ")
}

/// Writes every key of `spec`, in a form [`parse_config`] reads back exactly.
pub fn emit_config(spec: &ExperimentSpec) -> String {
    let c = &spec.config;
    let s = &spec.sweep;
    let mut out = String::new();
    let _ = writeln!(out, "[experiment]");
    let _ = writeln!(out, "name = {}", spec.name);
    let _ = writeln!(out, "trials = {}", spec.trials);
    let _ = writeln!(out, "seed = {}", spec.seed);
    let _ = writeln!(out, "avg_domain = {}", spec.avg_domain.as_str());
    let _ = writeln!(out, "redraw_geometry = {}", spec.redraw_geometry);
    let _ = writeln!(out, "\n[system]");
    let _ = writeln!(out, "L = {}", c.cells);
    let _ = writeln!(out, "K = {}", c.users.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(", "));
    let _ = writeln!(out, "N = {}", c.antennas);
    let _ = writeln!(out, "tau = {}", c.tau);
    let _ = writeln!(out, "T = {}", c.coherence);
    let _ = writeln!(out, "sigma2 = {:?}", c.sigma2);
    let _ = writeln!(out, "Pu = {:?}", c.pu);
    let _ = writeln!(out, "zeta = {:?}", c.zeta);
    let _ = writeln!(out, "bs_spacing = {:?}", c.bs_spacing);
    let _ = writeln!(out, "inner_radius = {:?}", c.inner_radius);
    let _ = writeln!(out, "orientation = {}", c.orientation.as_str());
    let _ = writeln!(out, "scheme = {}", c.scheme.as_str());
    match &c.power {
        PowerMode::Controlled => {
            let _ = writeln!(out, "power_mode = CONTROLLED");
        }
        PowerMode::Fixed(table) => {
            let _ = writeln!(out, "power_mode = FIXED");
            let cells: Vec<String> = table.iter().map(|row| join(row)).collect();
            let _ = writeln!(out, "p = {}", cells.join("; "));
        }
    }
    let _ = writeln!(out, "\n[sweep]");
    let _ = writeln!(out, "N_list = {}", join(&s.n_list));
    let _ = writeln!(out, "kappa_list = {}", join(&s.kappa_list));
    let _ = writeln!(out, "theta_list = {}", join(&s.theta_list));
    let _ = writeln!(out, "gamma_th_dB_grid = {}", join(&s.gamma_db));
    let _ = writeln!(out, "alpha = {:?}", s.alpha);
    let _ = writeln!(out, "beta = {:?}", s.beta);
    let _ = writeln!(out, "realizations = {}", s.realizations);
    let _ = writeln!(out, "moment_samples = {}", s.moment_samples);
    let _ = writeln!(out, "headline_N = {}", s.headline_antennas);
    out
}
