//! Plain-text column files.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use pilotsim::experiments::ResultTable;
use sha2::{Digest, Sha256};

use crate::CliError;

/// `v` with 9 significant digits, in the shortest of fixed or exponent form.
pub fn format_sig9(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        trim_fraction(format!("{:.*}", (8 - exp) as usize, v))
    } else {
        format!("{}e{exp}", trim_fraction(mantissa.to_string()))
    }
}

fn trim_fraction(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

/// Header line of column names, then one line per row; LF endings.
pub fn format_table(table: &ResultTable) -> String {
    let mut out = String::new();
    let names: Vec<&str> = table.columns.iter().map(|(n, _)| n.as_str()).collect();
    out.push_str(&names.join(" "));
    out.push('\n');
    for r in 0..table.rows() {
        let row: Vec<String> = table.columns.iter().map(|(_, c)| format_sig9(c[r])).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Writes `bytes` next to `path` and renames into place, so readers never see
/// a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(io)?;
    let file_name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{file_name}.{}.tmp", std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(io)
}

/// One written output file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputEntry {
    pub file: String,
    pub sha256: String,
    pub rows: usize,
}

/// Writes `table` as `<dir>/<name>.dat`.
pub fn write_table(table: &ResultTable, dir: &Path) -> Result<OutputEntry, CliError> {
    let file = format!("{}.dat", table.name);
    let path: PathBuf = dir.join(&file);
    let text = format_table(table);
    write_atomic(&path, text.as_bytes())?;
    Ok(OutputEntry { file, sha256: sha256_hex(text.as_bytes()), rows: table.rows() })
}
