//! Result directories: manifest, summary, and long-format plot tables.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Manifest<'a, C: Serialize> {
    pub schema_version: u32,
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub command: &'a str,
    pub master_seed: u64,
    pub config_hash: String,
    pub config: &'a C,
    pub files: Vec<String>,
}

/// Hex SHA-256 of the canonical JSON encoding of `value`.
pub fn config_hash<C: Serialize>(value: &C) -> Result<String> {
    let bytes = serde_json::to_vec(value)?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

pub fn write_manifest<C: Serialize>(dir: &Path, manifest: &Manifest<'_, C>) -> Result<()> {
    let text = serde_json::to_string_pretty(manifest)?;
    fs::write(dir.join("manifest.json"), text + "\n")?;
    Ok(())
}

fn read_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut reader = csv::Reader::from_path(path)?;
    let header = reader.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        rows.push(record?.iter().map(str::to_string).collect());
    }
    Ok((header, rows))
}

fn column(header: &[String], name: &str, path: &Path) -> Result<usize> {
    header
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| Error::Config(format!("{} has no column `{name}`", path.display())))
}

struct LongTable {
    rows: Vec<[String; 4]>,
}

impl LongTable {
    fn new() -> Self {
        Self { rows: Vec::new() }
    }

    fn push(&mut self, x: &str, series: &str, value: &str, error: &str) {
        self.rows.push([x.into(), series.into(), value.into(), error.into()]);
    }

    fn write(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["x", "series", "value", "error"])?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Write `plot_*.csv` tables (columns x, series, value, error) for every
/// result table present in `dir`. Fails with a missing-input error when the
/// directory holds none of them.
pub fn emit_plot_data(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();

    let density = dir.join("density.csv");
    if density.exists() {
        let (h, rows) = read_table(&density)?;
        let (cn, cx) = (column(&h, "n", &density)?, column(&h, "center", &density)?);
        let (ce, cse) = (column(&h, "empirical", &density)?, column(&h, "std_error", &density)?);
        let (ck, cke) = (column(&h, "kacrice", &density)?, column(&h, "kacrice_error", &density)?);
        let cc = column(&h, "cauchy", &density)?;
        let mut t = LongTable::new();
        for r in &rows {
            let x = &r[cx];
            t.push(x, &format!("empirical_n{}", r[cn]), &r[ce], &r[cse]);
            t.push(x, &format!("kacrice_n{}", r[cn]), &r[ck], &r[cke]);
            t.push(x, &format!("cauchy_n{}", r[cn]), &r[cc], "0");
        }
        let path = dir.join("plot_density.csv");
        t.write(&path)?;
        written.push(path);
    }

    let crossover = dir.join("crossover.csv");
    if crossover.exists() {
        let (h, rows) = read_table(&crossover)?;
        let (cy, cv) = (column(&h, "y", &crossover)?, column(&h, "p_hat", &crossover)?);
        let (ce, cr) = (column(&h, "error_estimate", &crossover)?, column(&h, "one_over_pi", &crossover)?);
        let mut t = LongTable::new();
        for r in &rows {
            t.push(&r[cy], "p_hat", &r[cv], &r[ce]);
            t.push(&r[cy], "one_over_pi", &r[cr], "0");
        }
        let path = dir.join("plot_crossover.csv");
        t.write(&path)?;
        written.push(path);
    }

    let pairs = dir.join("pair_corr.csv");
    if pairs.exists() {
        let (h, rows) = read_table(&pairs)?;
        let cs = column(&h, "separation", &pairs)?;
        let (ck, ce) = (column(&h, "k2", &pairs)?, column(&h, "std_error", &pairs)?);
        let cl = column(&h, "limit_k2", &pairs)?;
        let cn = column(&h, "n", &pairs)?;
        let ct = column(&h, "theta0", &pairs)?;
        let mut t = LongTable::new();
        for r in &rows {
            let tag = format!("n{}_theta{}", r[cn], r[ct]);
            t.push(&r[cs], &format!("empirical_k2_{tag}"), &r[ck], &r[ce]);
            t.push(&r[cs], "limit_k2", &r[cl], "0");
        }
        let path = dir.join("plot_pair_corr.csv");
        t.write(&path)?;
        written.push(path);
    }

    if written.is_empty() {
        return Err(Error::MissingInput(dir.join("density.csv|crossover.csv|pair_corr.csv")));
    }
    Ok(written)
}
