//! CSV and JSON writers. Rows go to `<stem>.csv.partial`, flushed per chunk, and the
//! file is renamed to `<stem>.csv` only when the run completes.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

/// Header of every `sweep` CSV.
pub const RATE_HEADER: &str =
    "grid_index,omega_d_GHz,amplitude,alpha,beta,n,junction,omega_GHz,gamma_per_s,T_s,xqp_star,flags";

/// Round-trip float format (17 significant digits).
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub struct CsvSink {
    partial: PathBuf,
    path: PathBuf,
    w: BufWriter<File>,
    rows: usize,
}

impl CsvSink {
    pub fn create(dir: &Path, stem: &str, header: &str) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(format!("{stem}.csv"));
        let partial = dir.join(format!("{stem}.csv.partial"));
        let mut w = BufWriter::new(File::create(&partial)?);
        writeln!(w, "{header}")?;
        w.flush()?;
        Ok(CsvSink { partial, path, w, rows: 0 })
    }

    pub fn row(&mut self, fields: &[String]) -> Result<(), CliError> {
        writeln!(self.w, "{}", fields.join(","))?;
        self.rows += 1;
        Ok(())
    }

    /// Makes everything written so far durable in the `.partial` file.
    pub fn flush(&mut self) -> Result<(), CliError> {
        self.w.flush()?;
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn finish(mut self) -> Result<PathBuf, CliError> {
        self.w.flush()?;
        drop(self.w);
        std::fs::rename(&self.partial, &self.path)?;
        Ok(self.path)
    }
}

#[derive(Debug, Serialize)]
pub struct Metadata {
    pub command: String,
    pub scenario: String,
    pub config_hash: String,
    pub code_version: String,
    pub profile: String,
    pub numerics: BTreeMap<String, usize>,
    pub threads: usize,
    pub started_at: String,
    pub finished_at: String,
}

#[derive(Debug, Serialize)]
pub struct Summary<T: Serialize> {
    pub metadata: Metadata,
    pub csv: Option<String>,
    pub svg: Option<String>,
    pub rows: usize,
    /// Rows carrying each flag; flags are `|`-separated in the CSV.
    pub flag_counts: BTreeMap<String, usize>,
    pub warnings: Vec<String>,
    pub details: T,
}

pub fn count_flags(counts: &mut BTreeMap<String, usize>, flags: &str) {
    for f in flags.split('|').filter(|f| !f.is_empty()) {
        *counts.entry(f.to_string()).or_insert(0) += 1;
    }
}

pub fn write_json<T: Serialize>(dir: &Path, stem: &str, value: &T) -> Result<PathBuf, CliError> {
    let path = dir.join(format!("{stem}.json"));
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::numeric(format!("json: {e}")))?;
    std::fs::write(&path, text + "\n")?;
    Ok(path)
}

pub fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_format() {
        for x in [0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 0.0] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(f64::INFINITY), "inf");
        assert_eq!(opt_num(None), "");
    }

    #[test]
    fn partial_then_rename() {
        let dir = tempfile::tempdir().unwrap();
        let mut s = CsvSink::create(dir.path(), "t", "a,b").unwrap();
        s.row(&["1".into(), "2".into()]).unwrap();
        s.flush().unwrap();
        let partial = std::fs::read_to_string(dir.path().join("t.csv.partial")).unwrap();
        assert_eq!(partial, "a,b\n1,2\n");
        let p = s.finish().unwrap();
        assert!(p.exists());
        assert!(!dir.path().join("t.csv.partial").exists());
    }

    #[test]
    fn flag_tally() {
        let mut c = BTreeMap::new();
        count_flags(&mut c, "ambiguous|truncation");
        count_flags(&mut c, "");
        count_flags(&mut c, "truncation");
        assert_eq!(c["truncation"], 2);
        assert_eq!(c.len(), 2);
    }
}
