pub mod converge;
pub mod sweep;
pub mod tools;

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::Serialize;

use crate::config::Resolved;
use crate::error::CliError;
use crate::output::{timestamp, write_json, CsvSink, Metadata, Summary};
use crate::svg::LinePlot;

/// Shared state of one command invocation.
pub struct Ctx {
    pub command: &'static str,
    pub run: Resolved,
    pub threads: usize,
    pub svg: bool,
    pub started_at: String,
    pub flag_counts: BTreeMap<String, usize>,
    pub warnings: Vec<String>,
}

impl Ctx {
    pub fn new(command: &'static str, run: Resolved, threads: usize, svg: bool) -> Self {
        Ctx { command, run, threads, svg, started_at: timestamp(), flag_counts: BTreeMap::new(), warnings: Vec::new() }
    }

    pub fn sink(&self, header: &str) -> Result<CsvSink, CliError> {
        CsvSink::create(&self.run.out_dir, &self.run.stem, header)
    }

    fn metadata(&self) -> Metadata {
        let n = self.run.numerics;
        let numerics = [
            ("n_c", n.n_c),
            ("d", n.d),
            ("m_max", n.m_max),
            ("k_max", n.k_max),
            ("guard", n.guard),
            ("max_dim", n.max_dim),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
        Metadata {
            command: self.command.into(),
            scenario: self.run.config.scenario.name().into(),
            config_hash: self.run.hash.clone(),
            code_version: env!("CARGO_PKG_VERSION").into(),
            profile: self.run.profile.as_str().into(),
            numerics,
            threads: self.threads,
            started_at: self.started_at.clone(),
            finished_at: timestamp(),
        }
    }

    /// Renames the CSV into place, writes the optional plot and the JSON summary.
    pub fn finish<T: Serialize>(self, sink: CsvSink, plot: Option<LinePlot>, details: T) -> Result<PathBuf, CliError> {
        let rows = sink.rows();
        let csv = sink.finish()?;
        let svg = match (self.svg, plot) {
            (true, Some(p)) => {
                let path = self.run.out_dir.join(format!("{}.svg", self.run.stem));
                std::fs::write(&path, p.render())?;
                Some(path.display().to_string())
            }
            _ => None,
        };
        let summary = Summary {
            metadata: self.metadata(),
            csv: Some(csv.display().to_string()),
            svg,
            rows,
            flag_counts: self.flag_counts,
            warnings: self.warnings,
            details,
        };
        write_json(&self.run.out_dir, &self.run.stem, &summary)?;
        Ok(csv)
    }
}
