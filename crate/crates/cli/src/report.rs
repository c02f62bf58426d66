//! Report envelope and writers. Reports carry no timestamps or timings so that
//! identical inputs give byte-identical files.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use moyal_kms::conventions::{convention_hash, CONVENTION_VERSION};
use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;

pub const SCHEMA: &str = "moyal-kms/report/1";

/// Outcome of a command with respect to the exit-status contract.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    /// A hard identity held, or a plain evaluation finished.
    Pass,
    /// A hard identity failed; the process exits with status 1.
    Fail,
    /// Exploratory result; never fails the process.
    Exploratory,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    pub check: Option<String>,
    pub convention_version: &'static str,
    pub convention_hash: String,
    pub config: RunConfig,
    /// Polynomial documents used, keyed by role.
    pub inputs: Value,
    pub status: Status,
    pub verdict: String,
    pub result: Value,
}

impl Report {
    pub fn new(command: &str, check: Option<&str>, config: &RunConfig) -> Self {
        Self {
            schema: SCHEMA,
            command: command.into(),
            check: check.map(Into::into),
            convention_version: CONVENTION_VERSION,
            convention_hash: convention_hash(),
            config: config.clone(),
            inputs: Value::Object(Default::default()),
            status: Status::Pass,
            verdict: "pass".into(),
            result: Value::Null,
        }
    }

    pub fn input(mut self, role: &str, doc: impl Serialize) -> Result<Self> {
        if let Value::Object(m) = &mut self.inputs {
            m.insert(role.into(), serde_json::to_value(doc)?);
        }
        Ok(self)
    }

    pub fn result(mut self, r: impl Serialize) -> Result<Self> {
        self.result = serde_json::to_value(r)?;
        Ok(self)
    }

    /// Hard check: pass or fail.
    pub fn judged(mut self, pass: bool, detail: String) -> Self {
        self.status = if pass { Status::Pass } else { Status::Fail };
        self.verdict = if pass { format!("pass: {detail}") } else { format!("fail: {detail}") };
        self
    }

    pub fn exploratory(mut self, verdict: String) -> Self {
        self.status = Status::Exploratory;
        self.verdict = verdict;
        self
    }

    fn stem(&self) -> String {
        match &self.check {
            Some(c) => format!("{}-{}", self.command, c),
            None => self.command.clone(),
        }
    }

    /// Write `<stem>.json` and `<stem>.csv` into `dir`.
    pub fn write(&self, dir: &Path, table: &Table) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let json = dir.join(format!("{}.json", self.stem()));
        let csv = dir.join(format!("{}.csv", self.stem()));
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(&json, text).with_context(|| format!("writing {}", json.display()))?;
        table.write(&csv)?;
        Ok((json, csv))
    }
}

/// CSV table; the first column of every schema is `schema`.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

pub const CSV_SCHEMA: &str = "1";

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut h = vec!["schema".to_string()];
        h.extend(header.iter().map(|s| s.to_string()));
        Self { header: h, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        let mut r = vec![CSV_SCHEMA.to_string()];
        r.extend(row);
        debug_assert_eq!(r.len(), self.header.len());
        self.rows.push(r);
    }

    fn write(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Shortest round-trip decimal form.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}
