use serde::Serialize;
use std::path::{Path, PathBuf};

use super::config::RunConfig;
use crate::error::{Error, Result};

/// Tab-separated table whose header carries units: `name [unit]`.
#[derive(Clone, Debug, Default)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

pub fn num(x: f64) -> String {
    format!("{x:.12e}")
}

impl Table {
    pub fn new(columns: &[(&str, &str)]) -> Self {
        let header = columns
            .iter()
            .map(|(n, u)| {
                if u.is_empty() {
                    n.to_string()
                } else {
                    format!("{n} [{u}]")
                }
            })
            .collect();
        Table {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .delimiter(b'\t')
            .from_path(path)
            .map_err(|e| Error::io(path, e.into()))?;
        w.write_record(&self.header)
            .map_err(|e| Error::io(path, e.into()))?;
        for r in &self.rows {
            w.write_record(r).map_err(|e| Error::io(path, e.into()))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

/// Collects the files of one run and writes them with a metadata sidecar.
#[derive(Debug)]
pub struct RunOutput {
    pub dir: PathBuf,
    pub command: String,
    files: Vec<String>,
    summary: toml::Table,
}

impl RunOutput {
    pub fn new(dir: &Path, command: &str) -> Self {
        RunOutput {
            dir: dir.to_path_buf(),
            command: command.into(),
            files: Vec::new(),
            summary: toml::Table::new(),
        }
    }

    fn ensure_dir(&self) -> Result<()> {
        std::fs::create_dir_all(&self.dir).map_err(|e| Error::io(&self.dir, e))
    }

    pub fn table(&mut self, name: &str, table: &Table) -> Result<PathBuf> {
        self.ensure_dir()?;
        let path = self.dir.join(name);
        table.write(&path)?;
        self.files.push(name.into());
        Ok(path)
    }

    pub fn toml<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf> {
        self.ensure_dir()?;
        let path = self.dir.join(name);
        let text = toml::to_string(value).map_err(|e| Error::Format {
            path: path.clone(),
            reason: e.to_string(),
        })?;
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        self.files.push(name.into());
        Ok(path)
    }

    pub fn record(&mut self, key: &str, value: impl Into<toml::Value>) {
        self.summary.insert(key.into(), value.into());
    }

    pub fn summary(&self) -> &toml::Table {
        &self.summary
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }

    /// `<command>.meta.toml`: command, version, resolved config, files, summary.
    pub fn finish(&mut self, config: &RunConfig) -> Result<PathBuf> {
        self.ensure_dir()?;
        let mut meta = toml::Table::new();
        let mut run = toml::Table::new();
        run.insert("command".into(), self.command.clone().into());
        run.insert("version".into(), env!("CARGO_PKG_VERSION").into());
        let stamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs() as i64)
            .unwrap_or(0);
        run.insert("unix_time".into(), stamp.into());
        run.insert(
            "files".into(),
            toml::Value::Array(self.files.iter().map(|f| f.clone().into()).collect()),
        );
        meta.insert("run".into(), run.into());
        meta.insert("summary".into(), self.summary.clone().into());
        let config = toml::Table::try_from(config).expect("config serializes");
        meta.insert("config".into(), config.into());
        let path = self.dir.join(format!("{}.meta.toml", self.command));
        std::fs::write(&path, toml::to_string(&meta).expect("table serializes"))
            .map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }
}
