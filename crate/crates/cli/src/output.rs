//! CSV tables plus a JSON manifest describing what each column is for.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;

/// Bumped whenever a column is renamed, removed or changes meaning.
pub const SCHEMA_VERSION: u32 = 1;

/// A CSV record type with a fixed header.
pub trait Row: Serialize {
    const HEADER: &'static [&'static str];
}

/// Column roles for plotting tools: `x` against each of `y`, one series per
/// distinct combination of `group` values.
#[derive(Debug, Clone, Serialize)]
pub struct Roles {
    pub x: &'static str,
    pub y: Vec<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<&'static str>,
    pub group: Vec<&'static str>,
}

#[derive(Debug, Serialize)]
struct FileEntry {
    file: String,
    description: String,
    columns: Vec<String>,
    roles: Roles,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    schema_version: u32,
    command: &'a str,
    parameters: &'a BTreeMap<String, serde_json::Value>,
    files: &'a [FileEntry],
}

/// Collects the files one command writes and records them in
/// `<command>.manifest.json`.
pub struct OutputDir {
    dir: PathBuf,
    command: &'static str,
    parameters: BTreeMap<String, serde_json::Value>,
    files: Vec<FileEntry>,
}

impl OutputDir {
    pub fn create(dir: &Path, command: &'static str) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
        Ok(OutputDir {
            dir: dir.to_owned(),
            command,
            parameters: BTreeMap::new(),
            files: Vec::new(),
        })
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        let value = serde_json::to_value(value).expect("parameters serialize to JSON");
        self.parameters.insert(key.to_owned(), value);
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    /// Writes `rows` under `name`; the header is written even when `rows` is
    /// empty.
    pub fn write_csv<R: Row>(&mut self, name: &str, description: &str, roles: Roles, rows: &[R]) -> Result<PathBuf> {
        let path = self.path(name);
        let file = File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(BufWriter::new(file));
        w.write_record(R::HEADER)?;
        for row in rows {
            w.serialize(row)?;
        }
        w.flush()?;
        self.register(name, description, R::HEADER, roles);
        Ok(path)
    }

    /// Records a file written by other means.
    pub fn register(&mut self, name: &str, description: &str, columns: &[&str], roles: Roles) {
        self.files.push(FileEntry {
            file: name.to_owned(),
            description: description.to_owned(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            roles,
        });
    }

    pub fn finish(self) -> Result<PathBuf> {
        let path = self.dir.join(format!("{}.manifest.json", self.command));
        let manifest = Manifest {
            schema_version: SCHEMA_VERSION,
            command: self.command,
            parameters: &self.parameters,
            files: &self.files,
        };
        let file = File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
        serde_json::to_writer_pretty(BufWriter::new(file), &manifest)?;
        Ok(path)
    }
}
