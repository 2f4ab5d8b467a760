use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

/// Comma-separated table with a single header line.
pub struct Table {
    header: Vec<String>,
    body: String,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            body: String::new(),
        }
    }

    pub fn row(&mut self, cells: &[Cell]) {
        debug_assert_eq!(cells.len(), self.header.len());
        let line: Vec<String> = cells.iter().map(Cell::render).collect();
        writeln!(self.body, "{}", line.join(",")).expect("writing to a String");
    }

    fn render(&self) -> String {
        format!("{}\n{}", self.header.join(","), self.body)
    }
}

pub enum Cell {
    F(f64),
    U(u64),
    S(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            // Rust's float formatting is the shortest round-trip form, so it is
            // stable across runs and platforms.
            Cell::F(x) => format!("{x}"),
            Cell::U(n) => n.to_string(),
            Cell::S(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}

impl From<u64> for Cell {
    fn from(n: u64) -> Self {
        Cell::U(n)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::U(n as u64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::S(b.to_string())
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::S(s.to_string())
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::F)
    }
}

#[derive(Serialize)]
pub struct OutputDigest {
    pub file: String,
    pub sha256: String,
}

#[derive(Serialize)]
pub struct RunManifest<'a> {
    pub command: &'a str,
    pub experiment: &'a str,
    pub library_version: &'a str,
    pub config: &'a RunConfig,
    pub wall_time_secs: f64,
    pub outputs: Vec<OutputDigest>,
}

/// Collects the files of one run and writes the manifest last.
pub struct Sink {
    dir: PathBuf,
    stem: String,
    outputs: Vec<OutputDigest>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

impl Sink {
    pub fn new(dir: &Path, stem: &str) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating output directory {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            stem: stem.to_string(),
            outputs: Vec::new(),
        })
    }

    fn write(&mut self, name: String, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.dir.join(&name);
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        self.outputs.push(OutputDigest {
            file: name,
            sha256: sha256_hex(bytes),
        });
        Ok(path)
    }

    /// Writes `<stem><suffix>.csv`.
    pub fn csv(&mut self, suffix: &str, table: &Table) -> Result<PathBuf> {
        self.write(format!("{}{suffix}.csv", self.stem), table.render().as_bytes())
    }

    /// Writes `<stem><suffix>.json`.
    pub fn json<T: Serialize>(&mut self, suffix: &str, value: &T) -> Result<PathBuf> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(format!("{}{suffix}.json", self.stem), text.as_bytes())
    }

    pub fn finish(self, command: &str, config: &RunConfig, started: Instant) -> Result<PathBuf> {
        let manifest = RunManifest {
            command,
            experiment: &self.stem,
            library_version: scd_core::VERSION,
            config,
            wall_time_secs: started.elapsed().as_secs_f64(),
            outputs: self.outputs,
        };
        let path = self.dir.join(format!("{}.manifest.json", self.stem));
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}
