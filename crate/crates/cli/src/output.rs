//! CSV tables, digests and the run manifest.

use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

/// 17 significant digits, enough to round-trip any `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// An in-memory CSV file; rows are written in insertion order.
pub struct Table {
    pub name: String,
    writer: csv::Writer<Vec<u8>>,
    rows: usize,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&str]) -> Self {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        writer
            .write_record(header)
            .expect("writing to memory cannot fail");
        Self {
            name: name.into(),
            writer,
            rows: 0,
        }
    }

    pub fn row<I, T>(&mut self, cells: I)
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[u8]>,
    {
        self.writer
            .write_record(cells)
            .expect("writing to memory cannot fail");
        self.rows += 1;
    }

    fn finish(self) -> (String, usize, Vec<u8>) {
        let bytes = self
            .writer
            .into_inner()
            .expect("flushing to memory cannot fail");
        (self.name, self.rows, bytes)
    }
}

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct OutputDigest {
    pub file: String,
    pub rows: usize,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct Manifest<C: Serialize> {
    pub command: &'static str,
    pub version: &'static str,
    pub seed: Option<u64>,
    pub inputs: Vec<InputDigest>,
    pub config: C,
    pub outputs: Vec<OutputDigest>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

pub fn read_input(path: &Path) -> CliResult<Vec<u8>> {
    std::fs::read(path).map_err(|source| CliError::Input {
        path: path.to_path_buf(),
        source,
    })
}

pub fn digest_input(path: &Path, bytes: &[u8]) -> InputDigest {
    InputDigest {
        path: path.display().to_string(),
        sha256: sha256_hex(bytes),
    }
}

fn write(path: PathBuf, bytes: &[u8]) -> CliResult<()> {
    std::fs::write(&path, bytes).map_err(|source| CliError::Output { path, source })
}

/// Writes every table and then the manifest listing them.
pub fn write_run<C: Serialize>(
    out_dir: &Path,
    command: &'static str,
    seed: Option<u64>,
    inputs: Vec<InputDigest>,
    config: C,
    tables: Vec<Table>,
) -> CliResult<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir).map_err(|source| CliError::Output {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let mut outputs = Vec::with_capacity(tables.len());
    let mut written = Vec::with_capacity(tables.len() + 1);
    for table in tables {
        let (name, rows, bytes) = table.finish();
        let path = out_dir.join(&name);
        write(path.clone(), &bytes)?;
        outputs.push(OutputDigest {
            file: name,
            rows,
            sha256: sha256_hex(&bytes),
        });
        written.push(path);
    }
    let manifest = Manifest {
        command,
        version: env!("CARGO_PKG_VERSION"),
        seed,
        inputs,
        config,
        outputs,
    };
    let mut bytes = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    bytes.push(b'\n');
    let path = out_dir.join(MANIFEST_FILE);
    write(path.clone(), &bytes)?;
    written.push(path);
    Ok(written)
}
