use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::PipelineError;

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL: &str = "paramdet";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Self-describing wrapper around every structured output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub schema_version: u32,
    pub tool: String,
    pub tool_version: String,
    pub config_hash: String,
    pub kind: String,
    pub data: T,
}

impl<T> Envelope<T> {
    pub fn new(kind: &str, config_hash: &str, data: T) -> Self {
        Self { schema_version: SCHEMA_VERSION, tool: TOOL.into(), tool_version: TOOL_VERSION.into(), config_hash: config_hash.into(), kind: kind.into(), data }
    }
}

/// One-line provenance header for text and CSV outputs.
pub fn text_header(config_hash: &str) -> String {
    format!("# {TOOL} {TOOL_VERSION} schema {SCHEMA_VERSION} config {config_hash}\n")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> PipelineError {
    PipelineError::Io(format!("{}: {e}", path.display()))
}

/// Writes through a temporary file in the target directory and renames it
/// into place. Returns the content hash.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<String, PipelineError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_err(dir, e))?;
    tmp.write_all(bytes).map_err(|e| io_err(path, e))?;
    tmp.as_file().sync_all().map_err(|e| io_err(path, e))?;
    tmp.persist(path).map_err(|e| io_err(path, e.error))?;
    Ok(sha256_hex(bytes))
}

pub fn write_json<T: Serialize>(path: &Path, kind: &str, config_hash: &str, data: &T) -> Result<String, PipelineError> {
    let mut bytes = serde_json::to_vec_pretty(&Envelope::new(kind, config_hash, data)).map_err(|e| io_err(path, e))?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

pub fn read_bytes(path: &Path) -> Result<Vec<u8>, PipelineError> {
    std::fs::read(path).map_err(|e| io_err(path, e))
}

/// Reads an envelope and checks its schema and kind.
pub fn read_json<T: DeserializeOwned>(path: &Path, kind: &str) -> Result<Envelope<T>, PipelineError> {
    let env: Envelope<T> = serde_json::from_slice(&read_bytes(path)?).map_err(|e| io_err(path, e))?;
    if env.schema_version != SCHEMA_VERSION {
        return Err(io_err(path, format!("unsupported schema version {}", env.schema_version)));
    }
    if env.kind != kind {
        return Err(io_err(path, format!("expected a {kind} artifact, found {}", env.kind)));
    }
    Ok(env)
}

/// A file written by a stage, relative to the output root.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: PathBuf,
    pub sha256: String,
}
