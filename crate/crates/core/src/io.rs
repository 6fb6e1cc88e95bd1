//! Line-aligned corpus files, manifests with content hashes, JSON sidecars and
//! checkpoint prediction directories.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::generator::{GrammarParams, Sample};
use crate::language::{join_symbols, parse, parse_symbols, tokenize, tokens_to_string, LanguageError, Lexicon};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {source}")]
    Parse { path: PathBuf, line: usize, source: LanguageError },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{path}: {found} lines, but {expected} in the aligned file")]
    LineCountMismatch { path: PathBuf, expected: usize, found: usize },
    #[error("{file} does not match the hash recorded in the manifest")]
    HashMismatch { file: String },
    #[error("{0}: checkpoint files must be named <ordinal>_<label>.pred")]
    BadCheckpointName(PathBuf),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::Io { path: path.to_path_buf(), source }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn read_lines(path: &Path) -> Result<Vec<String>, IoError> {
    Ok(fs::read_to_string(path).map_err(io_err(path))?.lines().map(str::to_string).collect())
}

/// Writes `lines`, each terminated by `\n`, and returns the content hash.
pub fn write_lines<S: AsRef<str>>(path: &Path, lines: &[S]) -> Result<String, IoError> {
    let mut text = String::new();
    for l in lines {
        text.push_str(l.as_ref());
        text.push('\n');
    }
    fs::write(path, &text).map_err(io_err(path))?;
    Ok(sha256_hex(text.as_bytes()))
}

pub fn src_path(dir: &Path, split: &str) -> PathBuf {
    dir.join(format!("{split}.src"))
}

pub fn tgt_path(dir: &Path, split: &str) -> PathBuf {
    dir.join(format!("{split}.tgt"))
}

/// Writes `<split>.src` and `<split>.tgt`; returns `(file name, hash)` pairs.
pub fn write_split(dir: &Path, split: &str, samples: &[&Sample]) -> Result<Vec<(String, String)>, IoError> {
    let src: Vec<String> = samples.iter().map(|s| s.src_text()).collect();
    let tgt: Vec<String> = samples.iter().map(|s| s.tgt_text()).collect();
    Ok(vec![
        (format!("{split}.src"), write_lines(&src_path(dir, split), &src)?),
        (format!("{split}.tgt"), write_lines(&tgt_path(dir, split), &tgt)?),
    ])
}

/// Parses a split back into samples. Targets are taken from the file as
/// they are, so they may differ from the interpreter's (e.g. exceptions).
pub fn read_split(dir: &Path, split: &str, lexicon: &Lexicon) -> Result<Vec<Sample>, IoError> {
    let sp = src_path(dir, split);
    let tp = tgt_path(dir, split);
    let src = read_lines(&sp)?;
    let tgt = read_lines(&tp)?;
    if src.len() != tgt.len() {
        return Err(IoError::LineCountMismatch { path: tp, expected: src.len(), found: tgt.len() });
    }
    src.iter()
        .zip(&tgt)
        .enumerate()
        .map(|(i, (s, t))| {
            let perr = |path: &Path| {
                let path = path.to_path_buf();
                move |source| IoError::Parse { path, line: i + 1, source }
            };
            let tokens = tokenize(s, lexicon).map_err(perr(&sp))?;
            let tree = parse(&tokens).map_err(perr(&sp))?;
            let tgt = parse_symbols(t).map_err(perr(&tp))?;
            Ok(Sample { id: i, stats: tree.stats(), src: tokens, tgt, tree })
        })
        .collect()
}

/// Plain text lines of `samples` in both directions, for sidecars and tests.
pub fn sample_lines(samples: &[Sample]) -> (Vec<String>, Vec<String>) {
    samples.iter().map(|s| (tokens_to_string(&s.src), join_symbols(&s.tgt))).unzip()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    /// The command that produced the directory.
    pub command: String,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<GrammarParams>,
    /// Line counts per split.
    pub sizes: BTreeMap<String, usize>,
    /// SHA-256 of every data file, by file name.
    pub files: BTreeMap<String, String>,
    /// Command-specific settings and audit summaries.
    #[serde(default)]
    pub details: serde_json::Value,
}

impl Manifest {
    pub fn new(command: &str, seed: u64) -> Self {
        Manifest {
            schema_version: MANIFEST_SCHEMA_VERSION,
            command: command.to_string(),
            seed,
            params: None,
            sizes: BTreeMap::new(),
            files: BTreeMap::new(),
            details: serde_json::Value::Null,
        }
    }

    /// Combined hash over all recorded files, in name order.
    pub fn dataset_hash(&self) -> String {
        let mut h = Sha256::new();
        for (name, hash) in &self.files {
            h.update(name.as_bytes());
            h.update(b"\0");
            h.update(hash.as_bytes());
            h.update(b"\n");
        }
        hex::encode(h.finalize())
    }

    pub fn write(&self, dir: &Path) -> Result<(), IoError> {
        write_json(&dir.join(MANIFEST_FILE), self)
    }

    pub fn read(dir: &Path) -> Result<Self, IoError> {
        read_json(&dir.join(MANIFEST_FILE))
    }

    /// Re-hashes every recorded file under `dir`.
    pub fn verify(&self, dir: &Path) -> Result<(), IoError> {
        for (name, expected) in &self.files {
            let path = dir.join(name);
            let bytes = fs::read(&path).map_err(io_err(&path))?;
            if &sha256_hex(&bytes) != expected {
                return Err(IoError::HashMismatch { file: name.clone() });
            }
        }
        Ok(())
    }
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<(), IoError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|source| IoError::Json { path: path.into(), source })?;
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|source| IoError::Json { path: path.into(), source })
}

/// `<ordinal>_<label>.pred` files of `dir`, in ordinal order.
pub fn checkpoint_files(dir: &Path) -> Result<Vec<(u64, String, PathBuf)>, IoError> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let path = entry.map_err(io_err(dir))?.path();
        if path.extension().and_then(|e| e.to_str()) != Some("pred") {
            continue;
        }
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
        let parsed = stem.split_once('_').and_then(|(n, label)| Some((n.parse::<u64>().ok()?, label.to_string())));
        let Some((ordinal, label)) = parsed else {
            return Err(IoError::BadCheckpointName(path));
        };
        out.push((ordinal, label, path));
    }
    out.sort();
    Ok(out)
}
