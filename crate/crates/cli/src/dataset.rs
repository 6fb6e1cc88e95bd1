//! Reading and writing corpus directories.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use pcfgset::generator::Sample;
use pcfgset::io::{read_json, read_split, write_lines, write_split, Manifest, MANIFEST_FILE};
use pcfgset::testsuite::SynonymMap;
use pcfgset::Lexicon;

pub const SYNONYMS_FILE: &str = "synonyms.json";

/// The default synonyms plus any listed in the directory's `synonyms.json`.
pub fn lexicon_for(dir: &Path) -> Result<Lexicon> {
    let mut lexicon = SynonymMap::defaults().lexicon();
    let path = dir.join(SYNONYMS_FILE);
    if path.exists() {
        let map: SynonymMap = read_json(&path)?;
        for (function, name) in map.entries() {
            lexicon.register_synonym(name, *function)?;
        }
    }
    Ok(lexicon)
}

/// Splits present in `dir` as `.src`/`.tgt` pairs, in train/valid/test order.
pub fn present_splits(dir: &Path) -> Vec<String> {
    ["train", "valid", "test"]
        .into_iter()
        .filter(|s| dir.join(format!("{s}.src")).exists() && dir.join(format!("{s}.tgt")).exists())
        .map(str::to_string)
        .collect()
}

/// Re-hashes the files listed in the manifest. Directories without a manifest
/// are accepted as-is.
pub fn verify(dir: &Path) -> Result<Option<Manifest>> {
    if !dir.join(MANIFEST_FILE).exists() {
        return Ok(None);
    }
    let manifest = Manifest::read(dir)?;
    manifest.verify(dir).with_context(|| format!("{} does not match its manifest", dir.display()))?;
    Ok(Some(manifest))
}

pub type NamedSplits = Vec<(String, Vec<Sample>)>;

/// Verified manifest and all splits of a corpus directory.
pub fn load(dir: &Path) -> Result<(Option<Manifest>, NamedSplits)> {
    let manifest = verify(dir)?;
    let lexicon = lexicon_for(dir)?;
    let splits = present_splits(dir)
        .into_iter()
        .map(|name| {
            let samples = read_split(dir, &name, &lexicon)?;
            Ok((name, samples))
        })
        .collect::<Result<Vec<_>>>()?;
    anyhow::ensure!(!splits.is_empty(), "no .src/.tgt splits in {}", dir.display());
    Ok((manifest, splits))
}

/// Collects output files and their hashes into a manifest.
pub struct DatasetWriter<'a> {
    dir: &'a Path,
    pub manifest: Manifest,
}

impl<'a> DatasetWriter<'a> {
    pub fn create(dir: &'a Path, command: &str, seed: u64) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        Ok(DatasetWriter { dir, manifest: Manifest::new(command, seed) })
    }

    pub fn split(&mut self, name: &str, samples: &[&Sample]) -> Result<()> {
        for (file, hash) in write_split(self.dir, name, samples)? {
            self.manifest.files.insert(file, hash);
        }
        self.manifest.sizes.insert(name.to_string(), samples.len());
        Ok(())
    }

    pub fn owned_split(&mut self, name: &str, samples: &[Sample]) -> Result<()> {
        self.split(name, &samples.iter().collect::<Vec<_>>())
    }

    pub fn lines(&mut self, file: &str, lines: &[String]) -> Result<()> {
        let hash = write_lines(&self.dir.join(file), lines)?;
        self.manifest.files.insert(file.to_string(), hash);
        Ok(())
    }

    /// Writes a JSON sidecar and records its hash.
    pub fn json<T: serde::Serialize + ?Sized>(&mut self, file: &str, value: &T) -> Result<()> {
        let path = self.dir.join(file);
        pcfgset::io::write_json(&path, value)?;
        let bytes = fs::read(&path)?;
        self.manifest.files.insert(file.to_string(), pcfgset::io::sha256_hex(&bytes));
        Ok(())
    }

    pub fn finish(self) -> Result<Manifest> {
        self.manifest.write(self.dir)?;
        Ok(self.manifest)
    }
}
