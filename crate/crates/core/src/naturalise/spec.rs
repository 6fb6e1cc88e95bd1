use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::NaturaliseError;

/// One cell of a natural-corpus histogram.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecEntry {
    pub length: usize,
    pub depth: usize,
    pub count: usize,
}

/// Joint (length, depth) histogram of a natural-language reference corpus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistributionSpec {
    entries: Vec<SpecEntry>,
    total: usize,
}

impl DistributionSpec {
    pub fn new(entries: Vec<SpecEntry>) -> Result<Self, NaturaliseError> {
        if entries.is_empty() {
            return Err(NaturaliseError::InvalidSpec("no entries".into()));
        }
        let mut seen = BTreeMap::new();
        for (row, e) in entries.iter().enumerate() {
            if e.count == 0 {
                return Err(NaturaliseError::InvalidSpec(format!("row {}: count must be >= 1", row + 1)));
            }
            if let Some(prev) = seen.insert((e.length, e.depth), row) {
                return Err(NaturaliseError::InvalidSpec(format!(
                    "rows {} and {} share (length, depth) = ({}, {})",
                    prev + 1,
                    row + 1,
                    e.length,
                    e.depth
                )));
            }
        }
        let total = entries.iter().map(|e| e.count).sum();
        Ok(DistributionSpec { entries, total })
    }

    /// The histogram shipped with the crate.
    pub fn reference() -> Self {
        Self::from_csv(include_str!("../../data/reference_spec.csv").as_bytes())
            .expect("embedded reference histogram is valid")
    }

    /// Reads `length,depth,count` CSV with a header line.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self, NaturaliseError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| NaturaliseError::InvalidSpec(e.to_string()))?;
        if headers.iter().collect::<Vec<_>>() != ["length", "depth", "count"] {
            return Err(NaturaliseError::InvalidSpec("header must be `length,depth,count`".into()));
        }
        let entries = rdr
            .deserialize()
            .collect::<Result<Vec<SpecEntry>, _>>()
            .map_err(|e| NaturaliseError::InvalidSpec(e.to_string()))?;
        DistributionSpec::new(entries)
    }

    pub fn from_path(path: &Path) -> Result<Self, NaturaliseError> {
        let file =
            std::fs::File::open(path).map_err(|e| NaturaliseError::InvalidSpec(format!("{}: {e}", path.display())))?;
        Self::from_csv(file)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(writer);
        for e in &self.entries {
            w.serialize(e)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Histogram of an observed list of (length, depth) features.
    pub fn from_features(features: &[(usize, usize)]) -> Result<Self, NaturaliseError> {
        let mut counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for f in features {
            *counts.entry(*f).or_default() += 1;
        }
        DistributionSpec::new(
            counts.into_iter().map(|((length, depth), count)| SpecEntry { length, depth, count }).collect(),
        )
    }

    pub fn entries(&self) -> &[SpecEntry] {
        &self.entries
    }

    pub fn total(&self) -> usize {
        self.total
    }

    /// (mean length, mean depth).
    pub fn means(&self) -> (f64, f64) {
        let n = self.total as f64;
        let l = self.entries.iter().map(|e| (e.length * e.count) as f64).sum::<f64>() / n;
        let d = self.entries.iter().map(|e| (e.depth * e.count) as f64).sum::<f64>() / n;
        (l, d)
    }
}
