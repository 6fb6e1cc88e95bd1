use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::MetricsError;
use crate::language::BaseFunction;
use crate::testsuite::SynonymMap;

/// `1 − cos(u, v)`, in `[0, 2]`.
pub fn cosine_distance(u: &[f64], v: &[f64]) -> Result<f64, MetricsError> {
    if u.len() != v.len() {
        return Err(MetricsError::DimensionMismatch { expected: u.len(), found: v.len() });
    }
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu = u.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nv = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    if nu == 0.0 || nv == 0.0 {
        return Err(MetricsError::ZeroVector);
    }
    if u == v {
        return Ok(0.0);
    }
    Ok((1.0 - dot / (nu * nv)).clamp(0.0, 2.0))
}

/// Token embeddings of one model.
#[derive(Clone, Debug, Default)]
pub struct EmbeddingTable {
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> Self {
        EmbeddingTable { dim, vectors: HashMap::new() }
    }

    pub fn insert(&mut self, token: &str, vector: Vec<f64>) -> Result<(), MetricsError> {
        if vector.len() != self.dim {
            return Err(MetricsError::DimensionMismatch { expected: self.dim, found: vector.len() });
        }
        self.vectors.insert(token.to_string(), vector);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn get(&self, token: &str) -> Result<&[f64], MetricsError> {
        self.vectors.get(token).map(Vec::as_slice).ok_or_else(|| MetricsError::MissingToken(token.to_string()))
    }

    /// Text format: optional `<vocab_size> <dim>` header, then one
    /// `token v1 … v_dim` row per line.
    pub fn parse(text: &str) -> Result<Self, MetricsError> {
        let rows: Vec<(usize, Vec<&str>)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split_whitespace().collect::<Vec<_>>()))
            .filter(|(_, f)| !f.is_empty())
            .collect();
        let header = match rows.first() {
            Some((_, f)) if f.len() == 2 => match (f[0].parse::<usize>(), f[1].parse::<usize>()) {
                (Ok(_), Ok(dim)) => rows.get(1).is_none_or(|(_, next)| next.len() == dim + 1).then_some(dim),
                _ => None,
            },
            _ => None,
        };
        let body = &rows[usize::from(header.is_some())..];
        let dim = match (header, body.first()) {
            (Some(d), _) => d,
            (None, Some((_, f))) => f.len() - 1,
            (None, None) => 0,
        };
        let mut table = EmbeddingTable::new(dim);
        for (line, fields) in body {
            let values = fields[1..]
                .iter()
                .map(|v| {
                    v.parse::<f64>()
                        .map_err(|_| MetricsError::Format { line: *line, message: format!("{v:?} is not a number") })
                })
                .collect::<Result<Vec<_>, _>>()?;
            if values.len() != dim {
                return Err(MetricsError::Format {
                    line: *line,
                    message: format!("expected {dim} values, found {}", values.len()),
                });
            }
            table.vectors.insert(fields[0].to_string(), values);
        }
        Ok(table)
    }

    pub fn from_path(path: &Path) -> Result<Self, MetricsError> {
        EmbeddingTable::parse(&std::fs::read_to_string(path)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynonymDistanceRow {
    pub function: BaseFunction,
    pub synonym: String,
    pub synonym_distance: f64,
    /// Mean distance from the function to every other function of the set.
    pub other_distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynonymDistanceReport {
    pub rows: Vec<SynonymDistanceRow>,
    pub mean_synonym_distance: f64,
    pub mean_other_distance: f64,
}

/// Distances between each mapped function and its synonym, against the mean
/// distance to the other functions in `functions`.
pub fn synonym_distance_report(
    table: &EmbeddingTable,
    map: &SynonymMap,
    functions: &[BaseFunction],
) -> Result<SynonymDistanceReport, MetricsError> {
    let mut rows = Vec::new();
    for (f, syn) in map.entries() {
        let base = table.get(f.name())?;
        let synonym_distance = cosine_distance(base, table.get(syn)?)?;
        let others = functions
            .iter()
            .filter(|g| *g != f)
            .map(|g| cosine_distance(base, table.get(g.name())?))
            .collect::<Result<Vec<_>, _>>()?;
        let other_distance = if others.is_empty() { 0.0 } else { others.iter().sum::<f64>() / others.len() as f64 };
        rows.push(SynonymDistanceRow { function: *f, synonym: syn.clone(), synonym_distance, other_distance });
    }
    let n = rows.len().max(1) as f64;
    Ok(SynonymDistanceReport {
        mean_synonym_distance: rows.iter().map(|r| r.synonym_distance).sum::<f64>() / n,
        mean_other_distance: rows.iter().map(|r| r.other_distance).sum::<f64>() / n,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_extremes() {
        assert_eq!(cosine_distance(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert!((cosine_distance(&[1.0, 0.0], &[0.0, 3.0]).unwrap() - 1.0).abs() < 1e-12);
        assert!((cosine_distance(&[1.0, -2.0], &[-1.0, 2.0]).unwrap() - 2.0).abs() < 1e-12);
        assert!(matches!(cosine_distance(&[0.0, 0.0], &[1.0, 0.0]), Err(MetricsError::ZeroVector)));
    }

    #[test]
    fn header_is_optional() {
        let with = EmbeddingTable::parse("2 3\nswap 1 0 0\nswap_syn 0 1 0\n").unwrap();
        let without = EmbeddingTable::parse("swap 1 0 0\nswap_syn 0 1 0\n").unwrap();
        assert_eq!(with.len(), 2);
        assert_eq!(with.dim(), 3);
        assert_eq!(with.get("swap").unwrap(), without.get("swap").unwrap());
        assert!(EmbeddingTable::parse("a 1 2\nb 1\n").is_err());
    }

    #[test]
    fn three_function_fixture() {
        use BaseFunction::*;
        let table = EmbeddingTable::parse("swap 1 0\nswap_syn 1 0\nrepeat 0 1\nrepeat_syn 1 1\ncopy -1 0\nextra 5 5\n")
            .unwrap();
        let map = SynonymMap::suffixed(&[Swap, Repeat]);
        let report = synonym_distance_report(&table, &map, &[Swap, Repeat, Copy]).unwrap();
        // swap: syn 0; others repeat 1, copy 2 -> 1.5
        // repeat: syn 1 - 1/sqrt 2; others swap 1, copy 1 -> 1
        let swap = &report.rows[0];
        assert_eq!(swap.function, Swap);
        assert_eq!(swap.synonym_distance, 0.0);
        assert!((swap.other_distance - 1.5).abs() < 1e-12);
        let repeat = &report.rows[1];
        assert!((repeat.synonym_distance - (1.0 - 1.0 / 2f64.sqrt())).abs() < 1e-12);
        assert!((repeat.other_distance - 1.0).abs() < 1e-12);
        assert!((report.mean_other_distance - 1.25).abs() < 1e-12);
        assert!(synonym_distance_report(&table, &SynonymMap::suffixed(&[Echo]), &[Echo]).is_err());
    }
}
