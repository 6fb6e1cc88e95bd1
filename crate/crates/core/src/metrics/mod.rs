//! Metric kernels: sequence accuracy, consistency, stratified means and
//! embedding distances.

mod embedding;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use embedding::{
    cosine_distance, synonym_distance_report, EmbeddingTable, SynonymDistanceReport, SynonymDistanceRow,
};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("{scores} scores but {keys} stratum keys")]
    LengthMismatch { scores: usize, keys: usize },
    #[error("cosine distance is undefined for a zero vector")]
    ZeroVector,
    #[error("expected dimension {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("token {0:?} has no embedding")]
    MissingToken(String),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Whitespace-insensitive token view of a line.
pub fn canonical_tokens(text: &str) -> Vec<&str> {
    text.split_whitespace().collect()
}

/// True iff the whole predicted sequence equals the target.
pub fn sequence_accuracy<T: PartialEq>(pred: &[T], tgt: &[T]) -> bool {
    pred == tgt
}

/// True iff the two outputs are identical, whether or not they are correct.
pub fn pairwise_consistency<T: PartialEq>(a: &[T], b: &[T]) -> bool {
    a == b
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stratum {
    pub score: f64,
    pub count: usize,
}

/// Overall and per-stratum means of 0/1 scores.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate<K: Ord> {
    /// `None` when there are no scores.
    pub overall: Option<f64>,
    pub count: usize,
    pub strata: BTreeMap<K, Stratum>,
}

fn mean(hits: usize, n: usize) -> Option<f64> {
    (n > 0).then(|| hits as f64 / n as f64)
}

pub fn aggregate<K: Ord + Clone>(scores: &[bool], keys: &[K]) -> Result<Aggregate<K>, MetricsError> {
    if scores.len() != keys.len() {
        return Err(MetricsError::LengthMismatch { scores: scores.len(), keys: keys.len() });
    }
    let mut tallies: BTreeMap<K, (usize, usize)> = BTreeMap::new();
    for (s, k) in scores.iter().zip(keys) {
        let t = tallies.entry(k.clone()).or_default();
        t.0 += usize::from(*s);
        t.1 += 1;
    }
    let hits = scores.iter().filter(|s| **s).count();
    Ok(Aggregate {
        overall: mean(hits, scores.len()),
        count: scores.len(),
        strata: tallies.into_iter().map(|(k, (h, n))| (k, Stratum { score: h as f64 / n as f64, count: n })).collect(),
    })
}

/// Consistency of output pairs together with its correctness breakdown.
///
/// A pair is correct only if both outputs equal the target.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyScores {
    pub pairs: usize,
    pub consistency: f64,
    pub consistent_correct: f64,
    pub consistent_incorrect: f64,
    /// Consistent-incorrect pairs as a share of incorrect pairs; `None` if
    /// every pair is correct.
    pub consistency_across_incorrect: Option<f64>,
}

pub fn consistency_scores<'a, T: PartialEq + 'a>(
    outcomes: impl IntoIterator<Item = (&'a [T], &'a [T], &'a [T])>,
) -> ConsistencyScores {
    let (mut n, mut same, mut same_correct, mut incorrect) = (0usize, 0usize, 0usize, 0usize);
    for (a, b, tgt) in outcomes {
        n += 1;
        let correct = a == tgt && b == tgt;
        if !correct {
            incorrect += 1;
        }
        if pairwise_consistency(a, b) {
            same += 1;
            if correct {
                same_correct += 1;
            }
        }
    }
    let frac = |k: usize| mean(k, n).unwrap_or(0.0);
    ConsistencyScores {
        pairs: n,
        consistency: frac(same),
        consistent_correct: frac(same_correct),
        consistent_incorrect: frac(same - same_correct),
        consistency_across_incorrect: mean(same - same_correct, incorrect),
    }
}
