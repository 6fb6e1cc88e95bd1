use std::collections::HashMap;
use std::time::Duration;

use rand::{Rng, SeedableRng};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::language::{
    evaluate, parse, tokens_to_string, Alphabet, BaseFunction, LanguageError, Symbol, SyntaxTree, Token,
};
use crate::rng::CorpusRng;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AdapterError {
    #[error(transparent)]
    Language(#[from] LanguageError),
    #[error("no reply within {0:?}")]
    Timeout(Duration),
    #[error("model process exited ({0})")]
    ChildExited(String),
    #[error("protocol violation: {0}")]
    ProtocolViolation(String),
    #[error("no prediction for input {0:?}")]
    MissingPrediction(String),
    #[error("{found} predictions for {expected} inputs")]
    LineCountMismatch { expected: usize, found: usize },
    #[error("i/o error: {0}")]
    Io(String),
}

/// A sequence-to-sequence model seen only through its predictions.
///
/// Outputs are whitespace-separated tokens and need not be valid symbols.
pub trait ModelAdapter {
    /// Identifies the model in report metadata.
    fn id(&self) -> String;

    fn predict(&mut self, src: &[Token]) -> Result<Vec<String>, AdapterError>;

    fn predict_all(&mut self, sources: &[Vec<Token>]) -> Vec<Result<Vec<String>, AdapterError>> {
        sources.iter().map(|s| self.predict(s)).collect()
    }
}

impl<A: ModelAdapter + ?Sized> ModelAdapter for Box<A> {
    fn id(&self) -> String {
        (**self).id()
    }

    fn predict(&mut self, src: &[Token]) -> Result<Vec<String>, AdapterError> {
        (**self).predict(src)
    }

    fn predict_all(&mut self, sources: &[Vec<Token>]) -> Vec<Result<Vec<String>, AdapterError>> {
        (**self).predict_all(sources)
    }
}

fn strings(symbols: &[Symbol]) -> Vec<String> {
    symbols.iter().map(Symbol::to_string).collect()
}

/// The ground-truth interpreter.
#[derive(Clone, Copy, Debug, Default)]
pub struct OracleAdapter;

impl ModelAdapter for OracleAdapter {
    fn id(&self) -> String {
        "oracle".into()
    }

    fn predict(&mut self, src: &[Token]) -> Result<Vec<String>, AdapterError> {
        Ok(strings(&evaluate(&parse(src)?)?))
    }
}

/// The interpreter with one output symbol replaced for a fixed share of inputs.
///
/// Whether an input is corrupted, and how, depends only on its text and the
/// seed, so runs are reproducible and an input and its synonym variant are
/// corrupted independently.
#[derive(Clone, Debug)]
pub struct FaultyOracleAdapter {
    rate: f64,
    seed: u64,
    alphabet: Alphabet,
}

impl FaultyOracleAdapter {
    pub fn new(rate: f64, seed: u64) -> Self {
        FaultyOracleAdapter { rate: rate.clamp(0.0, 1.0), seed, alphabet: Alphabet::standard() }
    }

    fn rng_for(&self, src: &str) -> CorpusRng {
        let digest = Sha256::new().chain_update(self.seed.to_le_bytes()).chain_update(src.as_bytes()).finalize();
        let mut seed = [0u8; 32];
        seed.copy_from_slice(&digest[..32]);
        CorpusRng::from_seed(seed)
    }
}

impl ModelAdapter for FaultyOracleAdapter {
    fn id(&self) -> String {
        format!("faulty:{}", self.rate)
    }

    fn predict(&mut self, src: &[Token]) -> Result<Vec<String>, AdapterError> {
        let mut out = evaluate(&parse(src)?)?;
        let mut rng = self.rng_for(&tokens_to_string(src));
        if rng.gen::<f64>() < self.rate && !out.is_empty() {
            let i = rng.gen_range(0..out.len());
            let pool = self.alphabet.symbols();
            let mut replacement = out[i];
            while replacement == out[i] {
                replacement = pool[rng.gen_range(0..pool.len())];
            }
            out[i] = replacement;
        }
        Ok(strings(&out))
    }
}

/// The interpreter, except that any literal argument longer than `cap` that a
/// function actually transforms yields a wrong answer (the last symbol is
/// doubled). The discarded argument of `remove_first` / `remove_second` is
/// never transformed.
#[derive(Clone, Copy, Debug)]
pub struct LengthCappedOracle {
    pub cap: usize,
}

fn consumed_long_literal(tree: &SyntaxTree, cap: usize) -> bool {
    let SyntaxTree::Apply { func, args } = tree else {
        return false;
    };
    let ignored = match func.semantics() {
        BaseFunction::RemoveFirst => Some(0),
        BaseFunction::RemoveSecond => Some(1),
        _ => None,
    };
    args.iter().enumerate().any(|(i, a)| match a {
        SyntaxTree::Leaf(symbols) => Some(i) != ignored && symbols.len() > cap,
        SyntaxTree::Apply { .. } => consumed_long_literal(a, cap),
    })
}

impl ModelAdapter for LengthCappedOracle {
    fn id(&self) -> String {
        format!("length-capped:{}", self.cap)
    }

    fn predict(&mut self, src: &[Token]) -> Result<Vec<String>, AdapterError> {
        let tree = parse(src)?;
        let mut out = evaluate(&tree)?;
        if consumed_long_literal(&tree, self.cap) {
            if let Some(last) = out.last().copied() {
                out.push(last);
            }
        }
        Ok(strings(&out))
    }
}

/// Precomputed predictions aligned line by line with a test set.
#[derive(Clone, Debug)]
pub struct FileAdapter {
    label: String,
    predictions: HashMap<String, Vec<String>>,
}

impl FileAdapter {
    /// `predictions[i]` answers `sources[i]`.
    pub fn new(label: &str, sources: &[String], predictions: &[String]) -> Result<Self, AdapterError> {
        if sources.len() != predictions.len() {
            return Err(AdapterError::LineCountMismatch { expected: sources.len(), found: predictions.len() });
        }
        let predictions = sources
            .iter()
            .zip(predictions)
            .map(|(s, p)| (canonical(s), p.split_whitespace().map(str::to_string).collect()))
            .collect();
        Ok(FileAdapter { label: label.to_string(), predictions })
    }
}

fn canonical(line: &str) -> String {
    line.split_whitespace().collect::<Vec<_>>().join(" ")
}

impl ModelAdapter for FileAdapter {
    fn id(&self) -> String {
        format!("file:{}", self.label)
    }

    fn predict(&mut self, src: &[Token]) -> Result<Vec<String>, AdapterError> {
        let key = tokens_to_string(src);
        self.predictions.get(&key).cloned().ok_or(AdapterError::MissingPrediction(key))
    }
}
