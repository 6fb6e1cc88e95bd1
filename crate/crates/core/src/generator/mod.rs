//! Seeded PCFG sampling and base-corpus assembly.

mod corpus;
mod params;
mod probes;
mod sampler;

use thiserror::Error;

pub use corpus::{
    extend_unique, extend_unique_filtered, generate_corpus, split_corpus, Corpus, CorpusConfig, Sample, SplitFractions,
    Splits, UniquenessTracker,
};
pub use params::{GrammarParams, DEFAULT_MAX_ARG_LEN};
pub use probes::{make_function_difficulty_corpora, make_primitive_length_corpus, LengthProbe, LongArgument};
pub use sampler::{
    fill_distinct, sample_shape, sample_tree, SamplerLimits, Shape, DEFAULT_MAX_FUNCTIONS, DEFAULT_MAX_RECURSION,
};

use crate::language::LanguageError;

#[derive(Debug, Error)]
pub enum GeneratorError {
    #[error("invalid grammar parameters: {0}")]
    InvalidParams(String),
    #[error("split fractions must be in [0, 1] and sum to 1")]
    InvalidFractions,
    #[error("could not find unused string arguments: {accepted} of {requested} samples generated")]
    ExhaustedUniqueArguments { accepted: usize, requested: usize },
    #[error(transparent)]
    Language(#[from] LanguageError),
}
