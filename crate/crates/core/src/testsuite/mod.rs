//! Constructors for the five compositionality tests.

mod exceptions;
mod pairs;
mod productivity;
mod substitutivity;
mod systematicity;
mod unroll;

use thiserror::Error;

pub use exceptions::{
    exception_evaluate, exceptions_apply, ExceptionAudit, ExceptionEntry, ExceptionPair, ExceptionSet,
    EXCEPTION_PERCENTAGES,
};
pub use pairs::{composes_directly, contains_adjacent_pair, count_functions, HeldOutPair};
pub use productivity::{productivity_split, DEFAULT_PRODUCTIVITY_THRESHOLD};
pub use substitutivity::{
    make_consistency_pairs, substitutivity_equal, substitutivity_primitive, ConsistencyPair, ConsistencyPairs,
    SubstitutionAudit, SynonymMap, PRIMITIVE_SYNONYM_FRACTION,
};
pub use systematicity::{systematicity_split, SystematicitySplit};
pub use unroll::{build_unroll_plan, UnrollFailure, UnrollOutcome, UnrollPlan, UnrollStep};

use crate::generator::GeneratorError;
use crate::language::LanguageError;

#[derive(Debug, Error)]
pub enum TestsuiteError {
    #[error("only {available} samples contain a held-out pair, {needed} requested")]
    InsufficientPositives { needed: usize, available: usize },
    #[error("the {0} side of the productivity split is empty")]
    EmptySide(&'static str),
    #[error("fraction {0} is outside the supported range")]
    InvalidFraction(f64),
    #[error("the tree contains no function application")]
    NoFunction,
    #[error("could not synthesize a sample for {0}")]
    SynthesisFailed(String),
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error(transparent)]
    Language(#[from] LanguageError),
}
