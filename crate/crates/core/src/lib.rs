//! Generation, interpretation and compositionality evaluation for the PCFG SET
//! string-edit translation task.
//!
//! The crate is organised bottom-up:
//!
//! - [`language`]: tokens, syntax trees, parsing and the reference interpreter.
//! - [`generator`]: seeded PCFG sampling and base-corpus assembly.
//! - [`naturalise`]: reshaping generated data towards a natural (length, depth) histogram.
//! - [`testsuite`]: systematicity, productivity, substitutivity, localism and
//!   overgeneralisation test constructions.
//! - [`harness`]: model adapters and test runners.
//! - [`metrics`]: accuracy, consistency and embedding-distance kernels.
//! - [`io`]: corpus files, manifests and sidecars.
//! - [`validate`]: independent audit of corpus files.

pub mod generator;
pub mod harness;
pub mod io;
pub mod language;
pub mod metrics;
pub mod naturalise;
pub mod rng;
pub mod testsuite;
pub mod validate;

pub use language::{
    evaluate, parse, tokenize, Alphabet, BaseFunction, FunctionSymbol, LanguageError, Lexicon, SequenceStats, Symbol,
    SyntaxTree, Token,
};
