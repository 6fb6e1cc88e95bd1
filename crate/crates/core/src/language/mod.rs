//! Tokens, syntax trees and the ground-truth interpreter.

mod function;
mod interpret;
mod symbol;
mod token;
mod tree;

use thiserror::Error;

pub use function::{BaseFunction, FunctionSymbol, Lexicon};
pub use interpret::{apply_function, evaluate};
pub use symbol::{join_symbols, parse_symbols, Alphabet, Symbol, ALPHABET_SIZE};
pub use token::{tokenize, tokens_to_string, Token, SEPARATOR};
pub use tree::{parse, SequenceStats, SyntaxTree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LanguageError {
    #[error("empty input sequence")]
    EmptyInput,
    #[error("unknown token `{0}`")]
    UnknownToken(String),
    #[error("unexpected end of sequence")]
    UnexpectedEnd,
    #[error("unexpected token `{token}` at position {position}")]
    UnexpectedToken { position: usize, token: String },
    #[error("`{function}` takes {expected} argument(s), got {found}")]
    ArityMismatch { function: String, expected: usize, found: usize },
    #[error("empty string argument")]
    EmptyArgument,
    #[error("invalid synonym name `{0}`")]
    InvalidSynonym(String),
}

/// Tokenize, parse and evaluate in one go.
pub fn interpret_text(text: &str, lexicon: &Lexicon) -> Result<Vec<Symbol>, LanguageError> {
    let tokens = tokenize(text, lexicon)?;
    evaluate(&parse(&tokens)?)
}
