use std::fmt;

use super::{FunctionSymbol, LanguageError, Lexicon, Symbol};

pub const SEPARATOR: &str = ",";

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Token {
    Function(FunctionSymbol),
    Literal(Symbol),
    Separator,
}

impl Token {
    pub fn is_function(&self) -> bool {
        matches!(self, Token::Function(_))
    }

    pub fn as_function(&self) -> Option<&FunctionSymbol> {
        match self {
            Token::Function(f) => Some(f),
            _ => None,
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Function(func) => write!(f, "{func}"),
            Token::Literal(sym) => write!(f, "{sym}"),
            Token::Separator => f.write_str(SEPARATOR),
        }
    }
}

/// Splits `text` on whitespace and classifies every piece.
pub fn tokenize(text: &str, lexicon: &Lexicon) -> Result<Vec<Token>, LanguageError> {
    if text.trim().is_empty() {
        return Err(LanguageError::EmptyInput);
    }
    text.split_whitespace().map(|piece| classify(piece, lexicon)).collect()
}

fn classify(piece: &str, lexicon: &Lexicon) -> Result<Token, LanguageError> {
    if piece == SEPARATOR {
        return Ok(Token::Separator);
    }
    if let Some(f) = lexicon.lookup(piece) {
        return Ok(Token::Function(f.clone()));
    }
    piece.parse::<Symbol>().map(Token::Literal).map_err(|_| LanguageError::UnknownToken(piece.to_string()))
}

/// Single-space rendering of a token list.
pub fn tokens_to_string(tokens: &[Token]) -> String {
    let mut out = String::new();
    for (i, t) in tokens.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&t.to_string());
    }
    out
}
