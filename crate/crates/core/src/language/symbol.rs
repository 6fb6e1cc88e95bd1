use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::LanguageError;

const LETTERS: u16 = 26;
const MAX_SUFFIX: u16 = 19;

/// Number of literal symbols: 26 letters, each bare or with a suffix 1..=19.
pub const ALPHABET_SIZE: usize = (LETTERS * (MAX_SUFFIX + 1)) as usize;

/// A literal string symbol such as `A`, `K` or `Q13`.
///
/// Stored as a compact index: `suffix * 26 + letter`, so the bare letters
/// come first, then `A1..Z1`, `A2..Z2` and so on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(u16);

impl Symbol {
    pub fn from_index(index: usize) -> Option<Symbol> {
        (index < ALPHABET_SIZE).then_some(Symbol(index as u16))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    fn letter(self) -> char {
        (b'A' + (self.0 % LETTERS) as u8) as char
    }

    fn suffix(self) -> u16 {
        self.0 / LETTERS
    }

    /// True if `text` has the surface form of a literal symbol.
    pub fn is_literal(text: &str) -> bool {
        text.parse::<Symbol>().is_ok()
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.suffix() {
            0 => write!(f, "{}", self.letter()),
            n => write!(f, "{}{}", self.letter(), n),
        }
    }
}

impl FromStr for Symbol {
    type Err = LanguageError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || LanguageError::UnknownToken(s.to_string());
        let mut chars = s.chars();
        let first = chars.next().ok_or_else(bad)?;
        if !first.is_ascii_uppercase() {
            return Err(bad());
        }
        let letter = first as u16 - 'A' as u16;
        let rest = chars.as_str();
        let suffix = if rest.is_empty() {
            0
        } else {
            if rest.starts_with('0') || !rest.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let n: u16 = rest.parse().map_err(|_| bad())?;
            if !(1..=MAX_SUFFIX).contains(&n) {
                return Err(bad());
            }
            n
        };
        Ok(Symbol(suffix * LETTERS + letter))
    }
}

impl Serialize for Symbol {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Symbol {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The ordered set of literal symbols arguments are drawn from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<Symbol>,
}

impl Alphabet {
    /// The full 520-symbol alphabet.
    pub fn standard() -> Self {
        Alphabet { symbols: (0..ALPHABET_SIZE as u16).map(Symbol).collect() }
    }

    /// The first `size` symbols of the standard alphabet; used for small fixtures.
    pub fn truncated(size: usize) -> Self {
        let size = size.min(ALPHABET_SIZE);
        Alphabet { symbols: (0..size as u16).map(Symbol).collect() }
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

impl Default for Alphabet {
    fn default() -> Self {
        Alphabet::standard()
    }
}

/// Renders a symbol string as single-space separated text.
pub fn join_symbols(symbols: &[Symbol]) -> String {
    let mut out = String::with_capacity(symbols.len() * 3);
    for (i, s) in symbols.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&s.to_string());
    }
    out
}

/// Parses whitespace-separated literal symbols.
pub fn parse_symbols(text: &str) -> Result<Vec<Symbol>, LanguageError> {
    text.split_whitespace().map(str::parse).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn standard_alphabet_has_520_distinct_symbols() {
        let alphabet = Alphabet::standard();
        assert_eq!(alphabet.len(), 520);
        let texts: HashSet<String> = alphabet.symbols().iter().map(|s| s.to_string()).collect();
        assert_eq!(texts.len(), 520);
        assert!(texts.contains("A"));
        assert!(texts.contains("Z"));
        assert!(texts.contains("A1"));
        assert!(texts.contains("Z19"));
        assert!(!texts.contains("A20"));
    }

    #[test]
    fn symbol_text_round_trips() {
        for s in Alphabet::standard().symbols() {
            assert_eq!(s.to_string().parse::<Symbol>().unwrap(), *s);
        }
    }

    #[test]
    fn rejects_malformed_literals() {
        for bad in ["a", "A0", "A01", "A20", "AB", "", "1", ",", "A-1"] {
            assert!(bad.parse::<Symbol>().is_err(), "{bad}");
        }
    }

    #[test]
    fn ordering_puts_bare_letters_first() {
        let alphabet = Alphabet::standard();
        assert_eq!(alphabet.symbols()[25].to_string(), "Z");
        assert_eq!(alphabet.symbols()[26].to_string(), "A1");
    }
}
