use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::LanguageError;

/// The ten string-edit operations of the task.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseFunction {
    Copy,
    Reverse,
    Shift,
    Echo,
    Swap,
    Repeat,
    Append,
    Prepend,
    RemoveFirst,
    RemoveSecond,
}

impl BaseFunction {
    pub const ALL: [BaseFunction; 10] = [
        BaseFunction::Copy,
        BaseFunction::Reverse,
        BaseFunction::Shift,
        BaseFunction::Echo,
        BaseFunction::Swap,
        BaseFunction::Repeat,
        BaseFunction::Append,
        BaseFunction::Prepend,
        BaseFunction::RemoveFirst,
        BaseFunction::RemoveSecond,
    ];

    pub const UNARY: [BaseFunction; 6] = [
        BaseFunction::Copy,
        BaseFunction::Reverse,
        BaseFunction::Shift,
        BaseFunction::Echo,
        BaseFunction::Swap,
        BaseFunction::Repeat,
    ];

    pub const BINARY: [BaseFunction; 4] =
        [BaseFunction::Append, BaseFunction::Prepend, BaseFunction::RemoveFirst, BaseFunction::RemoveSecond];

    pub fn name(self) -> &'static str {
        match self {
            BaseFunction::Copy => "copy",
            BaseFunction::Reverse => "reverse",
            BaseFunction::Shift => "shift",
            BaseFunction::Echo => "echo",
            BaseFunction::Swap => "swap",
            BaseFunction::Repeat => "repeat",
            BaseFunction::Append => "append",
            BaseFunction::Prepend => "prepend",
            BaseFunction::RemoveFirst => "remove_first",
            BaseFunction::RemoveSecond => "remove_second",
        }
    }

    pub fn from_name(name: &str) -> Option<BaseFunction> {
        BaseFunction::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn arity(self) -> usize {
        if self.is_binary() {
            2
        } else {
            1
        }
    }

    pub fn is_binary(self) -> bool {
        matches!(
            self,
            BaseFunction::Append | BaseFunction::Prepend | BaseFunction::RemoveFirst | BaseFunction::RemoveSecond
        )
    }

    /// Position of this function within its arity class (unary or binary list).
    pub fn class_index(self) -> usize {
        let class: &[BaseFunction] = if self.is_binary() { &BaseFunction::BINARY } else { &BaseFunction::UNARY };
        class.iter().position(|f| *f == self).unwrap()
    }
}

impl fmt::Display for BaseFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A function token: a surface name bound to one of the base semantics.
///
/// Base functions carry their own name; synonyms carry a different name
/// (`swap_syn`) with the same semantics.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FunctionSymbol {
    name: Arc<str>,
    base: BaseFunction,
}

impl FunctionSymbol {
    pub fn base(function: BaseFunction) -> Self {
        FunctionSymbol { name: Arc::from(function.name()), base: function }
    }

    pub fn synonym(name: &str, function: BaseFunction) -> Self {
        FunctionSymbol { name: Arc::from(name), base: function }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn semantics(&self) -> BaseFunction {
        self.base
    }

    pub fn arity(&self) -> usize {
        self.base.arity()
    }

    pub fn is_synonym(&self) -> bool {
        &*self.name != self.base.name()
    }
}

impl From<BaseFunction> for FunctionSymbol {
    fn from(f: BaseFunction) -> Self {
        FunctionSymbol::base(f)
    }
}

impl fmt::Display for FunctionSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// The set of function names the tokenizer recognises.
#[derive(Clone, Debug)]
pub struct Lexicon {
    functions: HashMap<String, FunctionSymbol>,
}

impl Lexicon {
    /// Only the ten base functions.
    pub fn base() -> Self {
        let functions =
            BaseFunction::ALL.into_iter().map(|f| (f.name().to_string(), FunctionSymbol::base(f))).collect();
        Lexicon { functions }
    }

    /// Registers `name` as a synonym of `function`.
    pub fn register_synonym(&mut self, name: &str, function: BaseFunction) -> Result<(), LanguageError> {
        if !name.ends_with("_syn") {
            return Err(LanguageError::InvalidSynonym(name.to_string()));
        }
        match self.functions.get(name) {
            Some(existing) if existing.semantics() != function => Err(LanguageError::InvalidSynonym(name.to_string())),
            Some(_) => Ok(()),
            None => {
                self.functions.insert(name.to_string(), FunctionSymbol::synonym(name, function));
                Ok(())
            }
        }
    }

    pub fn with_synonyms<'a, I>(pairs: I) -> Result<Self, LanguageError>
    where
        I: IntoIterator<Item = (BaseFunction, &'a str)>,
    {
        let mut lexicon = Lexicon::base();
        for (function, name) in pairs {
            lexicon.register_synonym(name, function)?;
        }
        Ok(lexicon)
    }

    pub fn lookup(&self, name: &str) -> Option<&FunctionSymbol> {
        self.functions.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.functions.contains_key(name)
    }
}

impl Default for Lexicon {
    fn default() -> Self {
        Lexicon::base()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arities_match_classes() {
        for f in BaseFunction::UNARY {
            assert_eq!(f.arity(), 1);
        }
        for f in BaseFunction::BINARY {
            assert_eq!(f.arity(), 2);
        }
    }

    #[test]
    fn names_round_trip() {
        for f in BaseFunction::ALL {
            assert_eq!(BaseFunction::from_name(f.name()), Some(f));
        }
        assert_eq!(BaseFunction::from_name("swap_syn"), None);
    }

    #[test]
    fn synonym_shares_semantics() {
        let lexicon = Lexicon::with_synonyms([(BaseFunction::Swap, "swap_syn")]).unwrap();
        let syn = lexicon.lookup("swap_syn").unwrap();
        assert_eq!(syn.semantics(), BaseFunction::Swap);
        assert_eq!(syn.arity(), 1);
        assert!(syn.is_synonym());
        assert!(!lexicon.lookup("swap").unwrap().is_synonym());
    }

    #[test]
    fn synonym_names_must_end_in_syn() {
        let mut lexicon = Lexicon::base();
        assert!(lexicon.register_synonym("flip", BaseFunction::Swap).is_err());
        lexicon.register_synonym("swap_syn", BaseFunction::Swap).unwrap();
        assert!(lexicon.register_synonym("swap_syn", BaseFunction::Copy).is_err());
    }
}
