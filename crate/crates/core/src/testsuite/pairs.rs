use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::language::{BaseFunction, SyntaxTree, Token};

/// Two functions where `inner` is applied directly as the first argument of
/// `outer`, so their tokens are adjacent in the input.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HeldOutPair {
    pub outer: BaseFunction,
    pub inner: BaseFunction,
}

impl HeldOutPair {
    pub fn new(outer: BaseFunction, inner: BaseFunction) -> Self {
        HeldOutPair { outer, inner }
    }

    /// swap repeat, append remove_second, repeat remove_second, append swap.
    pub fn defaults() -> Vec<HeldOutPair> {
        use BaseFunction::*;
        vec![
            HeldOutPair::new(Swap, Repeat),
            HeldOutPair::new(Append, RemoveSecond),
            HeldOutPair::new(Repeat, RemoveSecond),
            HeldOutPair::new(Append, Swap),
        ]
    }
}

impl fmt::Display for HeldOutPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.outer, self.inner)
    }
}

impl FromStr for HeldOutPair {
    type Err = String;

    /// Accepts `outer inner`, `outer:inner` or `outer+inner`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> =
            s.split(|c: char| c.is_whitespace() || c == ':' || c == '+').filter(|p| !p.is_empty()).collect();
        let [outer, inner] = parts[..] else {
            return Err(format!("expected two function names in {s:?}"));
        };
        let lookup = |name: &str| BaseFunction::from_name(name).ok_or_else(|| format!("unknown function {name:?}"));
        Ok(HeldOutPair::new(lookup(outer)?, lookup(inner)?))
    }
}

/// True if some held-out pair appears as two adjacent function tokens.
///
/// Tokens are matched by name, so a synonym never stands in for its base.
pub fn contains_adjacent_pair(src: &[Token], pairs: &[HeldOutPair]) -> bool {
    src.windows(2).any(|w| match (&w[0], &w[1]) {
        (Token::Function(a), Token::Function(b)) => {
            pairs.iter().any(|p| a.name() == p.outer.name() && b.name() == p.inner.name())
        }
        _ => false,
    })
}

/// True if some held-out `inner` is applied directly as any argument of its
/// `outer`, including the second argument of a binary function.
pub fn composes_directly(tree: &SyntaxTree, pairs: &[HeldOutPair]) -> bool {
    tree.preorder().into_iter().any(|node| match node {
        SyntaxTree::Apply { func, args } => args.iter().any(|a| {
            a.function()
                .is_some_and(|g| pairs.iter().any(|p| func.name() == p.outer.name() && g.name() == p.inner.name()))
        }),
        SyntaxTree::Leaf(_) => false,
    })
}

/// Occurrences of function tokens with the given semantics, synonyms included.
pub fn count_functions<'a>(sources: impl IntoIterator<Item = &'a [Token]>, function: BaseFunction) -> usize {
    sources
        .into_iter()
        .flat_map(|src| src.iter())
        .filter(|t| t.as_function().is_some_and(|f| f.semantics() == function))
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::language::{parse, tokenize, Lexicon};

    fn tokens(text: &str) -> Vec<Token> {
        tokenize(text, &Lexicon::with_synonyms([(BaseFunction::Swap, "swap_syn")]).unwrap()).unwrap()
    }

    #[test]
    fn adjacency_is_token_order() {
        let pairs = HeldOutPair::defaults();
        assert!(contains_adjacent_pair(&tokens("reverse repeat remove_second A B , C D"), &pairs));
        assert!(!contains_adjacent_pair(&tokens("repeat reverse remove_second A B , C D"), &pairs));
        assert!(!contains_adjacent_pair(&tokens("append A , remove_second B , C"), &pairs));
        assert!(!contains_adjacent_pair(&tokens("append swap_syn A B"), &pairs));
        assert!(contains_adjacent_pair(&tokens("append swap A B , C"), &pairs));
    }

    #[test]
    fn direct_composition_includes_second_arguments() {
        let pairs = HeldOutPair::defaults();
        let tree = parse(&tokens("append A , remove_second B , C")).unwrap();
        assert!(composes_directly(&tree, &pairs));
        let tree = parse(&tokens("repeat reverse remove_second A B , C D")).unwrap();
        assert!(!composes_directly(&tree, &pairs));
    }

    #[test]
    fn pair_parsing() {
        assert_eq!("swap repeat".parse::<HeldOutPair>().unwrap(), HeldOutPair::defaults()[0]);
        assert_eq!("append:swap".parse::<HeldOutPair>().unwrap(), HeldOutPair::defaults()[3]);
        assert!("swap".parse::<HeldOutPair>().is_err());
        assert!("swap nope".parse::<HeldOutPair>().is_err());
    }

    #[test]
    fn counting_includes_synonyms() {
        let a = tokens("swap swap_syn A B");
        let b = tokens("copy swap C");
        assert_eq!(count_functions([a.as_slice(), b.as_slice()], BaseFunction::Swap), 3);
    }
}
