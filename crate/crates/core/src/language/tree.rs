use std::fmt;

use serde::{Deserialize, Serialize};

use super::{tokens_to_string, FunctionSymbol, LanguageError, Symbol, Token};

/// Parsed structure of an input sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SyntaxTree {
    Apply { func: FunctionSymbol, args: Vec<SyntaxTree> },
    Leaf(Vec<Symbol>),
}

impl SyntaxTree {
    /// Builds an application node, checking the argument count.
    pub fn apply(func: impl Into<FunctionSymbol>, args: Vec<SyntaxTree>) -> Result<Self, LanguageError> {
        let func = func.into();
        if args.len() != func.arity() {
            return Err(LanguageError::ArityMismatch {
                function: func.name().to_string(),
                expected: func.arity(),
                found: args.len(),
            });
        }
        Ok(SyntaxTree::Apply { func, args })
    }

    /// Builds a leaf; the symbol list must be non-empty.
    pub fn leaf(symbols: Vec<Symbol>) -> Result<Self, LanguageError> {
        if symbols.is_empty() {
            return Err(LanguageError::EmptyArgument);
        }
        Ok(SyntaxTree::Leaf(symbols))
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, SyntaxTree::Leaf(_))
    }

    pub fn function(&self) -> Option<&FunctionSymbol> {
        match self {
            SyntaxTree::Apply { func, .. } => Some(func),
            SyntaxTree::Leaf(_) => None,
        }
    }

    /// Prefix-order token serialization.
    pub fn render(&self) -> Vec<Token> {
        let mut out = Vec::new();
        self.render_into(&mut out);
        out
    }

    fn render_into(&self, out: &mut Vec<Token>) {
        match self {
            SyntaxTree::Leaf(symbols) => out.extend(symbols.iter().copied().map(Token::Literal)),
            SyntaxTree::Apply { func, args } => {
                out.push(Token::Function(func.clone()));
                for (i, arg) in args.iter().enumerate() {
                    if i > 0 {
                        out.push(Token::Separator);
                    }
                    arg.render_into(out);
                }
            }
        }
    }

    pub fn stats(&self) -> SequenceStats {
        let mut length = 0;
        let mut num_functions = 0;
        let depth = self.walk_stats(&mut length, &mut num_functions);
        SequenceStats { length, depth, num_functions }
    }

    fn walk_stats(&self, length: &mut usize, num_functions: &mut usize) -> usize {
        match self {
            SyntaxTree::Leaf(symbols) => {
                *length += symbols.len();
                0
            }
            SyntaxTree::Apply { args, .. } => {
                *num_functions += 1;
                // the function token plus one separator between arguments
                *length += args.len();
                let deepest = args.iter().map(|a| a.walk_stats(length, num_functions)).max().unwrap_or(0);
                deepest + 1
            }
        }
    }

    /// Visits every node in prefix order.
    pub fn preorder(&self) -> Vec<&SyntaxTree> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(node) = stack.pop() {
            out.push(node);
            if let SyntaxTree::Apply { args, .. } = node {
                stack.extend(args.iter().rev());
            }
        }
        out
    }

    pub fn leaves(&self) -> impl Iterator<Item = &[Symbol]> {
        self.preorder().into_iter().filter_map(|n| match n {
            SyntaxTree::Leaf(s) => Some(s.as_slice()),
            _ => None,
        })
    }

    /// The node reached by following child indices from the root.
    pub fn node_at(&self, path: &[usize]) -> Option<&SyntaxTree> {
        let mut node = self;
        for &i in path {
            match node {
                SyntaxTree::Apply { args, .. } => node = args.get(i)?,
                SyntaxTree::Leaf(_) => return None,
            }
        }
        Some(node)
    }

    pub fn node_at_mut(&mut self, path: &[usize]) -> Option<&mut SyntaxTree> {
        let mut node = self;
        for &i in path {
            match node {
                SyntaxTree::Apply { args, .. } => node = args.get_mut(i)?,
                SyntaxTree::Leaf(_) => return None,
            }
        }
        Some(node)
    }
}

impl fmt::Display for SyntaxTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&tokens_to_string(&self.render()))
    }
}

/// Structural size measures of one input sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SequenceStats {
    /// Token count, separators included.
    pub length: usize,
    /// Maximum number of function applications on a root-to-leaf path.
    pub depth: usize,
    pub num_functions: usize,
}

/// Recursive-descent parse of a complete token list.
pub fn parse(tokens: &[Token]) -> Result<SyntaxTree, LanguageError> {
    if tokens.is_empty() {
        return Err(LanguageError::UnexpectedEnd);
    }
    let mut parser = Parser { tokens, pos: 0 };
    let tree = parser.sequence()?;
    if parser.pos != tokens.len() {
        return Err(LanguageError::UnexpectedToken { position: parser.pos, token: tokens[parser.pos].to_string() });
    }
    Ok(tree)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
}

impl Parser<'_> {
    fn sequence(&mut self) -> Result<SyntaxTree, LanguageError> {
        match self.tokens.get(self.pos) {
            None => Err(LanguageError::UnexpectedEnd),
            Some(Token::Separator) => Err(self.unexpected()),
            Some(Token::Function(func)) => {
                let func = func.clone();
                self.pos += 1;
                let mut args = Vec::with_capacity(func.arity());
                args.push(self.sequence()?);
                if func.arity() == 2 {
                    match self.tokens.get(self.pos) {
                        Some(Token::Separator) => self.pos += 1,
                        Some(_) => return Err(self.unexpected()),
                        None => return Err(LanguageError::UnexpectedEnd),
                    }
                    args.push(self.sequence()?);
                }
                Ok(SyntaxTree::Apply { func, args })
            }
            Some(Token::Literal(_)) => {
                let mut symbols = Vec::new();
                while let Some(Token::Literal(s)) = self.tokens.get(self.pos) {
                    symbols.push(*s);
                    self.pos += 1;
                }
                Ok(SyntaxTree::Leaf(symbols))
            }
        }
    }

    fn unexpected(&self) -> LanguageError {
        LanguageError::UnexpectedToken { position: self.pos, token: self.tokens[self.pos].to_string() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::language::{tokenize, BaseFunction, Lexicon};

    fn parse_text(text: &str) -> Result<SyntaxTree, LanguageError> {
        parse(&tokenize(text, &Lexicon::base())?)
    }

    fn leaf(text: &str) -> SyntaxTree {
        SyntaxTree::Leaf(text.split(' ').map(|s| s.parse().unwrap()).collect())
    }

    fn app(f: BaseFunction, args: Vec<SyntaxTree>) -> SyntaxTree {
        SyntaxTree::apply(f, args).unwrap()
    }

    #[test]
    fn parses_nested_unary_over_binary() {
        let tree = parse_text("echo remove_first D K , E F").unwrap();
        let expected = app(BaseFunction::Echo, vec![app(BaseFunction::RemoveFirst, vec![leaf("D K"), leaf("E F")])]);
        assert_eq!(tree, expected);
    }

    #[test]
    fn parses_bare_literal() {
        assert_eq!(parse_text("A").unwrap(), leaf("A"));
    }

    #[test]
    fn parses_binary_with_function_arguments() {
        let tree = parse_text("append swap F G H , repeat I J").unwrap();
        let expected = app(
            BaseFunction::Append,
            vec![app(BaseFunction::Swap, vec![leaf("F G H")]), app(BaseFunction::Repeat, vec![leaf("I J")])],
        );
        assert_eq!(tree, expected);
    }

    #[test]
    fn parse_errors() {
        assert_eq!(parse(&[]).unwrap_err(), LanguageError::UnexpectedEnd);
        assert_eq!(parse_text("copy").unwrap_err(), LanguageError::UnexpectedEnd);
        assert_eq!(parse_text("append A B").unwrap_err(), LanguageError::UnexpectedEnd);
        assert!(matches!(parse_text(", A").unwrap_err(), LanguageError::UnexpectedToken { position: 0, .. }));
        assert!(matches!(parse_text("copy A , B").unwrap_err(), LanguageError::UnexpectedToken { position: 2, .. }));
        assert!(matches!(
            parse_text("append A copy B , C").unwrap_err(),
            LanguageError::UnexpectedToken { position: 2, .. }
        ));
        assert!(matches!(
            parse_text("append , A , B").unwrap_err(),
            LanguageError::UnexpectedToken { position: 1, .. }
        ));
    }

    #[test]
    fn renders_prefix_order() {
        let tree = app(
            BaseFunction::Repeat,
            vec![app(BaseFunction::Reverse, vec![app(BaseFunction::RemoveSecond, vec![leaf("A B"), leaf("C D")])])],
        );
        assert_eq!(tree.to_string(), "repeat reverse remove_second A B , C D");
        assert_eq!(app(BaseFunction::Repeat, vec![leaf("A B C")]).to_string(), "repeat A B C");
        assert_eq!(leaf("A").to_string(), "A");
    }

    #[test]
    fn stats_by_hand() {
        let s = parse_text("echo remove_first D K , E F").unwrap().stats();
        assert_eq!(s, SequenceStats { length: 7, depth: 2, num_functions: 2 });
        let s = parse_text("A B").unwrap().stats();
        assert_eq!(s, SequenceStats { length: 2, depth: 0, num_functions: 0 });
        let s = parse_text("append swap F G H , repeat I J").unwrap().stats();
        assert_eq!(s, SequenceStats { length: 9, depth: 2, num_functions: 3 });
        let s = parse_text("copy A").unwrap().stats();
        assert_eq!(s, SequenceStats { length: 2, depth: 1, num_functions: 1 });
    }

    #[test]
    fn constructors_enforce_invariants() {
        assert!(SyntaxTree::apply(BaseFunction::Append, vec![leaf("A")]).is_err());
        assert!(SyntaxTree::leaf(vec![]).is_err());
    }

    #[test]
    fn node_paths() {
        let tree = parse_text("append swap F G H , repeat I J").unwrap();
        assert_eq!(tree.node_at(&[1, 0]).unwrap(), &leaf("I J"));
        assert!(tree.node_at(&[2]).is_none());
        assert_eq!(tree.leaves().count(), 2);
    }
}
