use super::{BaseFunction, FunctionSymbol, LanguageError, Symbol, SyntaxTree};

impl BaseFunction {
    /// Applies the string edit to already-evaluated arguments.
    pub fn apply(self, args: &[&[Symbol]]) -> Result<Vec<Symbol>, LanguageError> {
        if args.len() != self.arity() {
            return Err(LanguageError::ArityMismatch {
                function: self.name().to_string(),
                expected: self.arity(),
                found: args.len(),
            });
        }
        if args.iter().any(|a| a.is_empty()) {
            return Err(LanguageError::EmptyArgument);
        }
        let x = args[0];
        let out = match self {
            BaseFunction::Copy => x.to_vec(),
            BaseFunction::Reverse => x.iter().rev().copied().collect(),
            BaseFunction::Shift => {
                let mut v = x[1..].to_vec();
                v.push(x[0]);
                v
            }
            BaseFunction::Swap => {
                let mut v = x.to_vec();
                let last = v.len() - 1;
                v.swap(0, last);
                v
            }
            BaseFunction::Repeat => x.iter().chain(x).copied().collect(),
            BaseFunction::Echo => {
                let mut v = x.to_vec();
                v.push(x[x.len() - 1]);
                v
            }
            BaseFunction::Append => x.iter().chain(args[1]).copied().collect(),
            BaseFunction::Prepend => args[1].iter().chain(x).copied().collect(),
            BaseFunction::RemoveFirst => args[1].to_vec(),
            BaseFunction::RemoveSecond => x.to_vec(),
        };
        Ok(out)
    }
}

pub fn apply_function(func: &FunctionSymbol, args: &[&[Symbol]]) -> Result<Vec<Symbol>, LanguageError> {
    func.semantics().apply(args)
}

/// Ground-truth meaning of a tree, computed bottom-up.
pub fn evaluate(tree: &SyntaxTree) -> Result<Vec<Symbol>, LanguageError> {
    match tree {
        SyntaxTree::Leaf(symbols) => {
            if symbols.is_empty() {
                return Err(LanguageError::EmptyArgument);
            }
            Ok(symbols.clone())
        }
        SyntaxTree::Apply { func, args } => {
            let values = args.iter().map(evaluate).collect::<Result<Vec<_>, _>>()?;
            let views: Vec<&[Symbol]> = values.iter().map(Vec::as_slice).collect();
            apply_function(func, &views)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::language::{join_symbols, parse, parse_symbols, tokenize, Lexicon};

    fn eval_text(text: &str) -> String {
        let tree = parse(&tokenize(text, &Lexicon::base()).unwrap()).unwrap();
        join_symbols(&evaluate(&tree).unwrap())
    }

    fn apply_text(f: BaseFunction, args: &[&str]) -> String {
        let parsed: Vec<Vec<Symbol>> = args.iter().map(|a| parse_symbols(a).unwrap()).collect();
        let views: Vec<&[Symbol]> = parsed.iter().map(Vec::as_slice).collect();
        join_symbols(&f.apply(&views).unwrap())
    }

    #[test]
    fn worked_examples() {
        assert_eq!(eval_text("repeat A B C"), "A B C A B C");
        assert_eq!(eval_text("echo remove_first D K , E F"), "E F F");
        assert_eq!(eval_text("append swap F G H , repeat I J"), "H G F I J I J");
        assert_eq!(eval_text("A B"), "A B");
    }

    #[test]
    fn each_definition() {
        use BaseFunction::*;
        assert_eq!(apply_text(Copy, &["A B C D"]), "A B C D");
        assert_eq!(apply_text(Reverse, &["A B C D"]), "D C B A");
        assert_eq!(apply_text(Shift, &["A B C D"]), "B C D A");
        assert_eq!(apply_text(Swap, &["A B C D"]), "D B C A");
        assert_eq!(apply_text(Repeat, &["A B"]), "A B A B");
        assert_eq!(apply_text(Echo, &["A B C D"]), "A B C D D");
        assert_eq!(apply_text(Append, &["A B", "C"]), "A B C");
        assert_eq!(apply_text(Prepend, &["A B", "C"]), "C A B");
        assert_eq!(apply_text(RemoveFirst, &["A B", "C"]), "C");
        assert_eq!(apply_text(RemoveSecond, &["A B", "C"]), "A B");
    }

    #[test]
    fn degenerate_single_symbol_arguments() {
        use BaseFunction::*;
        assert_eq!(apply_text(Swap, &["A"]), "A");
        assert_eq!(apply_text(Shift, &["A"]), "A");
        assert_eq!(apply_text(Echo, &["A"]), "A A");
        assert_eq!(apply_text(Swap, &["A B"]), "B A");
    }

    /// Index-formula reading of the definitions, used as an independent check.
    fn by_index(f: BaseFunction, x: &[Symbol]) -> Vec<Symbol> {
        let n = x.len();
        let idx: Vec<usize> = match f {
            BaseFunction::Copy => (0..n).collect(),
            BaseFunction::Reverse => (0..n).rev().collect(),
            BaseFunction::Shift => (1..n).chain([0]).collect(),
            BaseFunction::Swap if n == 1 => vec![0],
            BaseFunction::Swap => [n - 1].into_iter().chain(1..n - 1).chain([0]).collect(),
            BaseFunction::Repeat => (0..n).chain(0..n).collect(),
            BaseFunction::Echo => (0..n).chain([n - 1]).collect(),
            _ => unreachable!(),
        };
        idx.into_iter().map(|i| x[i]).collect()
    }

    #[test]
    fn unary_functions_agree_with_index_formulas() {
        let symbols: Vec<Symbol> = (0..7).map(|i| Symbol::from_index(i).unwrap()).collect();
        for n in 1..=7 {
            for f in BaseFunction::UNARY {
                assert_eq!(f.apply(&[&symbols[..n]]).unwrap(), by_index(f, &symbols[..n]), "{f} n={n}");
            }
        }
    }

    #[test]
    fn argument_errors() {
        let a = parse_symbols("A").unwrap();
        assert!(matches!(
            BaseFunction::Append.apply(&[&a]),
            Err(LanguageError::ArityMismatch { expected: 2, found: 1, .. })
        ));
        assert_eq!(BaseFunction::Copy.apply(&[&[]]), Err(LanguageError::EmptyArgument));
        assert_eq!(BaseFunction::Append.apply(&[&a, &[]]), Err(LanguageError::EmptyArgument));
    }
}
