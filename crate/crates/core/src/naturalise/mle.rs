use std::collections::BTreeMap;

use crate::generator::{GrammarParams, DEFAULT_MAX_ARG_LEN};
use crate::language::{BaseFunction, SyntaxTree};

/// Raw production counts gathered from trees.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProductionCounts {
    /// Expansion choices (unary, binary, leaf) at non-root S nodes.
    pub expansions: [u64; 3],
    pub functions: BTreeMap<BaseFunction, u64>,
    /// `arg_lengths[k]` counts leaves with `k + 1` symbols.
    pub arg_lengths: Vec<u64>,
}

impl ProductionCounts {
    pub fn add_tree(&mut self, tree: &SyntaxTree) {
        self.visit(tree, true);
    }

    fn visit(&mut self, node: &SyntaxTree, root: bool) {
        match node {
            SyntaxTree::Leaf(symbols) => {
                if !root {
                    self.expansions[2] += 1;
                }
                let k = symbols.len();
                if self.arg_lengths.len() < k {
                    self.arg_lengths.resize(k, 0);
                }
                self.arg_lengths[k - 1] += 1;
            }
            SyntaxTree::Apply { func, args } => {
                let f = func.semantics();
                if !root {
                    self.expansions[usize::from(f.is_binary())] += 1;
                }
                *self.functions.entry(f).or_default() += 1;
                for a in args {
                    self.visit(a, false);
                }
            }
        }
    }
}

/// Relative frequencies with add-one smoothing applied to zero cells.
fn smoothed(counts: &[u64]) -> Vec<f64> {
    let adjusted: Vec<f64> = counts.iter().map(|&c| if c == 0 { 1.0 } else { c as f64 }).collect();
    let total: f64 = adjusted.iter().sum();
    adjusted.into_iter().map(|c| c / total).collect()
}

/// Maximum-likelihood grammar parameters from observed trees.
///
/// The root is always a function, so its expansion choice carries no
/// information about the leaf probability and is left out of the expansion counts.
pub fn mle_estimate<'a>(trees: impl IntoIterator<Item = &'a SyntaxTree>) -> GrammarParams {
    let mut counts = ProductionCounts::default();
    for t in trees {
        counts.add_tree(t);
    }
    params_from_counts(&counts)
}

pub fn params_from_counts(counts: &ProductionCounts) -> GrammarParams {
    let expansion = smoothed(&counts.expansions);
    let mut fn_weights = BTreeMap::new();
    for class in [&BaseFunction::UNARY[..], &BaseFunction::BINARY[..]] {
        let raw: Vec<u64> = class.iter().map(|f| counts.functions.get(f).copied().unwrap_or(0)).collect();
        for (f, p) in class.iter().zip(smoothed(&raw)) {
            fn_weights.insert(*f, p);
        }
    }
    let max_arg_len = counts.arg_lengths.len().max(DEFAULT_MAX_ARG_LEN);
    let mut lengths = counts.arg_lengths.clone();
    lengths.resize(max_arg_len, 0);
    GrammarParams {
        p_unary: expansion[0],
        p_binary: expansion[1],
        p_leaf: expansion[2],
        fn_weights,
        arg_len_dist: smoothed(&lengths),
        max_arg_len,
    }
}
