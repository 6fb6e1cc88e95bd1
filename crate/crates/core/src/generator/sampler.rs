use rand::Rng;

use super::GrammarParams;
use crate::language::{Alphabet, BaseFunction, SequenceStats, Symbol, SyntaxTree};
use crate::rng::categorical;

pub const DEFAULT_MAX_RECURSION: usize = 25;
pub const DEFAULT_MAX_FUNCTIONS: usize = 40;

/// Guards against runaway trees under arbitrary (possibly supercritical) parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SamplerLimits {
    /// S nodes at this depth (root = 0) are forced to be leaves.
    pub max_recursion: usize,
    /// Once this many functions exist in the tree, remaining S nodes become leaves.
    pub max_functions: usize,
}

impl Default for SamplerLimits {
    fn default() -> Self {
        SamplerLimits { max_recursion: DEFAULT_MAX_RECURSION, max_functions: DEFAULT_MAX_FUNCTIONS }
    }
}

/// A tree whose leaves hold only their length; symbols are filled in later.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shape {
    Apply(BaseFunction, Vec<Shape>),
    Leaf(usize),
}

impl Shape {
    pub fn leaf_lengths(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<usize>) {
        match self {
            Shape::Leaf(n) => out.push(*n),
            Shape::Apply(_, args) => args.iter().for_each(|a| a.collect_leaves(out)),
        }
    }

    /// Structural statistics of any tree filled from this shape.
    pub fn stats(&self) -> SequenceStats {
        match self {
            Shape::Leaf(n) => SequenceStats { length: *n, depth: 0, num_functions: 0 },
            Shape::Apply(_, args) => {
                let mut out = SequenceStats { length: args.len(), depth: 0, num_functions: 1 };
                for a in args {
                    let s = a.stats();
                    out.length += s.length;
                    out.num_functions += s.num_functions;
                    out.depth = out.depth.max(s.depth);
                }
                out.depth += 1;
                out
            }
        }
    }

    /// Replaces leaf lengths with symbols taken in order from `symbols`.
    pub fn fill(&self, symbols: &mut impl Iterator<Item = Vec<Symbol>>) -> SyntaxTree {
        match self {
            Shape::Leaf(_) => SyntaxTree::Leaf(symbols.next().expect("one symbol run per leaf")),
            Shape::Apply(f, args) => {
                SyntaxTree::Apply { func: (*f).into(), args: args.iter().map(|a| a.fill(symbols)).collect() }
            }
        }
    }
}

/// Top-down sampling of a tree shape; the root is always a function.
pub fn sample_shape<R: Rng + ?Sized>(params: &GrammarParams, limits: SamplerLimits, rng: &mut R) -> Shape {
    let unary = params.unary_weights();
    let binary = params.binary_weights();
    let mut functions = 0;
    expand(params, &unary, &binary, limits, 0, &mut functions, rng)
}

fn expand<R: Rng + ?Sized>(
    params: &GrammarParams,
    unary: &[f64],
    binary: &[f64],
    limits: SamplerLimits,
    depth: usize,
    functions: &mut usize,
    rng: &mut R,
) -> Shape {
    let forced_leaf = depth >= limits.max_recursion || *functions >= limits.max_functions;
    let choice = if forced_leaf {
        2
    } else if depth == 0 {
        if params.p_unary + params.p_binary > 0.0 {
            categorical(&[params.p_unary, params.p_binary], rng)
        } else {
            categorical(&[1.0, 1.0], rng)
        }
    } else {
        categorical(&[params.p_unary, params.p_binary, params.p_leaf], rng)
    };
    match choice {
        0 => {
            *functions += 1;
            let f = BaseFunction::UNARY[categorical(unary, rng)];
            let arg = expand(params, unary, binary, limits, depth + 1, functions, rng);
            Shape::Apply(f, vec![arg])
        }
        1 => {
            *functions += 1;
            let f = BaseFunction::BINARY[categorical(binary, rng)];
            let first = expand(params, unary, binary, limits, depth + 1, functions, rng);
            let second = expand(params, unary, binary, limits, depth + 1, functions, rng);
            Shape::Apply(f, vec![first, second])
        }
        _ => Shape::Leaf(1 + categorical(&params.arg_len_dist, rng)),
    }
}

/// Samples a complete tree; leaf symbols are distinct within the tree when the
/// alphabet is large enough.
pub fn sample_tree<R: Rng + ?Sized>(params: &GrammarParams, limits: SamplerLimits, rng: &mut R) -> SyntaxTree {
    let shape = sample_shape(params, limits, rng);
    fill_distinct(&shape, &Alphabet::standard(), rng)
}

/// Fills a shape with symbols, avoiding repeats inside the sample where possible.
pub fn fill_distinct<R: Rng + ?Sized>(shape: &Shape, alphabet: &Alphabet, rng: &mut R) -> SyntaxTree {
    let lengths = shape.leaf_lengths();
    let total: usize = lengths.iter().sum();
    let pool = alphabet.symbols();
    let drawn: Vec<Symbol> = if total <= pool.len() {
        rand::seq::index::sample(rng, pool.len(), total).into_iter().map(|i| pool[i]).collect()
    } else {
        (0..total).map(|_| pool[rng.gen_range(0..pool.len())]).collect()
    };
    let mut runs = Vec::with_capacity(lengths.len());
    let mut start = 0;
    for n in lengths {
        runs.push(drawn[start..start + n].to_vec());
        start += n;
    }
    shape.fill(&mut runs.into_iter())
}
