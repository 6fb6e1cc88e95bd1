//! Targeted probe corpora: minimal pairs that differ only in the outermost
//! function, and primitive samples with controlled argument lengths.

use std::collections::BTreeMap;

use rand::Rng;

use super::corpus::{Sample, UniquenessTracker};
use super::sampler::Shape;
use crate::language::{Alphabet, BaseFunction, LanguageError, SyntaxTree};

/// For every requested function, wraps the shared bases as its argument(s).
///
/// Unary functions use `unary_bases`; binary functions use the pairs in
/// `binary_bases`. Bases are shared, so corpora of one class differ only in
/// their first token.
pub fn make_function_difficulty_corpora(
    unary_bases: &[SyntaxTree],
    binary_bases: &[(SyntaxTree, SyntaxTree)],
    functions: &[BaseFunction],
) -> Result<BTreeMap<BaseFunction, Vec<Sample>>, LanguageError> {
    let mut out = BTreeMap::new();
    for &f in functions {
        let samples = if f.is_binary() {
            binary_bases
                .iter()
                .enumerate()
                .map(|(i, (a, b))| Sample::from_tree(i, SyntaxTree::apply(f, vec![a.clone(), b.clone()])?))
                .collect::<Result<Vec<_>, _>>()?
        } else {
            unary_bases
                .iter()
                .enumerate()
                .map(|(i, a)| Sample::from_tree(i, SyntaxTree::apply(f, vec![a.clone()])?))
                .collect::<Result<Vec<_>, _>>()?
        };
        out.insert(f, samples);
    }
    Ok(out)
}

/// Which argument of a binary function receives the long string.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LongArgument {
    #[default]
    First,
    Second,
}

/// Primitive samples for one function, bucketed by argument length.
#[derive(Clone, Debug)]
pub struct LengthProbe {
    pub function: BaseFunction,
    pub cells: Vec<(usize, Vec<Sample>)>,
}

/// `per_length` primitive samples of `function` for each argument length.
///
/// For binary functions only the argument chosen by `long` takes the probed
/// length; the other one gets a regular length in `1..=regular_max`.
#[allow(clippy::too_many_arguments)]
pub fn make_primitive_length_corpus<R: Rng + ?Sized>(
    function: BaseFunction,
    arg_lengths: &[usize],
    per_length: usize,
    long: LongArgument,
    regular_max: usize,
    alphabet: &Alphabet,
    rng: &mut R,
) -> Result<LengthProbe, LanguageError> {
    let mut tracker = UniquenessTracker::default();
    let mut cells = Vec::with_capacity(arg_lengths.len());
    let mut next_id = 0;
    for &len in arg_lengths {
        if len == 0 {
            return Err(LanguageError::EmptyArgument);
        }
        let mut samples = Vec::with_capacity(per_length);
        let mut attempts = 0;
        while samples.len() < per_length && attempts < per_length * 100 + 1000 {
            attempts += 1;
            let shape = if function.is_binary() {
                let other = rng.gen_range(1..=regular_max.max(1));
                let (first, second) = match long {
                    LongArgument::First => (len, other),
                    LongArgument::Second => (other, len),
                };
                Shape::Apply(function, vec![Shape::Leaf(first), Shape::Leaf(second)])
            } else {
                Shape::Apply(function, vec![Shape::Leaf(len)])
            };
            let Some(tree) = tracker.fill(&shape, alphabet, 20, rng) else {
                continue;
            };
            let sample = Sample::from_tree(next_id, tree)?;
            if !tracker.source_is_fresh(&sample.src_text()) {
                continue;
            }
            tracker.insert(&sample);
            samples.push(sample);
            next_id += 1;
        }
        cells.push((len, samples));
    }
    Ok(LengthProbe { function, cells })
}
