use std::collections::BTreeSet;
use std::fmt;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::pairs::count_functions;
use super::TestsuiteError;
use crate::generator::{GrammarParams, Sample, Shape, UniquenessTracker};
use crate::language::{join_symbols, Alphabet, BaseFunction, LanguageError, Symbol, SyntaxTree, Token};
use crate::rng::categorical;

/// Exception rates relative to the rarer function of a pair.
pub const EXCEPTION_PERCENTAGES: [f64; 4] = [0.0001, 0.0005, 0.001, 0.005];

/// `outer inner ⇒ remapped_outer remapped_inner`: wherever `inner` is the
/// first argument of `outer`, the pair is interpreted as the remapped one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExceptionPair {
    pub outer: BaseFunction,
    pub inner: BaseFunction,
    pub remapped_outer: BaseFunction,
    pub remapped_inner: BaseFunction,
}

impl ExceptionPair {
    pub fn new(
        (outer, inner): (BaseFunction, BaseFunction),
        (remapped_outer, remapped_inner): (BaseFunction, BaseFunction),
    ) -> Self {
        ExceptionPair { outer, inner, remapped_outer, remapped_inner }
    }

    pub fn defaults() -> Vec<ExceptionPair> {
        use BaseFunction::*;
        vec![
            ExceptionPair::new((Reverse, Echo), (Echo, Copy)),
            ExceptionPair::new((Prepend, RemoveFirst), (RemoveSecond, Append)),
            ExceptionPair::new((Echo, RemoveFirst), (Copy, Append)),
            ExceptionPair::new((Prepend, Reverse), (RemoveSecond, Echo)),
        ]
    }

    fn matches(&self, outer: BaseFunction, inner: BaseFunction) -> bool {
        self.outer == outer && self.inner == inner
    }
}

impl fmt::Display for ExceptionPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} => {} {}", self.outer, self.inner, self.remapped_outer, self.remapped_inner)
    }
}

/// Bottom-up evaluation in which every matching parent/first-child pair is
/// interpreted under its remapped functions. A node consumed as the inner half
/// of a pair does not also act as an outer function. Functions are matched by
/// semantics, so synonyms count as their base.
pub fn exception_evaluate(tree: &SyntaxTree, pairs: &[ExceptionPair]) -> Result<Vec<Symbol>, LanguageError> {
    match tree {
        SyntaxTree::Leaf(symbols) => Ok(symbols.clone()),
        SyntaxTree::Apply { func, args } => {
            let outer = func.semantics();
            let matched = args[0].function().and_then(|g| pairs.iter().find(|p| p.matches(outer, g.semantics())));
            let mut values = Vec::with_capacity(args.len());
            let applied = match (matched, &args[0]) {
                (Some(pair), SyntaxTree::Apply { args: inner_args, .. }) => {
                    let inner_values =
                        inner_args.iter().map(|a| exception_evaluate(a, pairs)).collect::<Result<Vec<_>, _>>()?;
                    let refs: Vec<&[Symbol]> = inner_values.iter().map(Vec::as_slice).collect();
                    values.push(pair.remapped_inner.apply(&refs)?);
                    pair.remapped_outer
                }
                _ => {
                    values.push(exception_evaluate(&args[0], pairs)?);
                    outer
                }
            };
            for a in &args[1..] {
                values.push(exception_evaluate(a, pairs)?);
            }
            let refs: Vec<&[Symbol]> = values.iter().map(Vec::as_slice).collect();
            applied.apply(&refs)
        }
    }
}

/// One training sample whose target was replaced by its exception meaning.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceptionEntry {
    pub src: String,
    pub original_tgt: String,
    pub exception_tgt: String,
    pub pair: ExceptionPair,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExceptionAudit {
    pub pair: ExceptionPair,
    pub outer_occurrences: usize,
    pub inner_occurrences: usize,
    /// `round(percentage × min(outer, inner))`.
    pub required: usize,
    pub existing: usize,
    pub synthesized: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExceptionSet {
    pub percentage: f64,
    pub entries: Vec<ExceptionEntry>,
    pub audit: Vec<ExceptionAudit>,
}

fn adjacent_by_semantics(src: &[Token], pair: &ExceptionPair) -> bool {
    src.windows(2).any(|w| match (&w[0], &w[1]) {
        (Token::Function(a), Token::Function(b)) => pair.matches(a.semantics(), b.semantics()),
        _ => false,
    })
}

fn exception_target(sample: &Sample, pair: &ExceptionPair) -> Result<Option<Vec<Symbol>>, LanguageError> {
    if !adjacent_by_semantics(&sample.src, pair) {
        return Ok(None);
    }
    let tgt = exception_evaluate(&sample.tree, std::slice::from_ref(pair))?;
    Ok((tgt != sample.tgt).then_some(tgt))
}

fn entry(sample: &Sample, exception_tgt: &[Symbol], pair: ExceptionPair) -> ExceptionEntry {
    ExceptionEntry {
        src: sample.src_text(),
        original_tgt: sample.tgt_text(),
        exception_tgt: join_symbols(exception_tgt),
        pair,
    }
}

/// Turns a small number of training samples per pair into exceptions.
///
/// Per pair, `k = round(percentage × min(count(outer), count(inner)))` with
/// counts taken over the unmodified training set. Existing samples containing
/// the pair (and whose meaning actually changes) are preferred; if there are
/// fewer than `k`, fresh primitive compositions of the pair are added. A
/// sample is used for at most one pair and its exception target applies only
/// that pair's rule.
#[allow(clippy::too_many_arguments)]
pub fn exceptions_apply<R: Rng + ?Sized>(
    train: &[Sample],
    pairs: &[ExceptionPair],
    percentage: f64,
    params: &GrammarParams,
    alphabet: &Alphabet,
    tracker: &mut UniquenessTracker,
    rng: &mut R,
) -> Result<(Vec<Sample>, ExceptionSet), TestsuiteError> {
    if !(0.0..=1.0).contains(&percentage) {
        return Err(TestsuiteError::InvalidFraction(percentage));
    }
    let mut out = train.to_vec();
    let mut claimed = BTreeSet::new();
    let mut entries = Vec::new();
    let mut audit = Vec::new();
    let mut next_id = train.iter().map(|s| s.id + 1).max().unwrap_or(0);
    for pair in pairs {
        let outer_occurrences = count_functions(train.iter().map(|s| s.src.as_slice()), pair.outer);
        let inner_occurrences = count_functions(train.iter().map(|s| s.src.as_slice()), pair.inner);
        let required = (percentage * outer_occurrences.min(inner_occurrences) as f64).round() as usize;
        let mut candidates = Vec::new();
        for (i, s) in train.iter().enumerate() {
            if claimed.contains(&i) {
                continue;
            }
            if let Some(tgt) = exception_target(s, pair)? {
                candidates.push((i, tgt));
            }
        }
        let existing = required.min(candidates.len());
        let mut picked: Vec<usize> = sample(rng, candidates.len(), existing).into_vec();
        picked.sort_unstable();
        for j in picked {
            let (i, tgt) = &candidates[j];
            claimed.insert(*i);
            entries.push(entry(&out[*i], tgt, *pair));
            out[*i].tgt = tgt.clone();
        }
        let mut synthesized = 0;
        let mut failures = 0;
        while existing + synthesized < required {
            match synthesize(pair, next_id, params, alphabet, tracker, rng)? {
                Some((mut s, tgt)) => {
                    tracker.insert(&s);
                    entries.push(entry(&s, &tgt, *pair));
                    s.tgt = tgt;
                    out.push(s);
                    next_id += 1;
                    synthesized += 1;
                }
                None => {
                    failures += 1;
                    if failures > 10_000 {
                        return Err(TestsuiteError::SynthesisFailed(pair.to_string()));
                    }
                }
            }
        }
        audit.push(ExceptionAudit {
            pair: *pair,
            outer_occurrences,
            inner_occurrences,
            required,
            existing,
            synthesized,
        });
    }
    Ok((out, ExceptionSet { percentage, entries, audit }))
}

/// A fresh `outer inner …` sample whose exception meaning differs from its
/// regular one, or `None` if this attempt failed.
fn synthesize<R: Rng + ?Sized>(
    pair: &ExceptionPair,
    id: usize,
    params: &GrammarParams,
    alphabet: &Alphabet,
    tracker: &UniquenessTracker,
    rng: &mut R,
) -> Result<Option<(Sample, Vec<Symbol>)>, LanguageError> {
    let mut leaf = || Shape::Leaf(categorical(&params.arg_len_dist, rng) + 1);
    let inner_args = (0..pair.inner.arity()).map(|_| leaf()).collect();
    let mut outer_args = vec![Shape::Apply(pair.inner, inner_args)];
    outer_args.extend((1..pair.outer.arity()).map(|_| leaf()));
    let shape = Shape::Apply(pair.outer, outer_args);
    let Some(tree) = tracker.fill(&shape, alphabet, 50, rng) else {
        return Ok(None);
    };
    let s = Sample::from_tree(id, tree)?;
    if !tracker.source_is_fresh(&s.src_text()) {
        return Ok(None);
    }
    Ok(exception_target(&s, pair)?.map(|tgt| (s, tgt)))
}
