use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::sampler::{sample_shape, SamplerLimits, Shape};
use super::{GeneratorError, GrammarParams};
use crate::language::{
    evaluate, join_symbols, tokens_to_string, Alphabet, LanguageError, SequenceStats, Symbol, SyntaxTree, Token,
};

/// One aligned input/output pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sample {
    pub id: usize,
    pub src: Vec<Token>,
    pub tgt: Vec<Symbol>,
    pub tree: SyntaxTree,
    pub stats: SequenceStats,
}

impl Sample {
    /// Builds a sample whose target is the interpreter's meaning of `tree`.
    pub fn from_tree(id: usize, tree: SyntaxTree) -> Result<Self, LanguageError> {
        let tgt = evaluate(&tree)?;
        Ok(Sample { id, src: tree.render(), stats: tree.stats(), tgt, tree })
    }

    pub fn src_text(&self) -> String {
        tokens_to_string(&self.src)
    }

    pub fn tgt_text(&self) -> String {
        join_symbols(&self.tgt)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Splits {
    pub train: Vec<usize>,
    pub valid: Vec<usize>,
    pub test: Vec<usize>,
}

impl Splits {
    pub fn sizes(&self) -> (usize, usize, usize) {
        (self.train.len(), self.valid.len(), self.test.len())
    }
}

#[derive(Clone, Debug)]
pub struct Corpus {
    pub samples: Vec<Sample>,
    pub splits: Option<Splits>,
    pub seed: u64,
    pub params: GrammarParams,
}

impl Corpus {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Samples of a named split, in id order.
    pub fn split(&self, name: &str) -> Vec<&Sample> {
        let Some(splits) = &self.splits else {
            return Vec::new();
        };
        let ids = match name {
            "train" => &splits.train,
            "valid" => &splits.valid,
            "test" => &splits.test,
            _ => return Vec::new(),
        };
        ids.iter().map(|&id| &self.samples[id]).collect()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CorpusConfig {
    pub limits: SamplerLimits,
    /// Attempts at drawing fresh symbols for one leaf before the whole sample is rejected.
    pub leaf_retries: usize,
    /// Consecutive rejected samples tolerated before giving up.
    pub max_consecutive_rejections: usize,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig { limits: SamplerLimits::default(), leaf_retries: 50, max_consecutive_rejections: 20_000 }
    }
}

/// Tracks the corpus-wide uniqueness constraints: distinct inputs and
/// never-repeated multi-symbol string arguments.
#[derive(Clone, Debug, Default)]
pub struct UniquenessTracker {
    sources: HashSet<String>,
    arguments: HashSet<Vec<Symbol>>,
}

impl UniquenessTracker {
    pub fn from_samples<'a>(samples: impl IntoIterator<Item = &'a Sample>) -> Self {
        let mut tracker = UniquenessTracker::default();
        for s in samples {
            tracker.insert(s);
        }
        tracker
    }

    pub fn argument_is_fresh(&self, argument: &[Symbol]) -> bool {
        argument.len() < 2 || !self.arguments.contains(argument)
    }

    pub fn source_is_fresh(&self, src: &str) -> bool {
        !self.sources.contains(src)
    }

    pub fn insert(&mut self, sample: &Sample) {
        self.sources.insert(sample.src_text());
        for leaf in sample.tree.leaves() {
            if leaf.len() >= 2 {
                self.arguments.insert(leaf.to_vec());
            }
        }
    }

    /// Fills `shape` with symbols satisfying both constraints, or `None` if a
    /// leaf could not be filled within `retries` attempts.
    pub fn fill<R: Rng + ?Sized>(
        &self,
        shape: &Shape,
        alphabet: &Alphabet,
        retries: usize,
        rng: &mut R,
    ) -> Option<SyntaxTree> {
        let lengths = shape.leaf_lengths();
        let total: usize = lengths.iter().sum();
        let pool = alphabet.symbols();
        if total > pool.len() {
            return None;
        }
        let mut used: HashSet<Symbol> = HashSet::with_capacity(total);
        let mut runs = Vec::with_capacity(lengths.len());
        for n in lengths {
            let mut found = None;
            for _ in 0..retries.max(1) {
                let mut run = Vec::with_capacity(n);
                while run.len() < n {
                    let s = pool[rng.gen_range(0..pool.len())];
                    if !used.contains(&s) && !run.contains(&s) {
                        run.push(s);
                    }
                }
                if self.argument_is_fresh(&run) {
                    found = Some(run);
                    break;
                }
            }
            let run = found?;
            used.extend(run.iter().copied());
            runs.push(run);
        }
        Some(shape.fill(&mut runs.into_iter()))
    }
}

/// Draws samples until `n` distinct inputs have been collected under the
/// uniqueness constraints.
pub fn generate_corpus<R: Rng + ?Sized>(
    params: &GrammarParams,
    n: usize,
    alphabet: &Alphabet,
    config: CorpusConfig,
    seed: u64,
    rng: &mut R,
) -> Result<Corpus, GeneratorError> {
    params.validate()?;
    let mut tracker = UniquenessTracker::default();
    let samples = extend_unique(params, n, alphabet, config, &mut tracker, 0, rng)?;
    Ok(Corpus { samples, splits: None, seed, params: params.clone() })
}

/// Draws `n` more samples that respect (and are recorded in) `tracker`; ids
/// start at `first_id`.
pub fn extend_unique<R: Rng + ?Sized>(
    params: &GrammarParams,
    n: usize,
    alphabet: &Alphabet,
    config: CorpusConfig,
    tracker: &mut UniquenessTracker,
    first_id: usize,
    rng: &mut R,
) -> Result<Vec<Sample>, GeneratorError> {
    extend_unique_filtered(params, n, alphabet, config, tracker, first_id, &mut |_, _| true, rng)
}

/// Like [`extend_unique`], but each sampled shape must first pass `keep`.
///
/// Shapes rejected by `keep` do not count towards the rejection cap, which
/// only guards the uniqueness constraints.
#[allow(clippy::too_many_arguments)]
pub fn extend_unique_filtered<R: Rng + ?Sized>(
    params: &GrammarParams,
    n: usize,
    alphabet: &Alphabet,
    config: CorpusConfig,
    tracker: &mut UniquenessTracker,
    first_id: usize,
    keep: &mut dyn FnMut(&Shape, &mut R) -> bool,
    rng: &mut R,
) -> Result<Vec<Sample>, GeneratorError> {
    params.validate()?;
    let mut samples = Vec::with_capacity(n);
    let mut rejections = 0;
    while samples.len() < n {
        let shape = sample_shape(params, config.limits, rng);
        if !keep(&shape, rng) {
            continue;
        }
        let accepted = tracker
            .fill(&shape, alphabet, config.leaf_retries, rng)
            .map(|tree| Sample::from_tree(first_id + samples.len(), tree))
            .transpose()?
            .filter(|s| tracker.source_is_fresh(&s.src_text()));
        match accepted {
            Some(sample) => {
                tracker.insert(&sample);
                samples.push(sample);
                rejections = 0;
            }
            None => {
                rejections += 1;
                if rejections > config.max_consecutive_rejections {
                    return Err(GeneratorError::ExhaustedUniqueArguments { accepted: samples.len(), requested: n });
                }
            }
        }
    }
    Ok(samples)
}

/// Train/valid/test proportions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitFractions {
    pub train: f64,
    pub valid: f64,
    pub test: f64,
}

impl Default for SplitFractions {
    fn default() -> Self {
        SplitFractions { train: 0.85, valid: 0.05, test: 0.10 }
    }
}

impl SplitFractions {
    /// Floor-based sizes with the remainder going to train.
    pub fn sizes(&self, n: usize) -> Result<(usize, usize, usize), GeneratorError> {
        let parts = [self.train, self.valid, self.test];
        if parts.iter().any(|p| !(0.0..=1.0).contains(p)) || (parts.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(GeneratorError::InvalidFractions);
        }
        // the epsilon absorbs products like 100 * 0.1 landing just below an integer
        let floor = |f: f64| ((n as f64) * f + 1e-9).floor() as usize;
        let valid = floor(self.valid);
        let test = floor(self.test);
        Ok((n - valid - test, valid, test))
    }
}

/// Uniform random partition of sample ids.
pub fn split_corpus<R: Rng + ?Sized>(
    mut corpus: Corpus,
    fractions: SplitFractions,
    rng: &mut R,
) -> Result<Corpus, GeneratorError> {
    let (_, n_valid, n_test) = fractions.sizes(corpus.len())?;
    let mut ids: Vec<usize> = corpus.samples.iter().map(|s| s.id).collect();
    ids.shuffle(rng);
    let mut test = ids[..n_test].to_vec();
    let mut valid = ids[n_test..n_test + n_valid].to_vec();
    let mut train = ids[n_test + n_valid..].to_vec();
    train.sort_unstable();
    valid.sort_unstable();
    test.sort_unstable();
    corpus.splits = Some(Splits { train, valid, test });
    Ok(corpus)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    fn small_corpus(n: usize, seed: u64) -> Corpus {
        let params = GrammarParams::uniform(0.3, 0.15, 0.55);
        generate_corpus(&params, n, &Alphabet::standard(), CorpusConfig::default(), seed, &mut seeded(seed)).unwrap()
    }

    #[test]
    fn generates_requested_number_of_distinct_samples() {
        let corpus = small_corpus(3, 1);
        assert_eq!(corpus.len(), 3);
        let srcs: HashSet<String> = corpus.samples.iter().map(Sample::src_text).collect();
        assert_eq!(srcs.len(), 3);
    }

    #[test]
    fn targets_match_interpreter() {
        for s in small_corpus(500, 2).samples {
            assert_eq!(s.tgt, evaluate(&s.tree).unwrap());
            assert_eq!(s.src, s.tree.render());
            assert!(s.stats.num_functions >= 1);
        }
    }

    #[test]
    fn split_sizes_follow_floor_rule() {
        let f = SplitFractions::default();
        assert_eq!(f.sizes(100).unwrap(), (85, 5, 10));
        assert_eq!(f.sizes(1).unwrap(), (1, 0, 0));
        assert_eq!(f.sizes(99_990).unwrap(), (84_992, 4_999, 9_999));
        assert_eq!(f.sizes(100_000).unwrap(), (85_000, 5_000, 10_000));
        let bad = SplitFractions { train: 0.5, valid: 0.1, test: 0.1 };
        assert!(bad.sizes(10).is_err());
    }

    #[test]
    fn splits_are_a_disjoint_cover() {
        let corpus = split_corpus(small_corpus(100, 3), SplitFractions::default(), &mut seeded(9)).unwrap();
        let splits = corpus.splits.as_ref().unwrap();
        assert_eq!(splits.sizes(), (85, 5, 10));
        let mut all: Vec<usize> = splits.train.iter().chain(&splits.valid).chain(&splits.test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..100).collect::<Vec<_>>());
    }

    #[test]
    fn tiny_alphabet_exhausts() {
        let params = GrammarParams::uniform(0.3, 0.15, 0.55);
        let config = CorpusConfig { max_consecutive_rejections: 200, ..CorpusConfig::default() };
        let err = generate_corpus(&params, 10_000, &Alphabet::truncated(3), config, 0, &mut seeded(0)).unwrap_err();
        assert!(matches!(err, GeneratorError::ExhaustedUniqueArguments { .. }));
    }
}
