use rand::Rng;
use serde::{Deserialize, Serialize};

use super::gaussian::{fit_gaussian_discretised, fit_spec_discretised, kl_gaussian, GaussianFit};
use super::matched::generate_matched_corpus;
use super::mle::mle_estimate;
use super::partition::{subsample_to_match, PartitionConfig};
use super::{DistributionSpec, NaturaliseError};
use crate::generator::{sample_tree, Corpus, CorpusConfig, GrammarParams, Sample, SamplerLimits, DEFAULT_MAX_ARG_LEN};
use crate::language::{Alphabet, BaseFunction, SyntaxTree};
use crate::rng::{dirichlet_uniform, substream};

/// (length, depth) of every sample, in order.
pub fn extract_features(samples: &[Sample]) -> Vec<(usize, usize)> {
    samples.iter().map(|s| (s.stats.length, s.stats.depth)).collect()
}

fn tree_features(trees: &[SyntaxTree]) -> Vec<(usize, usize)> {
    trees
        .iter()
        .map(|t| {
            let s = t.stats();
            (s.length, s.depth)
        })
        .collect()
}

/// Grammar parameters with expansion and argument-length probabilities drawn
/// from a symmetric Dirichlet(1); function weights stay uniform.
pub fn random_params<R: Rng + ?Sized>(rng: &mut R) -> GrammarParams {
    let expansion = dirichlet_uniform(3, rng);
    let mut params = GrammarParams::uniform(expansion[0], expansion[1], expansion[2]);
    params.arg_len_dist = dirichlet_uniform(DEFAULT_MAX_ARG_LEN, rng);
    params
}

/// One tree per instance, each under freshly drawn random parameters.
pub fn random_probability_sample<R: Rng + ?Sized>(n: usize, limits: SamplerLimits, rng: &mut R) -> Vec<SyntaxTree> {
    (0..n)
        .map(|_| {
            let params = random_params(rng);
            sample_tree(&params, limits, rng)
        })
        .collect()
}

/// Result of evaluating one increment configuration.
#[derive(Clone, Debug)]
pub struct Selection {
    pub config: PartitionConfig,
    pub indices: Vec<usize>,
    pub kl: f64,
}

/// Runs the cell-matching subsample for every candidate configuration and
/// keeps the one whose Gaussian fit is closest to the natural histogram's.
///
/// Candidates that fail (empty anchor cell, degenerate fit) are skipped; the
/// first error is returned only if every candidate fails. Ties keep the
/// earlier candidate.
pub fn select_increments(
    features: &[(usize, usize)],
    natural: &DistributionSpec,
    candidates: &[PartitionConfig],
    seed: u64,
) -> Result<Selection, NaturaliseError> {
    if candidates.is_empty() {
        return Err(NaturaliseError::NoCandidates);
    }
    let target = fit_spec_discretised(natural)?;
    let mut best: Option<Selection> = None;
    let mut first_error = None;
    for (i, config) in candidates.iter().enumerate() {
        let mut rng = substream(seed, i as u64);
        let attempt = subsample_to_match(features, natural, *config, &mut rng).and_then(|indices| {
            let picked: Vec<(usize, usize)> = indices.iter().map(|&j| features[j]).collect();
            let kl = kl_gaussian(&fit_gaussian_discretised(&picked)?, &target)?;
            Ok(Selection { config: *config, indices, kl })
        });
        match attempt {
            Ok(sel) => {
                if best.as_ref().is_none_or(|b| sel.kl < b.kl) {
                    best = Some(sel);
                }
            }
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    best.ok_or_else(|| first_error.expect("at least one candidate was tried"))
}

/// KL divergence of the Gaussian fit of `features` from the natural histogram's fit.
pub fn kl_to_spec(features: &[(usize, usize)], natural: &DistributionSpec) -> Result<f64, NaturaliseError> {
    kl_gaussian(&fit_gaussian_discretised(features)?, &fit_spec_discretised(natural)?)
}

#[derive(Clone, Debug)]
pub struct NaturaliseConfig {
    pub candidates: Vec<PartitionConfig>,
    /// Size of the random-parameter sample and of each regenerated sample.
    pub sample_size: usize,
    /// Size of the final corpus generated under the fitted parameters.
    pub output_size: usize,
    /// Shapes drawn to estimate the final corpus's per-cell acceptance rates.
    pub pilot_size: usize,
    pub epsilon: f64,
    pub max_iters: usize,
    pub limits: SamplerLimits,
    pub corpus: CorpusConfig,
}

impl Default for NaturaliseConfig {
    fn default() -> Self {
        NaturaliseConfig {
            candidates: PartitionConfig::default_grid(),
            sample_size: 100_000,
            output_size: 10_000,
            pilot_size: 200_000,
            epsilon: 1e-3,
            max_iters: 5,
            limits: SamplerLimits::default(),
            corpus: CorpusConfig::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    /// KL of the whole sample (iteration 0: the raw random sample).
    pub kl: f64,
    /// Increments chosen for this sample.
    pub increments: PartitionConfig,
    /// KL of the matched subsample under those increments.
    pub subsample_kl: f64,
    pub subsample_size: usize,
}

#[derive(Clone, Debug)]
pub struct NaturaliseOutcome {
    pub params: GrammarParams,
    pub increments: PartitionConfig,
    pub corpus: Corpus,
    /// Row 0 describes the raw random sample; later rows are accepted iterations.
    pub trace: Vec<TraceRow>,
    pub final_kl: f64,
    pub target: GaussianFit,
}

impl NaturaliseOutcome {
    pub fn initial_kl(&self) -> f64 {
        self.trace[0].kl
    }
}

/// Random sample → increment selection → MLE refit → regenerate, repeated
/// until the matched-subsample KL improves by less than `epsilon` or
/// `max_iters` is reached. The output corpus is drawn from the last accepted
/// parameters and thinned with its increments.
///
/// An iteration whose matched KL is worse than the previous one is discarded
/// and ends the loop.
pub fn naturalise_pipeline(
    natural: &DistributionSpec,
    config: &NaturaliseConfig,
    alphabet: &Alphabet,
    seed: u64,
) -> Result<NaturaliseOutcome, NaturaliseError> {
    let target = fit_spec_discretised(natural)?;
    let mut rng = substream(seed, 0);
    let mut current = random_probability_sample(config.sample_size, config.limits, &mut rng);
    let features = tree_features(&current);
    let initial_kl = kl_gaussian(&fit_gaussian_discretised(&features)?, &target)?;
    let mut selection = select_increments(&features, natural, &config.candidates, rng.gen())?;
    let mut trace = vec![TraceRow {
        iteration: 0,
        kl: initial_kl,
        increments: selection.config,
        subsample_kl: selection.kl,
        subsample_size: selection.indices.len(),
    }];
    let mut accepted: Option<(GrammarParams, PartitionConfig)> = None;

    for iteration in 1..=config.max_iters.max(1) {
        let params = mle_estimate(selection.indices.iter().map(|&i| &current[i]));
        let regenerated: Vec<SyntaxTree> =
            (0..config.sample_size).map(|_| sample_tree(&params, config.limits, &mut rng)).collect();
        let features = tree_features(&regenerated);
        let kl = kl_gaussian(&fit_gaussian_discretised(&features)?, &target)?;
        let next = select_increments(&features, natural, &config.candidates, rng.gen())?;
        if accepted.is_some() && next.kl > selection.kl {
            break;
        }
        trace.push(TraceRow {
            iteration,
            kl,
            increments: next.config,
            subsample_kl: next.kl,
            subsample_size: next.indices.len(),
        });
        let improvement = selection.kl - next.kl;
        accepted = Some((params, next.config));
        current = regenerated;
        selection = next;
        if improvement < config.epsilon {
            break;
        }
    }

    let (params, increments) = accepted.expect("the first iteration is always accepted");
    let mut corpus_rng = substream(seed, 1);
    let corpus = generate_matched_corpus(
        &params,
        natural,
        increments,
        config.pilot_size,
        config.output_size,
        alphabet,
        config.corpus,
        seed,
        &mut corpus_rng,
    )?;
    let final_kl = kl_gaussian(&fit_gaussian_discretised(&extract_features(&corpus.samples))?, &target)?;
    Ok(NaturaliseOutcome { params, increments, corpus, trace, final_kl, target })
}

/// Total-variation distance between two parameter sets' expansion probabilities.
pub fn expansion_tv(a: &GrammarParams, b: &GrammarParams) -> f64 {
    0.5 * ((a.p_unary - b.p_unary).abs() + (a.p_binary - b.p_binary).abs() + (a.p_leaf - b.p_leaf).abs())
}

/// Total-variation distance between the function weights within one arity class.
pub fn function_tv(a: &GrammarParams, b: &GrammarParams, class: &[BaseFunction]) -> f64 {
    0.5 * class.iter().map(|f| (a.weight(*f) - b.weight(*f)).abs()).sum::<f64>()
}
