use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::partition::{partition, partition_spec, PartitionConfig, PartitioningVector};
use super::{DistributionSpec, NaturaliseError};
use crate::generator::{
    extend_unique_filtered, sample_shape, Corpus, CorpusConfig, GrammarParams, Sample, UniquenessTracker,
};
use crate::language::Alphabet;

/// Fitted parameters together with the increments used to thin their output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NaturalisedProfile {
    pub params: GrammarParams,
    pub increments: PartitionConfig,
}

impl NaturalisedProfile {
    /// The profile fitted to [`DistributionSpec::reference`].
    pub fn reference() -> Self {
        serde_json::from_str(include_str!("../../data/naturalised.json"))
            .expect("embedded naturalised profile is valid JSON")
    }
}

/// Per-cell acceptance probabilities that turn the sampler's (length, depth)
/// distribution into the natural histogram's.
///
/// Each probability is the cell's subsampling quota divided by its size in a
/// pilot sample, i.e. the same anchor-cell rule as [`super::subsample_to_match`]
/// applied as a rate instead of a count.
#[derive(Clone, Debug)]
pub struct CellAcceptance {
    config: PartitionConfig,
    rates: BTreeMap<PartitioningVector, f64>,
}

impl CellAcceptance {
    pub fn from_pilot(
        pilot: &[(usize, usize)],
        natural: &DistributionSpec,
        config: PartitionConfig,
    ) -> Result<Self, NaturaliseError> {
        let natural_cells = partition_spec(natural, config);
        let (anchor, anchor_natural) = natural_cells
            .iter()
            .fold(None, |best: Option<(PartitioningVector, usize)>, (v, n)| match best {
                Some((_, m)) if m >= *n => best,
                _ => Some((*v, *n)),
            })
            .expect("histogram has at least one cell");
        let generated = partition(pilot, config);
        let anchor_generated = generated.get(&anchor).map_or(0, Vec::len);
        if anchor_generated == 0 {
            return Err(NaturaliseError::EmptyAnchorCell(anchor));
        }
        let scale = anchor_generated as f64 / anchor_natural as f64;
        let rates = generated
            .iter()
            .filter_map(|(v, members)| {
                let natural_count = *natural_cells.get(v)?;
                Some((*v, (natural_count as f64 * scale / members.len() as f64).min(1.0)))
            })
            .collect();
        Ok(CellAcceptance { config, rates })
    }

    pub fn config(&self) -> PartitionConfig {
        self.config
    }

    /// Probability of keeping a sample with these features; zero for cells the
    /// pilot never reached or the histogram lacks.
    pub fn rate(&self, features: (usize, usize)) -> f64 {
        self.rates.get(&self.config.vector(features)).copied().unwrap_or(0.0)
    }
}

/// Generates `n` unique samples from `params`, thinned cell by cell so their
/// (length, depth) distribution follows `natural`.
#[allow(clippy::too_many_arguments)]
pub fn generate_matched_corpus<R: Rng + ?Sized>(
    params: &GrammarParams,
    natural: &DistributionSpec,
    increments: PartitionConfig,
    pilot_size: usize,
    n: usize,
    alphabet: &Alphabet,
    config: CorpusConfig,
    seed: u64,
    rng: &mut R,
) -> Result<Corpus, NaturaliseError> {
    let acceptance = pilot_acceptance(params, natural, increments, pilot_size, config, rng)?;
    let mut tracker = UniquenessTracker::default();
    let samples = extend_matched(params, &acceptance, n, alphabet, config, &mut tracker, 0, rng)?;
    Ok(Corpus { samples, splits: None, seed, params: params.clone() })
}

/// Acceptance rates estimated from `pilot_size` shapes drawn under `params`.
pub fn pilot_acceptance<R: Rng + ?Sized>(
    params: &GrammarParams,
    natural: &DistributionSpec,
    increments: PartitionConfig,
    pilot_size: usize,
    config: CorpusConfig,
    rng: &mut R,
) -> Result<CellAcceptance, NaturaliseError> {
    params.validate()?;
    let pilot: Vec<(usize, usize)> = (0..pilot_size)
        .map(|_| {
            let s = sample_shape(params, config.limits, rng).stats();
            (s.length, s.depth)
        })
        .collect();
    CellAcceptance::from_pilot(&pilot, natural, increments)
}

/// Draws `n` more matched samples under `tracker`'s uniqueness constraints.
#[allow(clippy::too_many_arguments)]
pub fn extend_matched<R: Rng + ?Sized>(
    params: &GrammarParams,
    acceptance: &CellAcceptance,
    n: usize,
    alphabet: &Alphabet,
    config: CorpusConfig,
    tracker: &mut UniquenessTracker,
    first_id: usize,
    rng: &mut R,
) -> Result<Vec<Sample>, NaturaliseError> {
    let mut keep = |shape: &crate::generator::Shape, rng: &mut R| {
        let s = shape.stats();
        rng.gen::<f64>() < acceptance.rate((s.length, s.depth))
    };
    Ok(extend_unique_filtered(params, n, alphabet, config, tracker, first_id, &mut keep, rng)?)
}
