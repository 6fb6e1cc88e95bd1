//! Reshapes generated data so its joint (length, depth) distribution follows a
//! natural-language reference histogram, then refits the grammar to it.

mod gaussian;
mod matched;
mod mle;
mod partition;
mod pipeline;
mod spec;

use thiserror::Error;

pub use gaussian::{fit_gaussian, fit_gaussian_discretised, fit_spec, fit_spec_discretised, kl_gaussian, GaussianFit};
pub use matched::{extend_matched, generate_matched_corpus, pilot_acceptance, CellAcceptance, NaturalisedProfile};
pub use mle::{mle_estimate, params_from_counts, ProductionCounts};
pub use partition::{cell_quota, partition, partition_spec, subsample_to_match, PartitionConfig, PartitioningVector};
pub use pipeline::{
    expansion_tv, extract_features, function_tv, kl_to_spec, naturalise_pipeline, random_params,
    random_probability_sample, select_increments, NaturaliseConfig, NaturaliseOutcome, Selection, TraceRow,
};
pub use spec::{DistributionSpec, SpecEntry};

use crate::generator::GeneratorError;

#[derive(Debug, Error)]
pub enum NaturaliseError {
    #[error("invalid distribution spec: {0}")]
    InvalidSpec(String),
    #[error("feature increments must be >= 1")]
    InvalidIncrement,
    #[error("no generated samples in the anchor cell {0:?}")]
    EmptyAnchorCell(PartitioningVector),
    #[error("covariance is degenerate (too few or collinear points)")]
    DegenerateCovariance,
    #[error("covariance is not positive-definite")]
    SingularCovariance,
    #[error("no candidate increment configurations")]
    NoCandidates,
    #[error(transparent)]
    Generator(#[from] GeneratorError),
}
