use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{DistributionSpec, NaturaliseError};

/// Feature increments used to coarsen (length, depth) into cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PartitionConfig {
    pub length: usize,
    pub depth: usize,
}

impl PartitionConfig {
    pub fn new(length: usize, depth: usize) -> Result<Self, NaturaliseError> {
        if length == 0 || depth == 0 {
            return Err(NaturaliseError::InvalidIncrement);
        }
        Ok(PartitionConfig { length, depth })
    }

    pub fn vector(&self, (length, depth): (usize, usize)) -> PartitioningVector {
        PartitioningVector(length / self.length, depth / self.depth)
    }

    /// The {1,2,3} x {1,2,3} grid.
    pub fn default_grid() -> Vec<PartitionConfig> {
        let mut grid = Vec::new();
        for length in 1..=3 {
            for depth in 1..=3 {
                grid.push(PartitionConfig { length, depth });
            }
        }
        grid
    }
}

/// Floor-divided features; ordered lexicographically.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PartitioningVector(pub usize, pub usize);

/// Groups feature indices by partitioning vector.
pub fn partition(features: &[(usize, usize)], config: PartitionConfig) -> BTreeMap<PartitioningVector, Vec<usize>> {
    let mut groups: BTreeMap<PartitioningVector, Vec<usize>> = BTreeMap::new();
    for (i, f) in features.iter().enumerate() {
        groups.entry(config.vector(*f)).or_default().push(i);
    }
    groups
}

/// Cell sizes of the natural histogram under `config`.
pub fn partition_spec(spec: &DistributionSpec, config: PartitionConfig) -> BTreeMap<PartitioningVector, usize> {
    let mut cells: BTreeMap<PartitioningVector, usize> = BTreeMap::new();
    for e in spec.entries() {
        *cells.entry(config.vector((e.length, e.depth))).or_default() += e.count;
    }
    cells
}

/// Number of members to draw from a generated cell:
/// `round_half_up(natural × anchor_generated / anchor_natural)`, capped at the cell size.
pub fn cell_quota(natural: usize, anchor_generated: usize, anchor_natural: usize, cell_size: usize) -> usize {
    let num = natural as u128 * anchor_generated as u128;
    let den = anchor_natural as u128;
    let rounded = (2 * num + den) / (2 * den);
    (rounded as usize).min(cell_size)
}

/// Subsamples generated data so its cell proportions follow the natural histogram.
///
/// Returns indices into `features`, a subset without repeats.
pub fn subsample_to_match<R: Rng + ?Sized>(
    features: &[(usize, usize)],
    natural: &DistributionSpec,
    config: PartitionConfig,
    rng: &mut R,
) -> Result<Vec<usize>, NaturaliseError> {
    let natural_cells = partition_spec(natural, config);
    // largest natural cell; BTreeMap order makes the first maximum the smallest vector
    let (anchor, anchor_natural) = natural_cells
        .iter()
        .fold(None, |best: Option<(PartitioningVector, usize)>, (v, n)| match best {
            Some((_, m)) if m >= *n => best,
            _ => Some((*v, *n)),
        })
        .expect("histogram has at least one cell");
    let generated = partition(features, config);
    let anchor_generated = generated.get(&anchor).map_or(0, Vec::len);
    if anchor_generated == 0 {
        return Err(NaturaliseError::EmptyAnchorCell(anchor));
    }
    let mut picked = Vec::new();
    for (vector, members) in &generated {
        let Some(&natural_count) = natural_cells.get(vector) else {
            continue;
        };
        let quota = cell_quota(natural_count, anchor_generated, anchor_natural, members.len());
        picked.extend(rand::seq::index::sample(rng, members.len(), quota).into_iter().map(|i| members[i]));
    }
    picked.sort_unstable();
    Ok(picked)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::naturalise::SpecEntry;
    use crate::rng::seeded;

    #[test]
    fn floor_division_grouping() {
        let groups = partition(&[(3, 1), (4, 1), (9, 3)], PartitionConfig::new(2, 1).unwrap());
        let expected: BTreeMap<_, _> = [
            (PartitioningVector(1, 1), vec![0]),
            (PartitioningVector(2, 1), vec![1]),
            (PartitioningVector(4, 3), vec![2]),
        ]
        .into_iter()
        .collect();
        assert_eq!(groups, expected);
    }

    #[test]
    fn unit_increments_group_identical_features() {
        let features = [(3, 1), (3, 1), (5, 2)];
        let groups = partition(&features, PartitionConfig::new(1, 1).unwrap());
        assert_eq!(groups.len(), 2);
        assert_eq!(partition(&[(7, 2)], PartitionConfig::new(3, 3).unwrap()).len(), 1);
    }

    #[test]
    fn zero_increment_is_rejected() {
        assert!(PartitionConfig::new(0, 1).is_err());
    }

    #[test]
    fn quota_arithmetic() {
        assert_eq!(cell_quota(10, 40, 10, 40), 40);
        assert_eq!(cell_quota(5, 40, 10, 40), 20);
        assert_eq!(cell_quota(1, 3, 2, 100), 2); // 1.5 rounds up
        assert_eq!(cell_quota(1, 5, 4, 100), 1); // 1.25 rounds down
        assert_eq!(cell_quota(5, 40, 10, 7), 7); // capped
    }

    fn spec(cells: &[(usize, usize, usize)]) -> DistributionSpec {
        DistributionSpec::new(cells.iter().map(|&(length, depth, count)| SpecEntry { length, depth, count }).collect())
            .unwrap()
    }

    #[test]
    fn picks_proportional_quotas() {
        let natural = spec(&[(1, 1, 10), (2, 1, 5)]);
        let mut features = vec![(1, 1); 40];
        features.extend(vec![(2, 1); 40]);
        let picked =
            subsample_to_match(&features, &natural, PartitionConfig::new(1, 1).unwrap(), &mut seeded(0)).unwrap();
        assert_eq!(picked.iter().filter(|&&i| i < 40).count(), 40);
        assert_eq!(picked.iter().filter(|&&i| i >= 40).count(), 20);
    }

    #[test]
    fn single_natural_cell_keeps_matching_generated_cell() {
        let natural = spec(&[(3, 1, 7)]);
        let features = vec![(3, 1), (4, 1), (3, 1), (9, 2)];
        let picked =
            subsample_to_match(&features, &natural, PartitionConfig::new(1, 1).unwrap(), &mut seeded(0)).unwrap();
        assert_eq!(picked, vec![0, 2]);
    }

    #[test]
    fn empty_anchor_is_an_error() {
        let natural = spec(&[(3, 1, 7)]);
        let err =
            subsample_to_match(&[(4, 1)], &natural, PartitionConfig::new(1, 1).unwrap(), &mut seeded(0)).unwrap_err();
        assert!(matches!(err, NaturaliseError::EmptyAnchorCell(PartitioningVector(3, 1))));
    }

    #[test]
    fn anchor_ties_prefer_smallest_vector() {
        let natural = spec(&[(2, 1, 5), (1, 1, 5)]);
        // anchor is (1,1): all 4 members there are kept, (2,1) gets the same quota
        let features = vec![(1, 1), (1, 1), (1, 1), (1, 1), (2, 1), (2, 1)];
        let picked =
            subsample_to_match(&features, &natural, PartitionConfig::new(1, 1).unwrap(), &mut seeded(0)).unwrap();
        assert_eq!(picked.len(), 6);
    }
}
