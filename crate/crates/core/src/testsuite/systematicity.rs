use rand::seq::index::sample;
use rand::Rng;

use super::pairs::{composes_directly, contains_adjacent_pair, HeldOutPair};
use super::TestsuiteError;
use crate::generator::Sample;

#[derive(Clone, Debug)]
pub struct SystematicitySplit {
    pub train: Vec<Sample>,
    pub test: Vec<Sample>,
    /// Samples in neither side: unselected positives, and samples that
    /// compose a held-out pair without the two tokens being adjacent.
    pub discarded: usize,
}

/// Holds out function pairs from training.
///
/// Training keeps only samples in which no held-out `inner` is a direct
/// argument of its `outer`; the test side draws `test_size` samples uniformly
/// from those where the pair's tokens are adjacent. Everything else is
/// discarded.
pub fn systematicity_split<R: Rng + ?Sized>(
    samples: &[Sample],
    pairs: &[HeldOutPair],
    test_size: usize,
    rng: &mut R,
) -> Result<SystematicitySplit, TestsuiteError> {
    if pairs.is_empty() {
        return Ok(SystematicitySplit { train: samples.to_vec(), test: Vec::new(), discarded: 0 });
    }
    let mut train = Vec::new();
    let mut positives = Vec::new();
    for s in samples {
        if contains_adjacent_pair(&s.src, pairs) {
            positives.push(s);
        } else if !composes_directly(&s.tree, pairs) {
            train.push(s.clone());
        }
    }
    if positives.len() < test_size {
        return Err(TestsuiteError::InsufficientPositives { needed: test_size, available: positives.len() });
    }
    let mut picked: Vec<usize> = sample(rng, positives.len(), test_size).into_vec();
    picked.sort_unstable();
    let test: Vec<Sample> = picked.into_iter().map(|i| positives[i].clone()).collect();
    let discarded = samples.len() - train.len() - test.len();
    Ok(SystematicitySplit { train, test, discarded })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::language::{parse, tokenize, Lexicon};
    use crate::rng::seeded;

    fn sample(id: usize, text: &str) -> Sample {
        Sample::from_tree(id, parse(&tokenize(text, &Lexicon::base()).unwrap()).unwrap()).unwrap()
    }

    #[test]
    fn paper_examples() {
        let samples = vec![
            sample(0, "reverse repeat remove_second A B , C D"),
            sample(1, "repeat reverse remove_second A B , C D"),
            sample(2, "append E , remove_second F , G"),
        ];
        let split = systematicity_split(&samples, &HeldOutPair::defaults(), 1, &mut seeded(0)).unwrap();
        assert_eq!(split.train.len(), 1);
        assert_eq!(split.train[0].id, 1);
        assert_eq!(split.test[0].id, 0);
        assert_eq!(split.discarded, 1);
    }

    #[test]
    fn no_pairs_keeps_everything() {
        let samples = vec![sample(0, "swap repeat A B")];
        let split = systematicity_split(&samples, &[], 10, &mut seeded(0)).unwrap();
        assert_eq!(split.train.len(), 1);
        assert!(split.test.is_empty());
    }

    #[test]
    fn too_few_positives() {
        let samples = vec![sample(0, "swap repeat A B")];
        let err = systematicity_split(&samples, &HeldOutPair::defaults(), 2, &mut seeded(0)).unwrap_err();
        assert!(matches!(err, TestsuiteError::InsufficientPositives { needed: 2, available: 1 }));
    }
}
