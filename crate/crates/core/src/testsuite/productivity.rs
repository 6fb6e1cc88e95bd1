use super::TestsuiteError;
use crate::generator::Sample;

pub const DEFAULT_PRODUCTIVITY_THRESHOLD: usize = 8;

/// Samples with at most `threshold` functions train; the rest test.
pub fn productivity_split(samples: &[Sample], threshold: usize) -> Result<(Vec<Sample>, Vec<Sample>), TestsuiteError> {
    let (train, test): (Vec<Sample>, Vec<Sample>) =
        samples.iter().cloned().partition(|s| s.stats.num_functions <= threshold);
    if train.is_empty() {
        return Err(TestsuiteError::EmptySide("train"));
    }
    if test.is_empty() {
        return Err(TestsuiteError::EmptySide("test"));
    }
    Ok((train, test))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::language::{parse, tokenize, Lexicon};

    fn nested(n: usize, id: usize) -> Sample {
        let text = format!("{}A B", "copy ".repeat(n));
        Sample::from_tree(id, parse(&tokenize(&text, &Lexicon::base()).unwrap()).unwrap()).unwrap()
    }

    #[test]
    fn boundary_at_eight() {
        let (train, test) = productivity_split(&[nested(8, 0), nested(9, 1)], 8).unwrap();
        assert_eq!(train[0].stats.num_functions, 8);
        assert_eq!(test[0].stats.num_functions, 9);
    }

    #[test]
    fn all_primitive_is_an_error() {
        let err = productivity_split(&[nested(1, 0), nested(1, 1)], 8).unwrap_err();
        assert!(matches!(err, TestsuiteError::EmptySide("test")));
    }
}
