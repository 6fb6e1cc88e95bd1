//! Seeded random streams shared by every generating component.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type CorpusRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> CorpusRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// An independent stream derived from `(seed, stream)`; used for shards and
/// per-candidate work so results do not depend on evaluation order.
pub fn substream(seed: u64, stream: u64) -> CorpusRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draw from a symmetric Dirichlet(1): normalised unit exponentials.
pub fn dirichlet_uniform<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    let draws: Vec<f64> = (0..k).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = draws.iter().sum();
    draws.into_iter().map(|d| d / total).collect()
}

/// Index drawn proportionally to `weights` (need not be normalised).
pub fn categorical<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.gen::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            return i;
        }
        u -= w;
    }
    // rounding fallthrough: last index with positive weight
    weights.iter().rposition(|w| *w > 0.0).unwrap_or(0)
}
