//! Fixtures shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `n` probabilities drawn uniformly from (0, 1), fixed by `seed`.
pub fn uniform_etas(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_range(1e-6..1.0 - 1e-6)).collect()
}
