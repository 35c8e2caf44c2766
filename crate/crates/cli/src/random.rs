use anyhow::{bail, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cyclicality::WeightedDigraph;

/// Dense-ish random digraph: every entry, loops included, is present with
/// probability one half and then uniform on (0, 1).
pub fn graph(n: usize, seed: u64) -> Result<WeightedDigraph> {
    if n == 0 {
        bail!("--random needs at least one vertex");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    if rng.random_bool(0.5) {
                        rng.random::<f64>()
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    Ok(WeightedDigraph::from_unlabeled(rows)?)
}
