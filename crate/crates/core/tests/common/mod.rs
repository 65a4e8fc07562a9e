#![allow(dead_code)]

use infoshot_core::{l2_normalize, FeatureSequence};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Normalized sequence with i.i.d. Gaussian-ish components.
pub fn random_unit_seq(rng: &mut ChaCha8Rng, frames: usize, dim: usize) -> FeatureSequence {
    let data: Vec<f64> = (0..frames * dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    l2_normalize(&FeatureSequence::from_flat(data, frames, dim, 24.0).unwrap())
}

/// Runs of basis vectors, `(axis, length)` per run.
pub fn basis_runs(runs: &[(usize, usize)], dim: usize) -> FeatureSequence {
    let mut frames = Vec::new();
    for &(axis, len) in runs {
        let mut v = vec![0.0; dim];
        v[axis] = 1.0;
        frames.extend(std::iter::repeat_n(v, len));
    }
    l2_normalize(&FeatureSequence::from_frames(&frames, 24.0).unwrap())
}
