//! Fixtures shared by the benchmarks in `benches/`.

use infoshot_core::{AffinityView, BenchmarkConfig, FeatureSequence};

/// One benchmark-suite video of `frames` frames and `dim` dimensions.
pub fn fixture(frames: usize, dim: usize, seed: u64) -> FeatureSequence {
    let cfg = BenchmarkConfig { count: 1, frames, dim, min_shot_len: frames / 6, ..BenchmarkConfig::default() };
    cfg.video(seed, 0).expect("fixture layout is valid").features
}

pub fn view(seq: &FeatureSequence) -> AffinityView<'_> {
    AffinityView::new(seq).expect("fixtures are unit-norm")
}
