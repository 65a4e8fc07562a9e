//! Budgeted keyframe sampling over frame feature sequences.
//!
//! The sampler splits a video into shots with a greedy windowed boundary
//! score, then keeps two frames per shot: a representative *common* frame
//! and a high-deviation *unique* frame. Around it sit a synthetic benchmark
//! generator with exact ground truth, the evaluation metrics, and baseline
//! samplers.

pub mod affinity;
pub mod baselines;
pub mod error;
pub mod evaluator;
pub mod feature_store;
pub mod keyframer;
#[cfg(feature = "oracle")]
pub mod oracle;
pub mod segmenter;
pub mod synthgen;

pub use affinity::AffinityView;
pub use baselines::{medoid_sample, topk_by_score, uniform_sample, ScoreTrack};
pub use error::{Error, Result};
pub use evaluator::{distortion, evaluate_suite, EvalReport, EventAnnotation, VideoRow, VideoRun};
pub use feature_store::{
    l2_normalize, load_features, resolve_budget, save_features, BudgetSpec, FeatureSequence,
};
pub use keyframer::{
    assemble, sample, select_pair, shot_scores, FrameScores, InfoShot, Keyframe, KeyframeSet,
    KeyframerConfig, Role, SampleOutput,
};
pub use segmenter::{best_split, boundary_score, greedy_segment, SegmenterConfig, ShotPartition};
pub use synthgen::{default_benchmark, generate, AnomalyMode, BenchmarkConfig, SyntheticSpec, SyntheticTruth};
