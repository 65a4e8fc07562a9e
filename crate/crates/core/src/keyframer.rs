//! Per-shot keyframe selection and budget-aware assembly.
//!
//! Within a shot every frame gets a typicality `g_i` (mean affinity to the
//! rest of the shot) and a local volatility `v_i` (one minus the mean
//! affinity to its temporal neighbours). Both are min-max normalized within
//! the shot. The common frame maximizes `λ·ĝ − (1−λ)·v̂`; the unique frame
//! maximizes `α·(1−ĝ) + (1−α)·v̂` over the remaining frames.

use std::collections::BTreeSet;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::affinity::{AffinityView, DEFAULT_BLOCK_SIZE};
use crate::error::{Error, Result};
use crate::feature_store::{l2_normalize, resolve_budget, BudgetSpec, FeatureSequence};
use crate::segmenter::{greedy_segment, SegmenterConfig, ShotPartition};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeyframerConfig {
    pub lambda: f64,
    pub alpha: f64,
    pub neighborhood_k: usize,
}

impl Default for KeyframerConfig {
    fn default() -> Self {
        Self {
            lambda: 0.7,
            alpha: 0.5,
            neighborhood_k: 1,
        }
    }
}

impl KeyframerConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, w) in [("lambda", self.lambda), ("alpha", self.alpha)] {
            if !(0.0..=1.0).contains(&w) {
                return Err(Error::InvalidConfig(format!("{name} must lie in [0, 1], got {w}")));
            }
        }
        if self.neighborhood_k == 0 {
            return Err(Error::InvalidConfig("neighborhood must be at least 1".into()));
        }
        Ok(())
    }

    #[inline]
    pub fn common_objective(&self, typ_norm: f64, vol_norm: f64) -> f64 {
        self.lambda * typ_norm - (1.0 - self.lambda) * vol_norm
    }

    #[inline]
    pub fn unique_objective(&self, typ_norm: f64, vol_norm: f64) -> f64 {
        self.alpha * (1.0 - typ_norm) + (1.0 - self.alpha) * vol_norm
    }
}

/// Raw and normalized per-frame scores for one shot.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameScores {
    pub typicality: Vec<f64>,
    pub volatility: Vec<f64>,
    pub typ_norm: Vec<f64>,
    pub vol_norm: Vec<f64>,
}

impl FrameScores {
    pub fn len(&self) -> usize {
        self.typicality.len()
    }

    pub fn is_empty(&self) -> bool {
        self.typicality.is_empty()
    }

    /// Builds scores from raw values, applying min-max normalization.
    pub fn from_raw(typicality: Vec<f64>, volatility: Vec<f64>) -> Self {
        let typ_norm = min_max(&typicality);
        let vol_norm = min_max(&volatility);
        Self {
            typicality,
            volatility,
            typ_norm,
            vol_norm,
        }
    }
}

/// Min-max normalization to `[0, 1]`; a constant input maps to all zeros.
pub fn min_max(values: &[f64]) -> Vec<f64> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi <= lo || values.is_empty() {
        return vec![0.0; values.len()];
    }
    let span = hi - lo;
    values.iter().map(|v| (v - lo) / span).collect()
}

pub fn shot_scores(view: &AffinityView<'_>, segment: Range<usize>, cfg: &KeyframerConfig) -> Result<FrameScores> {
    let len = segment.len();
    if len == 0 || segment.end > view.len() {
        return Err(Error::IndexOutOfRange {
            index: segment.end,
            len: view.len(),
        });
    }
    if len == 1 {
        return Ok(FrameScores {
            typicality: vec![1.0],
            volatility: vec![0.0],
            typ_norm: vec![0.0],
            vol_norm: vec![0.0],
        });
    }
    let start = segment.start;
    let mut row_sums = vec![0.0; len];
    view.for_each_block(segment.clone(), segment.clone(), |r0, c0, block| {
        for ((a, b), v) in block.indexed_iter() {
            if r0 + a != c0 + b {
                row_sums[r0 - start + a] += *v;
            }
        }
    })?;
    let typicality: Vec<f64> = row_sums.iter().map(|s| s / (len - 1) as f64).collect();

    let k = cfg.neighborhood_k;
    let volatility = segment
        .clone()
        .map(|i| {
            let lo = i.saturating_sub(k).max(segment.start);
            let hi = (i + k + 1).min(segment.end);
            let mut sum = 0.0;
            for j in (lo..hi).filter(|&j| j != i) {
                sum += view.get(i, j);
            }
            1.0 - sum / (hi - lo - 1) as f64
        })
        .collect();
    Ok(FrameScores::from_raw(typicality, volatility))
}

fn argmax_by(len: usize, skip: Option<usize>, f: impl Fn(usize) -> f64) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for i in (0..len).filter(|&i| Some(i) != skip) {
        let s = f(i);
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((i, s));
        }
    }
    best
}

/// Local `(t_com, t_uni)`; `t_uni` is absent for a single-frame shot.
pub fn select_pair(scores: &FrameScores, cfg: &KeyframerConfig) -> (usize, Option<usize>) {
    let (com, uni) = select_pair_scored(scores, cfg);
    (com.0, uni.map(|u| u.0))
}

fn select_pair_scored(scores: &FrameScores, cfg: &KeyframerConfig) -> ((usize, f64), Option<(usize, f64)>) {
    let (g, v) = (&scores.typ_norm, &scores.vol_norm);
    let com = argmax_by(scores.len(), None, |i| cfg.common_objective(g[i], v[i])).unwrap_or((0, 0.0));
    let uni = argmax_by(scores.len(), Some(com.0), |i| cfg.unique_objective(g[i], v[i]));
    (com, uni)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Common,
    Unique,
    /// Frames chosen by a baseline sampler, which has no roles.
    Sample,
}

/// A chosen frame with the objective value that selected it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pick {
    pub index: usize,
    pub score: f64,
}

/// Common and unique picks of one shot, in global frame indices.
#[derive(Debug, Clone, PartialEq)]
pub struct ShotPick {
    pub common: Pick,
    pub unique: Option<Pick>,
}

/// Scores a shot and returns its picks in global indices.
pub fn pick_shot(view: &AffinityView<'_>, segment: Range<usize>, cfg: &KeyframerConfig) -> Result<ShotPick> {
    let start = segment.start;
    let scores = shot_scores(view, segment, cfg)?;
    let (com, uni) = select_pair_scored(&scores, cfg);
    Ok(ShotPick {
        common: Pick {
            index: start + com.0,
            score: com.1,
        },
        unique: uni.map(|(i, s)| Pick {
            index: start + i,
            score: s,
        }),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Keyframe {
    pub index: usize,
    pub role: Role,
    pub shot: usize,
    pub score: f64,
}

/// Selected frames, sorted by index, with the budget they were drawn under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeyframeSet {
    #[serde(rename = "budget")]
    pub budget_k: usize,
    #[serde(rename = "frames")]
    pub entries: Vec<Keyframe>,
}

impl KeyframeSet {
    pub fn indices(&self) -> Vec<usize> {
        self.entries.iter().map(|e| e.index).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Wraps a baseline's index set.
    pub fn from_indices(indices: &[usize], budget_k: usize) -> Self {
        let set: BTreeSet<usize> = indices.iter().copied().collect();
        Self {
            budget_k,
            entries: set
                .into_iter()
                .map(|index| Keyframe {
                    index,
                    role: Role::Sample,
                    shot: 0,
                    score: 0.0,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Unions the per-shot picks and truncates to `budget_k`.
///
/// Truncation drops unique frames first, weakest unique score first (ties:
/// larger index first). When `K ≥ 2` the strongest unique frame is kept and
/// common frames are dropped instead, shortest shots first; with `K = 1`
/// every unique frame goes before any common frame.
pub fn assemble(partition: &ShotPartition, per_shot: &[ShotPick], budget_k: usize) -> Result<KeyframeSet> {
    if partition.segments.len() != per_shot.len() {
        return Err(Error::LengthMismatch {
            expected: partition.segments.len(),
            found: per_shot.len(),
        });
    }
    let mut seen = BTreeSet::new();
    let mut commons = Vec::new();
    let mut uniques = Vec::new();
    for (shot, pick) in per_shot.iter().enumerate() {
        if seen.insert(pick.common.index) {
            commons.push(Keyframe {
                index: pick.common.index,
                role: Role::Common,
                shot,
                score: pick.common.score,
            });
        }
        if let Some(u) = pick.unique {
            if seen.insert(u.index) {
                uniques.push(Keyframe {
                    index: u.index,
                    role: Role::Unique,
                    shot,
                    score: u.score,
                });
            }
        }
    }

    let mut excess = (commons.len() + uniques.len()).saturating_sub(budget_k);
    // With room for two frames, the strongest unique frame outlives the
    // commons of short shots.
    let reserved = usize::from(budget_k >= 2).min(uniques.len());
    if excess > 0 {
        // Strongest first so that truncating the tail drops the weakest.
        uniques.sort_by(|a, b| b.score.total_cmp(&a.score).then(a.index.cmp(&b.index)));
        let drop = excess.min(uniques.len() - reserved);
        uniques.truncate(uniques.len() - drop);
        excess -= drop;
    }
    if excess > 0 {
        // Longest shots first; among equal lengths earlier shots are kept.
        commons.sort_by(|a, b| {
            let la = partition.segments[a.shot].len();
            let lb = partition.segments[b.shot].len();
            lb.cmp(&la).then(a.shot.cmp(&b.shot))
        });
        commons.truncate(commons.len() - excess);
    }

    let mut entries = commons;
    entries.extend(uniques);
    entries.sort_by_key(|e| e.index);
    Ok(KeyframeSet { budget_k, entries })
}

/// End-to-end sampler settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfoShot {
    pub segmenter: SegmenterConfig,
    pub keyframer: KeyframerConfig,
    pub block_size: usize,
}

impl Default for InfoShot {
    fn default() -> Self {
        Self {
            segmenter: SegmenterConfig::default(),
            keyframer: KeyframerConfig::default(),
            block_size: DEFAULT_BLOCK_SIZE,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleOutput {
    pub keyframes: KeyframeSet,
    pub partition: ShotPartition,
}

impl InfoShot {
    pub fn run(&self, seq: &FeatureSequence, budget: &BudgetSpec) -> Result<SampleOutput> {
        let k = resolve_budget(budget, seq)?;
        self.run_with_k(seq, k)
    }

    /// Samples with an already resolved budget `K ≥ 1`.
    pub fn run_with_k(&self, seq: &FeatureSequence, budget_k: usize) -> Result<SampleOutput> {
        if budget_k == 0 {
            return Err(Error::InvalidBudget("budget must be positive".into()));
        }
        self.segmenter.validate()?;
        self.keyframer.validate()?;
        let normalized;
        let seq = if seq.is_normalized() {
            seq
        } else {
            normalized = l2_normalize(seq);
            &normalized
        };
        let view = AffinityView::new(seq)?.with_block_size(self.block_size)?;
        let target = (budget_k / 2).max(1);
        let partition = greedy_segment(&view, target, &self.segmenter)?;
        let picks = partition
            .segments
            .iter()
            .map(|s| pick_shot(&view, s.clone(), &self.keyframer))
            .collect::<Result<Vec<_>>>()?;
        let keyframes = assemble(&partition, &picks, budget_k)?;
        Ok(SampleOutput { keyframes, partition })
    }
}

/// Runs the full pipeline with the default block size.
pub fn sample(
    seq: &FeatureSequence,
    budget: &BudgetSpec,
    seg_cfg: &SegmenterConfig,
    key_cfg: &KeyframerConfig,
) -> Result<KeyframeSet> {
    let sampler = InfoShot {
        segmenter: *seg_cfg,
        keyframer: *key_cfg,
        block_size: DEFAULT_BLOCK_SIZE,
    };
    Ok(sampler.run(seq, budget)?.keyframes)
}
