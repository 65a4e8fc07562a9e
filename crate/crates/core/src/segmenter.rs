//! Greedy shot segmentation driven by a windowed boundary score.
//!
//! For a candidate boundary `t` with half-width `k`, the two windows are
//! `W⁻ = [t−k, t)` and `W⁺ = [t, t+k)`. The score is
//!
//! ```text
//! B_t = ½ (cohesion(W⁺) + cohesion(W⁻)) − cross(W⁺, W⁻)
//! ```
//!
//! where cohesion is the exact mean affinity over distinct pairs inside a
//! window (1 for a single-frame window) and cross is the mean affinity over
//! all pairs straddling `t`.

use std::collections::VecDeque;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::affinity::AffinityView;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmenterConfig {
    pub window_min: usize,
    pub window_max: usize,
    pub min_shot_len: usize,
    pub max_shot_len: usize,
}

impl Default for SegmenterConfig {
    fn default() -> Self {
        Self {
            window_min: 3,
            window_max: 15,
            min_shot_len: 3,
            max_shot_len: 300,
        }
    }
}

impl SegmenterConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window_min == 0 || self.window_min > self.window_max {
            return Err(Error::InvalidConfig(format!(
                "window range {}..={} is empty or starts at 0",
                self.window_min, self.window_max
            )));
        }
        if self.min_shot_len == 0 || self.min_shot_len > self.max_shot_len {
            return Err(Error::InvalidConfig(format!(
                "shot length range {}..={} is empty or starts at 0",
                self.min_shot_len, self.max_shot_len
            )));
        }
        Ok(())
    }

    /// Window half-width for a segment: `clamp(⌊len / 20⌋, window_min, window_max)`.
    pub fn window_for(&self, segment_len: usize) -> usize {
        (segment_len / 20).clamp(self.window_min, self.window_max)
    }
}

/// Contiguous tiling of `[0, T)` into shots.
#[derive(Debug, Clone, PartialEq)]
pub struct ShotPartition {
    pub segments: Vec<Range<usize>>,
    /// `scores[i]` is the boundary score at `segments[i + 1].start`.
    pub scores: Vec<f64>,
    /// Requested shot count `M`; `segments.len()` is the realized `M'`.
    pub target_shots: usize,
}

#[derive(Serialize, Deserialize)]
struct PartitionDump {
    segments: Vec<[usize; 2]>,
    scores: Vec<f64>,
    realized_shots: usize,
}

impl ShotPartition {
    pub fn realized_shots(&self) -> usize {
        self.segments.len()
    }

    pub fn boundaries(&self) -> Vec<usize> {
        self.segments.iter().skip(1).map(|s| s.start).collect()
    }

    /// Checks that the segments tile `[0, frame_count)` in order.
    pub fn is_valid_for(&self, frame_count: usize) -> bool {
        is_tiling(&self.segments, frame_count) && self.scores.len() + 1 == self.segments.len()
    }

    pub fn to_json(&self) -> Result<String> {
        let dump = PartitionDump {
            segments: self.segments.iter().map(|s| [s.start, s.end]).collect(),
            scores: self.scores.clone(),
            realized_shots: self.realized_shots(),
        };
        Ok(serde_json::to_string_pretty(&dump)?)
    }
}

pub(crate) fn is_tiling(segments: &[Range<usize>], frame_count: usize) -> bool {
    let mut expected = 0;
    for s in segments {
        if s.start != expected || s.end <= s.start {
            return false;
        }
        expected = s.end;
    }
    expected == frame_count && !segments.is_empty()
}

/// Effective half-width after clipping to the segment, or `None` when `t`
/// leaves no frame on one side.
fn clipped_window(t: usize, k: usize, segment: &Range<usize>) -> Option<usize> {
    if t <= segment.start || t >= segment.end {
        return None;
    }
    Some(k.min(t - segment.start).min(segment.end - t))
}

/// Mean of `aff` over the distinct pairs of `lo..hi`; 1 for a single frame.
fn cohesion(aff: &mut impl FnMut(usize, usize) -> f64, lo: usize, hi: usize) -> f64 {
    let k = hi - lo;
    if k == 1 {
        return 1.0;
    }
    let mut sum = 0.0;
    for i in lo..hi {
        for j in i + 1..hi {
            sum += aff(i, j);
        }
    }
    sum / (k * (k - 1) / 2) as f64
}

/// `B_t` for an already clipped half-width. `aff(i, j)` is only asked for `i < j`.
fn window_score(mut aff: impl FnMut(usize, usize) -> f64, t: usize, k: usize) -> f64 {
    let coh_minus = cohesion(&mut aff, t - k, t);
    let coh_plus = cohesion(&mut aff, t, t + k);
    let mut cross = 0.0;
    for j in t - k..t {
        for i in t..t + k {
            cross += aff(j, i);
        }
    }
    cross /= (k * k) as f64;
    0.5 * (coh_plus + coh_minus) - cross
}

/// Boundary score at `t` inside `segment` with half-width `k`.
///
/// The windows are shrunk symmetrically to fit the segment.
pub fn boundary_score(view: &AffinityView<'_>, t: usize, k: usize, segment: Range<usize>) -> Result<f64> {
    if segment.end > view.len() || segment.start > segment.end {
        return Err(Error::IndexOutOfRange {
            index: segment.end,
            len: view.len(),
        });
    }
    let k_eff = match clipped_window(t, k, &segment) {
        Some(k_eff) if k >= 1 => k_eff,
        _ => {
            return Err(Error::WindowOutOfSegment {
                t,
                start: segment.start,
                end: segment.end,
            })
        }
    };
    Ok(window_score(|i, j| view.get(i, j), t, k_eff))
}

/// Rolling band of affinities `A(i, i+1 ..= i+width)` for rows of a segment.
/// Holds at most `2k` rows at a time.
struct Band<'v, 'a> {
    view: &'v AffinityView<'a>,
    end: usize,
    width: usize,
    first: usize,
    rows: VecDeque<Vec<f64>>,
}

impl<'v, 'a> Band<'v, 'a> {
    fn new(view: &'v AffinityView<'a>, segment: &Range<usize>, k: usize) -> Self {
        Self {
            view,
            end: segment.end,
            width: 2 * k - 1,
            first: segment.start,
            rows: VecDeque::new(),
        }
    }

    fn advance(&mut self, lo: usize, hi: usize) {
        while self.first < lo {
            self.rows.pop_front();
            self.first += 1;
        }
        while self.first + self.rows.len() < hi {
            let i = self.first + self.rows.len();
            let last = (i + self.width).min(self.end - 1);
            let row = (i + 1..=last).map(|j| self.view.get(i, j)).collect();
            self.rows.push_back(row);
        }
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.rows[i - self.first][j - i - 1]
    }
}

/// Best admissible split of `segment`: the `t` maximizing `B_t` such that
/// both children keep at least `min_shot_len` frames. Ties go to the smallest `t`.
pub fn best_split(view: &AffinityView<'_>, segment: Range<usize>, cfg: &SegmenterConfig) -> Option<(usize, f64)> {
    let min = cfg.min_shot_len.max(1);
    if segment.len() < 2 * min {
        return None;
    }
    let k = cfg.window_for(segment.len());
    let mut band = Band::new(view, &segment, k);
    let mut best: Option<(usize, f64)> = None;
    for t in segment.start + min..=segment.end - min {
        let k_eff = clipped_window(t, k, &segment).expect("admissible t is interior");
        band.advance(t - k_eff, t + k_eff);
        let score = window_score(|i, j| band.get(i, j), t, k_eff);
        if best.is_none_or(|(_, b)| score > b) {
            best = Some((t, score));
        }
    }
    best
}

struct Seg {
    range: Range<usize>,
    best: Option<(usize, f64)>,
}

/// Greedily splits `[0, T)` into `target_shots` segments.
///
/// Each round splits the segment whose best split scores highest (ties:
/// earliest segment). Afterwards segments longer than `max_shot_len` keep
/// being split, largest first, even past the target.
pub fn greedy_segment(view: &AffinityView<'_>, target_shots: usize, cfg: &SegmenterConfig) -> Result<ShotPartition> {
    greedy_segment_traced(view, target_shots, cfg, |_| {})
}

/// [`greedy_segment`] that reports the partition after every split.
pub fn greedy_segment_traced(
    view: &AffinityView<'_>,
    target_shots: usize,
    cfg: &SegmenterConfig,
    mut on_step: impl FnMut(&[Range<usize>]),
) -> Result<ShotPartition> {
    cfg.validate()?;
    if target_shots == 0 {
        return Err(Error::InvalidConfig("target shot count must be at least 1".into()));
    }
    let whole = 0..view.len();
    let mut segs = vec![Seg {
        best: best_split(view, whole.clone(), cfg),
        range: whole,
    }];
    let mut split_scores: Vec<(usize, f64)> = Vec::new();

    let mut split_at = |segs: &mut Vec<Seg>, idx: usize| {
        let Seg { range, best } = segs.remove(idx);
        let (t, score) = best.expect("only splittable segments are chosen");
        split_scores.push((t, score));
        let left = range.start..t;
        let right = t..range.end;
        segs.insert(
            idx,
            Seg {
                best: best_split(view, right.clone(), cfg),
                range: right,
            },
        );
        segs.insert(
            idx,
            Seg {
                best: best_split(view, left.clone(), cfg),
                range: left,
            },
        );
        let ranges: Vec<Range<usize>> = segs.iter().map(|s| s.range.clone()).collect();
        on_step(&ranges);
    };

    while segs.len() < target_shots {
        let mut chosen: Option<(usize, f64)> = None;
        for (idx, seg) in segs.iter().enumerate() {
            if let Some((_, score)) = seg.best {
                if chosen.is_none_or(|(_, b)| score > b) {
                    chosen = Some((idx, score));
                }
            }
        }
        match chosen {
            Some((idx, _)) => split_at(&mut segs, idx),
            None => break,
        }
    }

    loop {
        let mut chosen: Option<(usize, usize)> = None;
        for (idx, seg) in segs.iter().enumerate() {
            let len = seg.range.len();
            if len > cfg.max_shot_len && seg.best.is_some() && chosen.is_none_or(|(_, l)| len > l) {
                chosen = Some((idx, len));
            }
        }
        match chosen {
            Some((idx, _)) => split_at(&mut segs, idx),
            None => break,
        }
    }

    split_scores.sort_by_key(|&(t, _)| t);
    let partition = ShotPartition {
        segments: segs.into_iter().map(|s| s.range).collect(),
        scores: split_scores.into_iter().map(|(_, s)| s).collect(),
        target_shots,
    };
    if partition.realized_shots() != target_shots {
        log::debug!(
            "segmentation realized {} shots for a target of {}",
            partition.realized_shots(),
            target_shots
        );
    }
    Ok(partition)
}
