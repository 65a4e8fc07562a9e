//! Sampler quality metrics: frame recall (R), event recall (ER), complete
//! coverage rate (CR) and feature-space distortion.

use std::collections::BTreeSet;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::affinity::dot;
use crate::error::{Error, Result};
use crate::feature_store::{l2_normalize, FeatureSequence};
use crate::synthgen::SyntheticTruth;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntervalUnit {
    Seconds,
    Frames,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventAnnotation {
    /// Closed intervals `[a, b]`.
    pub intervals: Vec<(f64, f64)>,
    pub unit: IntervalUnit,
    pub fps: Option<f64>,
}

impl EventAnnotation {
    pub fn from_frames(intervals: &[[usize; 2]]) -> Self {
        Self {
            intervals: intervals.iter().map(|&[a, b]| (a as f64, b as f64)).collect(),
            unit: IntervalUnit::Frames,
            fps: None,
        }
    }

    /// Inclusive frame window of event `i`: `⌊a·fps⌋ ..= ⌈b·fps⌉` for
    /// intervals in seconds.
    pub fn frame_window(&self, i: usize) -> Result<(i64, i64)> {
        let (a, b) = self.intervals[i];
        match self.unit {
            IntervalUnit::Frames => Ok((a.floor() as i64, b.ceil() as i64)),
            IntervalUnit::Seconds => {
                let fps = self.fps.ok_or(Error::MissingFps)?;
                Ok(((a * fps).floor() as i64, (b * fps).ceil() as i64))
            }
        }
    }
}

/// Whether the sampled set touches the anomaly frames.
pub fn frame_recall(samples: &[usize], anomaly_frames: &[usize]) -> bool {
    let anomalies: BTreeSet<usize> = anomaly_frames.iter().copied().collect();
    samples.iter().any(|t| anomalies.contains(t))
}

/// Per-event hit flags and whether every event was hit.
pub fn event_metrics(samples: &[usize], ann: &EventAnnotation) -> Result<(Vec<bool>, bool)> {
    let sorted: BTreeSet<i64> = samples.iter().map(|&t| t as i64).collect();
    let hits = (0..ann.intervals.len())
        .map(|i| {
            let (lo, hi) = ann.frame_window(i)?;
            Ok(lo <= hi && sorted.range(lo..=hi).next().is_some())
        })
        .collect::<Result<Vec<bool>>>()?;
    let all_hit = hits.iter().all(|&h| h);
    Ok((hits, all_hit))
}

/// `Dist(𝒦) = 1 − (1/T) Σ_t max_{k∈𝒦} A_{tk}`.
pub fn distortion(seq: &FeatureSequence, samples: &[usize]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    if let Some(&bad) = samples.iter().find(|&&k| k >= seq.frame_count()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            len: seq.frame_count(),
        });
    }
    let normalized;
    let seq = if seq.is_normalized() {
        seq
    } else {
        normalized = l2_normalize(seq);
        &normalized
    };
    let mut total = 0.0;
    for t in 0..seq.frame_count() {
        let best = samples
            .iter()
            .map(|&k| dot(seq.frame(t), seq.frame(k)))
            .fold(f64::NEG_INFINITY, f64::max);
        total += best;
    }
    Ok(1.0 - total / seq.frame_count() as f64)
}

/// One video of a suite: features, ground truth, sampled indices and the
/// budget they were drawn under.
#[derive(Debug, Clone, Copy)]
pub struct VideoRun<'a> {
    pub id: &'a str,
    pub features: &'a FeatureSequence,
    pub truth: &'a SyntheticTruth,
    pub samples: &'a [usize],
    pub budget_k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VideoRow {
    pub video_id: String,
    #[serde(rename = "K")]
    pub budget_k: usize,
    pub sampled: usize,
    /// `None` when the video has no anomaly frames.
    pub hit: Option<bool>,
    pub events_total: usize,
    pub events_hit: usize,
    pub dist: f64,
}

/// Suite-level metrics. Rates are `None` when their denominator is empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub frame_recall: Option<f64>,
    pub event_recall: Option<f64>,
    pub complete_coverage: Option<f64>,
    pub distortion: f64,
    pub per_video: Vec<VideoRow>,
}

pub fn evaluate_video(run: &VideoRun<'_>) -> Result<VideoRow> {
    let hit = (!run.truth.anomaly_frames.is_empty())
        .then(|| frame_recall(run.samples, &run.truth.anomaly_frames));
    let ann = EventAnnotation::from_frames(&run.truth.event_intervals);
    let (hits, _) = event_metrics(run.samples, &ann)?;
    Ok(VideoRow {
        video_id: run.id.to_string(),
        budget_k: run.budget_k,
        sampled: run.samples.len(),
        hit,
        events_total: hits.len(),
        events_hit: hits.iter().filter(|&&h| h).count(),
        dist: distortion(run.features, run.samples)?,
    })
}

/// Folds per-video rows in order.
pub fn aggregate(rows: Vec<VideoRow>) -> Result<EvalReport> {
    if rows.is_empty() {
        return Err(Error::EmptySuite);
    }
    let ratio = |num: usize, den: usize| (den > 0).then(|| num as f64 / den as f64);
    let with_anomaly = rows.iter().filter(|r| r.hit.is_some()).count();
    let hits = rows.iter().filter(|r| r.hit == Some(true)).count();
    let events: usize = rows.iter().map(|r| r.events_total).sum();
    let events_hit: usize = rows.iter().map(|r| r.events_hit).sum();
    let with_events = rows.iter().filter(|r| r.events_total > 0).count();
    let complete = rows
        .iter()
        .filter(|r| r.events_total > 0 && r.events_hit == r.events_total)
        .count();
    let distortion = rows.iter().map(|r| r.dist).sum::<f64>() / rows.len() as f64;
    Ok(EvalReport {
        frame_recall: ratio(hits, with_anomaly),
        event_recall: ratio(events_hit, events),
        complete_coverage: ratio(complete, with_events),
        distortion,
        per_video: rows,
    })
}

pub fn evaluate_suite(videos: &[VideoRun<'_>]) -> Result<EvalReport> {
    if videos.is_empty() {
        return Err(Error::EmptySuite);
    }
    let rows = videos.iter().map(evaluate_video).collect::<Result<Vec<_>>>()?;
    aggregate(rows)
}

impl EvalReport {
    /// Columns `video_id,K,hit,events_total,events_hit,dist`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["video_id", "K", "hit", "events_total", "events_hit", "dist"])
            .map_err(csv_err)?;
        for r in &self.per_video {
            let hit = match r.hit {
                Some(true) => "1",
                Some(false) => "0",
                None => "",
            };
            w.write_record([
                r.video_id.clone(),
                r.budget_k.to_string(),
                hit.to_string(),
                r.events_total.to_string(),
                r.events_hit.to_string(),
                format!("{:.6}", r.dist),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}
