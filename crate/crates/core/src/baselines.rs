//! Reference samplers: uniform, top-K by an external score, and a
//! k-means medoid summarizer in the style of VSUMM.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::affinity::dot;
use crate::error::{Error, Result};
use crate::feature_store::{decode_isf, l2_normalize, FeatureSequence, ISF_MAGIC};

/// Per-frame scores from an external model.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTrack {
    pub scores: Vec<f64>,
    pub source: String,
}

impl ScoreTrack {
    pub fn new(scores: Vec<f64>, source: impl Into<String>) -> Result<Self> {
        if let Some(i) = scores.iter().position(|s| !s.is_finite()) {
            return Err(Error::NonFiniteValue { frame: i, component: 0 });
        }
        Ok(Self {
            scores,
            source: source.into(),
        })
    }

    /// Reads a one-score-per-line CSV or an ISF file with `n = 1`.
    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path)?;
        let source = path.display().to_string();
        if bytes.starts_with(ISF_MAGIC) {
            let seq = decode_isf(&bytes)?;
            if seq.dim() != 1 {
                return Err(Error::DimensionMismatch {
                    expected: 1,
                    found: seq.dim(),
                });
            }
            return Self::new(seq.as_flat().to_vec(), source);
        }
        let text = String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))?;
        let scores = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .enumerate()
            .map(|(i, l)| {
                l.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("line {}: not a number: {l:?}", i + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(scores, source)
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

fn check_budget(frame_count: usize, k: usize) -> Result<()> {
    if k == 0 || k > frame_count {
        return Err(Error::InvalidBudget(format!(
            "budget {k} must lie in 1..={frame_count}"
        )));
    }
    Ok(())
}

/// Replaces repeated targets with the nearest unused index (ties: lower).
fn dedup_fill(targets: &[usize], frame_count: usize) -> Vec<usize> {
    let mut used = BTreeSet::new();
    for &t in targets {
        if used.insert(t) {
            continue;
        }
        let mut d = 1;
        loop {
            if let Some(lo) = t.checked_sub(d).filter(|i| !used.contains(i)) {
                used.insert(lo);
                break;
            }
            if t + d < frame_count && !used.contains(&(t + d)) {
                used.insert(t + d);
                break;
            }
            d += 1;
        }
    }
    used.into_iter().collect()
}

/// Midpoints of `K` equal slices: `round_half_up((i + ½) · T / K)`.
pub fn uniform_sample(frame_count: usize, k: usize) -> Result<Vec<usize>> {
    check_budget(frame_count, k)?;
    // floor((2i+1)·T / 2K + ½) in integers
    let targets: Vec<usize> = (0..k)
        .map(|i| (((2 * i + 1) * frame_count + k) / (2 * k)).min(frame_count - 1))
        .collect();
    Ok(dedup_fill(&targets, frame_count))
}

/// The `K` highest-scoring frames; ties prefer the smaller index.
pub fn topk_by_score(track: &ScoreTrack, k: usize, frame_count: usize) -> Result<Vec<usize>> {
    if track.len() != frame_count {
        return Err(Error::LengthMismatch {
            expected: frame_count,
            found: track.len(),
        });
    }
    check_budget(frame_count, k)?;
    let mut order: Vec<usize> = (0..frame_count).collect();
    order.sort_by(|&a, &b| track.scores[b].total_cmp(&track.scores[a]).then(a.cmp(&b)));
    order.truncate(k);
    order.sort_unstable();
    Ok(order)
}

pub const KMEANS_MAX_ITER: usize = 100;
pub const KMEANS_TOL: f64 = 1e-6;

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// k-means++ seeding; returns frame indices used as initial centroids.
fn kmeans_pp(seq: &FeatureSequence, k: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let t_count = seq.frame_count();
    let mut centers = vec![rng.random_range(0..t_count)];
    let mut d2: Vec<f64> = seq.frames().map(|f| sq_dist(f, seq.frame(centers[0]))).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut chosen = t_count - 1;
            for (i, &w) in d2.iter().enumerate() {
                if w > 0.0 && target < w {
                    chosen = i;
                    break;
                }
                target -= w;
            }
            chosen
        } else {
            rng.random_range(0..t_count)
        };
        centers.push(next);
        for (i, f) in seq.frames().enumerate() {
            d2[i] = d2[i].min(sq_dist(f, seq.frame(next)));
        }
    }
    centers
}

/// Lloyd iterations on normalized features; returns the centroids.
pub fn kmeans(seq: &FeatureSequence, k: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    check_budget(seq.frame_count(), k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = seq.dim();
    let mut centroids: Vec<Vec<f64>> = kmeans_pp(seq, k, &mut rng)
        .into_iter()
        .map(|i| seq.frame(i).to_vec())
        .collect();
    for _ in 0..KMEANS_MAX_ITER {
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for f in seq.frames() {
            let mut best = (0, f64::INFINITY);
            for (c, centroid) in centroids.iter().enumerate() {
                let d = sq_dist(f, centroid);
                if d < best.1 {
                    best = (c, d);
                }
            }
            counts[best.0] += 1;
            sums[best.0].iter_mut().zip(f).for_each(|(s, x)| *s += x);
        }
        let mut shift: f64 = 0.0;
        for c in 0..k {
            // empty clusters keep their centroid
            if counts[c] == 0 {
                continue;
            }
            let updated: Vec<f64> = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            shift = shift.max(sq_dist(&updated, &centroids[c]).sqrt());
            centroids[c] = updated;
        }
        if shift <= KMEANS_TOL {
            break;
        }
    }
    Ok(centroids)
}

/// Cluster representatives: each centroid mapped to its most cosine-similar
/// unused frame.
pub fn medoid_sample(seq: &FeatureSequence, k: usize, seed: u64) -> Result<Vec<usize>> {
    check_budget(seq.frame_count(), k)?;
    let normalized;
    let seq = if seq.is_normalized() {
        seq
    } else {
        normalized = l2_normalize(seq);
        &normalized
    };
    let centroids = kmeans(seq, k, seed)?;
    let mut used = BTreeSet::new();
    for centroid in &centroids {
        let norm = dot(centroid, centroid).sqrt();
        let mut best: Option<(usize, f64)> = None;
        for (i, f) in seq.frames().enumerate() {
            if used.contains(&i) {
                continue;
            }
            let cos = if norm > 0.0 { dot(f, centroid) / norm } else { 0.0 };
            if best.is_none_or(|(_, b)| cos > b) {
                best = Some((i, cos));
            }
        }
        used.insert(best.expect("k <= T leaves an unused frame").0);
    }
    Ok(used.into_iter().collect())
}
