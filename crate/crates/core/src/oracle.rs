//! Brute-force reference implementations for tests.
//!
//! Nothing here calls into the sampler modules: affinities are recomputed
//! from raw vectors, scores are literal loops over ordered pairs, and the
//! optimum-distortion search enumerates every subset.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::feature_store::FeatureSequence;

fn raw_dot(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for d in 0..a.len() {
        s += a[d] * b[d];
    }
    s
}

/// Cosine from scratch: `⟨a, b⟩ / (‖a‖ ‖b‖)`.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    raw_dot(a, b) / (raw_dot(a, a).sqrt() * raw_dot(b, b).sqrt())
}

/// Literal ordered-pair evaluation of the windowed boundary score.
pub fn naive_boundary_score(seq: &FeatureSequence, t: usize, k: usize, segment: Range<usize>) -> Result<f64> {
    if segment.end > seq.frame_count() || t <= segment.start || t >= segment.end || k == 0 {
        return Err(Error::WindowOutOfSegment {
            t,
            start: segment.start,
            end: segment.end,
        });
    }
    let k = k.min(t - segment.start).min(segment.end - t);
    let minus: Vec<usize> = (t - k..t).collect();
    let plus: Vec<usize> = (t..t + k).collect();
    let mean_within = |w: &[usize]| {
        if w.len() == 1 {
            return 1.0;
        }
        let mut s = 0.0;
        let mut n = 0usize;
        for &i in w {
            for &j in w {
                if i != j {
                    s += cosine(seq.frame(i), seq.frame(j));
                    n += 1;
                }
            }
        }
        s / n as f64
    };
    let mut cross = 0.0;
    for &i in &plus {
        for &j in &minus {
            cross += cosine(seq.frame(i), seq.frame(j));
        }
    }
    cross /= (k * k) as f64;
    Ok(0.5 * (mean_within(&plus) + mean_within(&minus)) - cross)
}

fn min_max(x: &[f64]) -> Vec<f64> {
    let mut lo = x[0];
    let mut hi = x[0];
    for &v in x {
        if v < lo {
            lo = v;
        }
        if v > hi {
            hi = v;
        }
    }
    if hi == lo {
        return vec![0.0; x.len()];
    }
    x.iter().map(|v| (v - lo) / (hi - lo)).collect()
}

/// Typicality, volatility and their normalized forms for one shot.
#[derive(Debug, Clone, PartialEq)]
pub struct NaiveShotScores {
    pub g: Vec<f64>,
    pub v: Vec<f64>,
    pub g_hat: Vec<f64>,
    pub v_hat: Vec<f64>,
}

pub fn naive_shot_scores(seq: &FeatureSequence, segment: Range<usize>, neighborhood: usize) -> NaiveShotScores {
    let frames: Vec<usize> = segment.collect();
    let len = frames.len();
    if len == 1 {
        return NaiveShotScores {
            g: vec![1.0],
            v: vec![0.0],
            g_hat: vec![0.0],
            v_hat: vec![0.0],
        };
    }
    let mut g = Vec::new();
    let mut v = Vec::new();
    for (a, &i) in frames.iter().enumerate() {
        let mut s = 0.0;
        for &j in &frames {
            if j != i {
                s += cosine(seq.frame(i), seq.frame(j));
            }
        }
        g.push(s / (len - 1) as f64);
        let mut ns = 0.0;
        let mut count = 0;
        for (b, &j) in frames.iter().enumerate() {
            if b != a && a.abs_diff(b) <= neighborhood {
                ns += cosine(seq.frame(i), seq.frame(j));
                count += 1;
            }
        }
        v.push(1.0 - ns / count as f64);
    }
    NaiveShotScores {
        g_hat: min_max(&g),
        v_hat: min_max(&v),
        g,
        v,
    }
}

/// Evaluates both selection objectives at every frame.
pub fn exhaustive_pair(g_hat: &[f64], v_hat: &[f64], lambda: f64, alpha: f64) -> (usize, Option<usize>) {
    let len = g_hat.len();
    let common: Vec<f64> = (0..len)
        .map(|i| lambda * g_hat[i] - (1.0 - lambda) * v_hat[i])
        .collect();
    let mut t_com = 0;
    for i in 0..len {
        if common[i] > common[t_com] {
            t_com = i;
        }
    }
    let mut t_uni: Option<usize> = None;
    for i in 0..len {
        if i == t_com {
            continue;
        }
        let u = alpha * (1.0 - g_hat[i]) + (1.0 - alpha) * v_hat[i];
        match t_uni {
            Some(j) if alpha * (1.0 - g_hat[j]) + (1.0 - alpha) * v_hat[j] >= u => {}
            _ => t_uni = Some(i),
        }
    }
    (t_com, t_uni)
}

/// Greedy segmentation from naive boundary scores, same rules as the
/// production path, quadratic per candidate.
pub fn naive_greedy_segment(
    seq: &FeatureSequence,
    target: usize,
    window: (usize, usize),
    shot_len: (usize, usize),
) -> Vec<Range<usize>> {
    let best = |seg: &Range<usize>| -> Option<(usize, f64)> {
        let k = (seg.len() / 20).max(window.0).min(window.1);
        let mut out: Option<(usize, f64)> = None;
        for t in seg.clone() {
            if t - seg.start < shot_len.0 || seg.end - t < shot_len.0 {
                continue;
            }
            let b = naive_boundary_score(seq, t, k, seg.clone()).expect("interior candidate");
            if out.is_none() || b > out.unwrap().1 {
                out = Some((t, b));
            }
        }
        out
    };
    let mut segs: Vec<Range<usize>> = std::iter::once(0..seq.frame_count()).collect();
    let split = |segs: &mut Vec<Range<usize>>, idx: usize, t: usize| {
        let s = segs.remove(idx);
        segs.insert(idx, t..s.end);
        segs.insert(idx, s.start..t);
    };
    while segs.len() < target {
        let mut choice: Option<(usize, usize, f64)> = None;
        for (idx, s) in segs.iter().enumerate() {
            if let Some((t, b)) = best(s) {
                if choice.is_none() || b > choice.unwrap().2 {
                    choice = Some((idx, t, b));
                }
            }
        }
        let Some((idx, t, _)) = choice else { break };
        split(&mut segs, idx, t);
    }
    loop {
        let mut choice: Option<(usize, usize)> = None;
        for (idx, s) in segs.iter().enumerate() {
            if s.len() > shot_len.1 && (choice.is_none() || s.len() > segs[choice.unwrap().0].len()) {
                if let Some((t, _)) = best(s) {
                    choice = Some((idx, t));
                }
            }
        }
        let Some((idx, t)) = choice else { break };
        split(&mut segs, idx, t);
    }
    segs
}

/// Mean residual `1 − max_k ⟨c_t, c_k⟩` for unit vectors.
pub fn naive_distortion(seq: &FeatureSequence, samples: &[usize]) -> f64 {
    let mut total = 0.0;
    for t in 0..seq.frame_count() {
        let mut best = f64::NEG_INFINITY;
        for &k in samples {
            let a = raw_dot(seq.frame(t), seq.frame(k));
            if a > best {
                best = a;
            }
        }
        total += best;
    }
    1.0 - total / seq.frame_count() as f64
}

/// Enumerates all `C(T, K)` subsets (`T ≤ 14`, `K ≤ 4`) and returns the
/// lexicographically first minimizer of the distortion.
pub fn exhaustive_min_distortion(seq: &FeatureSequence, k: usize) -> Result<(Vec<usize>, f64)> {
    let t = seq.frame_count();
    if t > 14 || k > 4 {
        return Err(Error::TooLarge(format!("T={t}, K={k} exceeds T<=14, K<=4")));
    }
    if k == 0 || k > t {
        return Err(Error::InvalidBudget(format!("K={k} for T={t}")));
    }
    let mut combo: Vec<usize> = (0..k).collect();
    let mut best = (combo.clone(), naive_distortion(seq, &combo));
    loop {
        // next combination in lexicographic order
        let mut i = k;
        while i > 0 && combo[i - 1] == t - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        combo[i - 1] += 1;
        for j in i..k {
            combo[j] = combo[j - 1] + 1;
        }
        let d = naive_distortion(seq, &combo);
        if d < best.1 {
            best = (combo.clone(), d);
        }
    }
    Ok(best)
}

/// Set-intersection frame recall over a suite: hits / videos with anomalies.
pub fn naive_recall(samples: &[Vec<usize>], anomalies: &[Vec<usize>]) -> Option<f64> {
    let mut hits = 0;
    let mut den = 0;
    for (s, a) in samples.iter().zip(anomalies) {
        if a.is_empty() {
            continue;
        }
        den += 1;
        if s.iter().any(|x| a.contains(x)) {
            hits += 1;
        }
    }
    (den > 0).then(|| hits as f64 / den as f64)
}
