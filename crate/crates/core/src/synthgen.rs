//! Synthetic feature sequences with planted shot boundaries and transient
//! anomalies.
//!
//! A latent state follows a piecewise random walk: at each shot start it is
//! redrawn as `c̃ ~ N(0, s²·I)`, inside a shot it moves by `z ~ N(0, σ_z²·I)`.
//! Frames inside an anomaly interval emit an outlier draw `η` instead of the
//! latent state; the walk itself carries on underneath, so the deviation is
//! transient.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, StudentT};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feature_store::FeatureSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnomalyMode {
    /// Student-t with 2 degrees of freedom per component.
    HeavyTail,
    /// Gaussian with standard deviation `anomaly_scale`.
    HighVariance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub dim: usize,
    pub shots: Vec<usize>,
    pub shot_mean_scale: f64,
    pub walk_sigma: f64,
    /// `(start_frame, length)` pairs.
    pub anomaly_intervals: Vec<(usize, usize)>,
    pub anomaly_mode: AnomalyMode,
    pub anomaly_scale: f64,
    /// Inclusive bounds on anomaly interval length.
    pub anomaly_len: (usize, usize),
    pub fps: f64,
    pub seed: u64,
    pub renormalize: bool,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            dim: 64,
            shots: vec![100],
            shot_mean_scale: 1.0,
            walk_sigma: 0.002,
            anomaly_intervals: Vec::new(),
            anomaly_mode: AnomalyMode::HighVariance,
            anomaly_scale: 0.02,
            anomaly_len: (2, 5),
            fps: 24.0,
            seed: 0,
            renormalize: true,
        }
    }
}

impl SyntheticSpec {
    pub fn frame_count(&self) -> usize {
        self.shots.iter().sum()
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |m: String| Err(Error::InvalidSpec(m));
        if self.dim == 0 {
            return invalid("dim must be positive".into());
        }
        if self.shots.is_empty() || self.shots.contains(&0) {
            return invalid("need at least one shot, each at least one frame long".into());
        }
        for (name, v) in [
            ("shot_mean_scale", self.shot_mean_scale),
            ("walk_sigma", self.walk_sigma),
            ("anomaly_scale", self.anomaly_scale),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return invalid(format!("{name} must be finite and non-negative, got {v}"));
            }
        }
        if !(self.fps.is_finite() && self.fps > 0.0) {
            return invalid(format!("fps must be positive, got {}", self.fps));
        }
        let (lo, hi) = self.anomaly_len;
        if lo == 0 || lo > hi {
            return invalid(format!("anomaly length range {lo}..={hi} is empty"));
        }
        let total = self.frame_count();
        let mut sorted = self.anomaly_intervals.clone();
        sorted.sort_unstable();
        let mut prev_end = 0;
        for (i, &(start, len)) in sorted.iter().enumerate() {
            if !(lo..=hi).contains(&len) {
                return invalid(format!("anomaly length {len} outside {lo}..={hi}"));
            }
            if start + len > total {
                return invalid(format!("anomaly {start}+{len} runs past {total} frames"));
            }
            if i > 0 && start < prev_end {
                return invalid(format!("anomaly at {start} overlaps the previous one"));
            }
            prev_end = start + len;
        }
        Ok(())
    }
}

/// Exact ground truth of a generated sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticTruth {
    /// Frames starting a new shot, excluding frame 0.
    pub boundary_indices: Vec<usize>,
    /// Sorted frames inside any anomaly interval.
    pub anomaly_frames: Vec<usize>,
    /// Inclusive `[a, b]` frame intervals, sorted by start.
    pub event_intervals: Vec<[usize; 2]>,
    pub fps: f64,
}

#[derive(Serialize, Deserialize)]
struct TruthDump {
    boundaries: Vec<usize>,
    events: Vec<[usize; 2]>,
    fps: f64,
}

impl SyntheticTruth {
    /// `{"boundaries": [...], "events": [[a, b], ...], "fps": ...}`
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&TruthDump {
            boundaries: self.boundary_indices.clone(),
            events: self.event_intervals.clone(),
            fps: self.fps,
        })?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let dump: TruthDump = serde_json::from_str(text)?;
        let mut anomaly_frames: Vec<usize> = dump.events.iter().flat_map(|&[a, b]| a..=b).collect();
        anomaly_frames.sort_unstable();
        anomaly_frames.dedup();
        Ok(Self {
            boundary_indices: dump.boundaries,
            anomaly_frames,
            event_intervals: dump.events,
            fps: dump.fps,
        })
    }
}

fn project(v: &mut [f64]) {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    } else {
        v.fill(0.0);
        v[0] = 1.0;
    }
}

pub fn generate(spec: &SyntheticSpec) -> Result<(FeatureSequence, SyntheticTruth)> {
    spec.validate()?;
    let total = spec.frame_count();
    let dim = spec.dim;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mut is_anomaly = vec![false; total];
    for &(start, len) in &spec.anomaly_intervals {
        is_anomaly[start..start + len].fill(true);
    }
    let mut shot_start = vec![false; total];
    let mut acc = 0;
    for &len in &spec.shots {
        shot_start[acc] = true;
        acc += len;
    }

    let student = StudentT::new(2.0).expect("2 degrees of freedom is valid");
    let mut state = vec![0.0; dim];
    let mut data = Vec::with_capacity(total * dim);
    for t in 0..total {
        if shot_start[t] {
            for x in state.iter_mut() {
                let g: f64 = rng.sample(StandardNormal);
                *x = spec.shot_mean_scale * g;
            }
            if spec.renormalize {
                project(&mut state);
            }
        } else if spec.walk_sigma > 0.0 {
            for x in state.iter_mut() {
                let g: f64 = rng.sample(StandardNormal);
                *x += spec.walk_sigma * g;
            }
            if spec.renormalize {
                project(&mut state);
            }
        }
        if is_anomaly[t] {
            let mut eta: Vec<f64> = (0..dim)
                .map(|_| {
                    let g: f64 = match spec.anomaly_mode {
                        AnomalyMode::HeavyTail => student.sample(&mut rng),
                        AnomalyMode::HighVariance => rng.sample(StandardNormal),
                    };
                    spec.anomaly_scale * g
                })
                .collect();
            if spec.renormalize {
                project(&mut eta);
            }
            data.extend_from_slice(&eta);
        } else {
            data.extend_from_slice(&state);
        }
    }

    let mut seq = FeatureSequence::from_flat(data, total, dim, spec.fps)?;
    if spec.renormalize {
        seq = seq.assume_normalized();
    }
    let mut intervals = spec.anomaly_intervals.clone();
    intervals.sort_unstable();
    let truth = SyntheticTruth {
        boundary_indices: (1..total).filter(|&t| shot_start[t]).collect(),
        anomaly_frames: (0..total).filter(|&t| is_anomaly[t]).collect(),
        event_intervals: intervals.iter().map(|&(s, l)| [s, s + l - 1]).collect(),
        fps: spec.fps,
    };
    Ok((seq, truth))
}

/// Layout of a benchmark suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkConfig {
    pub count: usize,
    pub frames: usize,
    pub shots: usize,
    /// Lower bound on every shot's length; lowered to `frames / shots` when
    /// that is smaller.
    pub min_shot_len: usize,
    pub dim: usize,
    pub fps: f64,
    pub shot_mean_scale: f64,
    pub walk_sigma: f64,
    pub anomaly_scale: f64,
    /// `None` alternates heavy-tailed and high-variance anomalies by index.
    pub anomaly_mode: Option<AnomalyMode>,
    pub anomaly_len: (usize, usize),
}

impl Default for BenchmarkConfig {
    /// 200 videos of 30 s at 24 fps, three shots of at least 60 frames, one
    /// anomaly of 2-5 frames each, 256-d unit features.
    fn default() -> Self {
        let walk_sigma = 0.001;
        Self {
            count: 200,
            frames: 720,
            shots: 3,
            min_shot_len: 60,
            dim: 256,
            fps: 24.0,
            shot_mean_scale: 1.0,
            walk_sigma,
            anomaly_scale: 10.0 * walk_sigma,
            anomaly_mode: None,
            anomaly_len: (2, 5),
        }
    }
}

/// One generated benchmark video.
#[derive(Debug, Clone)]
pub struct BenchmarkVideo {
    pub id: String,
    pub spec: SyntheticSpec,
    pub features: FeatureSequence,
    pub truth: SyntheticTruth,
}

impl BenchmarkConfig {
    /// Draws the layout of video `index` and generates it.
    ///
    /// Seeds are split by ChaCha stream: video `index` uses the generator
    /// keyed by `seed` on stream `index`, so videos are independent of each
    /// other and of the suite size.
    pub fn video(&self, seed: u64, index: usize) -> Result<BenchmarkVideo> {
        if self.shots == 0 || self.frames < self.shots {
            return Err(Error::InvalidSpec(format!(
                "cannot split {} frames into {} shots",
                self.frames, self.shots
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index as u64);

        let min_len = self.min_shot_len.min(self.frames / self.shots).max(1);
        let slack = self.frames - min_len * self.shots;
        let mut cuts: Vec<usize> = (0..self.shots - 1).map(|_| rng.random_range(0..=slack)).collect();
        cuts.sort_unstable();
        let mut shots = Vec::with_capacity(self.shots);
        let mut prev = 0;
        for c in cuts.into_iter().chain(std::iter::once(slack)) {
            shots.push(min_len + c - prev);
            prev = c;
        }

        let (lo, hi) = self.anomaly_len;
        let len = rng.random_range(lo..=hi);
        // Valid starts keep the interval inside one shot and off its first frame.
        let mut starts = Vec::new();
        let mut a = 0;
        for &l in &shots {
            if l > len {
                starts.extend(a + 1..=a + l - len);
            }
            a += l;
        }
        if starts.is_empty() {
            return Err(Error::InvalidSpec(format!(
                "no shot is long enough for a {len}-frame anomaly"
            )));
        }
        let start = starts[rng.random_range(0..starts.len())];
        let mode = self.anomaly_mode.unwrap_or(if index.is_multiple_of(2) {
            AnomalyMode::HeavyTail
        } else {
            AnomalyMode::HighVariance
        });

        let spec = SyntheticSpec {
            dim: self.dim,
            shots,
            shot_mean_scale: self.shot_mean_scale,
            walk_sigma: self.walk_sigma,
            anomaly_intervals: vec![(start, len)],
            anomaly_mode: mode,
            anomaly_scale: self.anomaly_scale,
            anomaly_len: self.anomaly_len,
            fps: self.fps,
            seed: rng.random(),
            renormalize: true,
        };
        let (features, truth) = generate(&spec)?;
        Ok(BenchmarkVideo {
            id: format!("syn_{index:04}"),
            spec,
            features,
            truth,
        })
    }

    pub fn generate(&self, seed: u64) -> Result<Vec<BenchmarkVideo>> {
        (0..self.count).map(|i| self.video(seed, i)).collect()
    }
}

/// The default 200-video suite.
pub fn default_benchmark(seed: u64) -> Vec<(FeatureSequence, SyntheticTruth)> {
    BenchmarkConfig::default()
        .generate(seed)
        .expect("default benchmark layout is valid")
        .into_iter()
        .map(|v| (v.features, v.truth))
        .collect()
}
