//! Frame feature sequences and their on-disk formats.
//!
//! The binary format (`ISF1`) is little-endian:
//!
//! | offset | size | field                         |
//! |--------|------|-------------------------------|
//! | 0      | 4    | magic `b"ISF1"`               |
//! | 4      | 2    | format version, `u16` = 1     |
//! | 6      | 2    | reserved, `u16` = 0           |
//! | 8      | 8    | frame count `T`, `u64`        |
//! | 16     | 4    | dimension `n`, `u32`          |
//! | 20     | 1    | dtype code, `u8` (1 = f32)    |
//! | 21     | 3    | padding, zero                 |
//! | 24     | 4    | fps, `f32`                    |
//! | 28     | 4·T·n| payload, frame-major `f32`    |
//!
//! The text fallback is a headerless CSV with one frame per row; its frame
//! rate has to be supplied by the caller.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const ISF_MAGIC: &[u8; 4] = b"ISF1";
pub const ISF_VERSION: u16 = 1;
pub const ISF_DTYPE_F32: u8 = 1;
pub const ISF_HEADER_LEN: usize = 28;

/// Tolerance on `| ‖c_t‖ − 1 |` for a sequence flagged as normalized.
pub const UNIT_NORM_TOL: f64 = 1e-5;

/// `T` feature vectors of dimension `n`, stored frame-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSequence {
    data: Vec<f64>,
    frame_count: usize,
    dim: usize,
    fps: f64,
    normalized: bool,
}

impl FeatureSequence {
    /// Builds a sequence from a frame-major buffer of `frame_count * dim` values.
    pub fn from_flat(data: Vec<f64>, frame_count: usize, dim: usize, fps: f64) -> Result<Self> {
        if frame_count == 0 || dim == 0 {
            return Err(Error::InvalidConfig(format!(
                "feature sequence needs T >= 1 and n >= 1, got T={frame_count}, n={dim}"
            )));
        }
        let expected = frame_count
            .checked_mul(dim)
            .ok_or_else(|| Error::InvalidConfig("T * n overflows".into()))?;
        if data.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: data.len(),
            });
        }
        if !(fps.is_finite() && fps > 0.0) {
            return Err(Error::InvalidConfig(format!("fps must be positive, got {fps}")));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue {
                frame: pos / dim,
                component: pos % dim,
            });
        }
        Ok(Self {
            data,
            frame_count,
            dim,
            fps,
            normalized: false,
        })
    }

    /// Builds a sequence from one vector per frame.
    pub fn from_frames(frames: &[Vec<f64>], fps: f64) -> Result<Self> {
        let dim = frames.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(frames.len() * dim);
        for frame in frames {
            if frame.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: frame.len(),
                });
            }
            data.extend_from_slice(frame);
        }
        Self::from_flat(data, frames.len(), dim, fps)
    }

    pub fn frame_count(&self) -> usize {
        self.frame_count
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn fps(&self) -> f64 {
        self.fps
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Duration in seconds, `T / fps`.
    pub fn duration_seconds(&self) -> f64 {
        self.frame_count as f64 / self.fps
    }

    /// Feature vector of frame `t`.
    ///
    /// Panics if `t >= frame_count()`.
    pub fn frame(&self, t: usize) -> &[f64] {
        &self.data[t * self.dim..(t + 1) * self.dim]
    }

    pub fn frames(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    /// Checks the unit-norm claim against the data itself.
    pub fn has_unit_norms(&self) -> bool {
        self.frames()
            .all(|f| (norm(f) - 1.0).abs() <= UNIT_NORM_TOL)
    }

    /// Flags a sequence whose frames were projected onto the sphere upstream.
    pub(crate) fn assume_normalized(mut self) -> Self {
        debug_assert!(self.has_unit_norms());
        self.normalized = true;
        self
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Outcome of [`l2_normalize_report`].
#[derive(Debug, Clone)]
pub struct Normalized {
    pub sequence: FeatureSequence,
    /// Frames whose vector was zero and got replaced by `e₁`.
    pub zero_frames: Vec<usize>,
}

/// Projects every frame onto the unit sphere.
///
/// Zero vectors have no direction; they are replaced by `e₁ = (1, 0, …, 0)`
/// and a warning is logged.
pub fn l2_normalize(seq: &FeatureSequence) -> FeatureSequence {
    l2_normalize_report(seq).sequence
}

pub fn l2_normalize_report(seq: &FeatureSequence) -> Normalized {
    let dim = seq.dim;
    let mut data = Vec::with_capacity(seq.data.len());
    let mut zero_frames = Vec::new();
    for (t, frame) in seq.frames().enumerate() {
        let n = norm(frame);
        if n > 0.0 {
            data.extend(frame.iter().map(|x| x / n));
        } else {
            zero_frames.push(t);
            data.push(1.0);
            data.extend(std::iter::repeat_n(0.0, dim - 1));
        }
    }
    if !zero_frames.is_empty() {
        log::warn!(
            "{} zero feature vector(s) replaced by e1 (first at frame {})",
            zero_frames.len(),
            zero_frames[0]
        );
    }
    Normalized {
        sequence: FeatureSequence {
            data,
            frame_count: seq.frame_count,
            dim,
            fps: seq.fps,
            normalized: true,
        },
        zero_frames,
    }
}

/// Sampling budget: either a rate in frames per second or an explicit count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BudgetSpec {
    Rate(f64),
    Count(usize),
}

// Absorbs representation error in `rate * duration` so that e.g. 0.1 * 30 s
// resolves to 3 frames rather than 4.
const CEIL_SLACK: f64 = 1e-9;

impl BudgetSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            BudgetSpec::Rate(r) if !(r.is_finite() && r > 0.0) => {
                Err(Error::InvalidBudget(format!("budget must be positive, got rate {r}")))
            }
            BudgetSpec::Count(0) => Err(Error::InvalidBudget("budget must be positive, got count 0".into())),
            _ => Ok(()),
        }
    }

    /// Resolves the frame budget `K` for a video of `frame_count` frames at `fps`.
    ///
    /// Rate budgets give `K = ⌈rate · T / fps⌉`; both modes are clamped to `[1, T]`.
    pub fn resolve(&self, frame_count: usize, fps: f64) -> Result<usize> {
        self.validate()?;
        let k = match *self {
            BudgetSpec::Rate(rate) => {
                let raw = rate * (frame_count as f64 / fps);
                let k = (raw - CEIL_SLACK * raw.max(1.0)).ceil();
                if k < 1.0 { 1 } else { k as usize }
            }
            BudgetSpec::Count(count) => count,
        };
        Ok(k.clamp(1, frame_count.max(1)))
    }
}

pub fn resolve_budget(spec: &BudgetSpec, seq: &FeatureSequence) -> Result<usize> {
    spec.resolve(seq.frame_count(), seq.fps())
}

/// Loads a feature file.
///
/// Files starting with the `ISF1` magic are read as binary. Otherwise a
/// `.csv`/`.txt` extension selects the text fallback, which needs `csv_fps`.
pub fn load_features(path: &Path, csv_fps: Option<f64>) -> Result<FeatureSequence> {
    let bytes = fs::read(path)?;
    if bytes.starts_with(ISF_MAGIC) {
        return decode_isf(&bytes);
    }
    let is_text = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("csv") || e.eq_ignore_ascii_case("txt"));
    if is_text {
        let fps = csv_fps.ok_or(Error::MissingFps)?;
        return decode_csv(&bytes, fps);
    }
    let shown = String::from_utf8_lossy(&bytes[..bytes.len().min(4)]).into_owned();
    Err(Error::MalformedHeader(format!("bad magic {shown:?}, expected \"ISF1\"")))
}

pub fn save_features(seq: &FeatureSequence, path: &Path) -> Result<()> {
    let file = fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    w.write_all(&encode_isf(seq))?;
    w.flush()?;
    Ok(())
}

/// Encodes to `ISF1`. Components are stored as `f32`.
pub fn encode_isf(seq: &FeatureSequence) -> Vec<u8> {
    let mut out = Vec::with_capacity(ISF_HEADER_LEN + seq.data.len() * 4);
    out.extend_from_slice(ISF_MAGIC);
    out.extend_from_slice(&ISF_VERSION.to_le_bytes());
    out.extend_from_slice(&0u16.to_le_bytes());
    out.extend_from_slice(&(seq.frame_count as u64).to_le_bytes());
    out.extend_from_slice(&(seq.dim as u32).to_le_bytes());
    out.push(ISF_DTYPE_F32);
    out.extend_from_slice(&[0u8; 3]);
    out.extend_from_slice(&(seq.fps as f32).to_le_bytes());
    for v in &seq.data {
        out.extend_from_slice(&(*v as f32).to_le_bytes());
    }
    out
}

pub fn decode_isf(bytes: &[u8]) -> Result<FeatureSequence> {
    if bytes.len() < ISF_HEADER_LEN {
        return Err(Error::MalformedHeader(format!(
            "file has {} bytes, header needs {ISF_HEADER_LEN}",
            bytes.len()
        )));
    }
    if &bytes[0..4] != ISF_MAGIC {
        let shown = String::from_utf8_lossy(&bytes[0..4]).into_owned();
        return Err(Error::MalformedHeader(format!("bad magic {shown:?}, expected \"ISF1\"")));
    }
    let u16_at = |o: usize| u16::from_le_bytes([bytes[o], bytes[o + 1]]);
    let version = u16_at(4);
    if version != ISF_VERSION {
        return Err(Error::MalformedHeader(format!("unsupported version {version}")));
    }
    if u16_at(6) != 0 {
        return Err(Error::MalformedHeader("reserved field is not zero".into()));
    }
    let frames = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes"));
    let dim = u32::from_le_bytes(bytes[16..20].try_into().expect("4 bytes"));
    let dtype = bytes[20];
    if dtype != ISF_DTYPE_F32 {
        return Err(Error::MalformedHeader(format!("unsupported dtype code {dtype}")));
    }
    if bytes[21..24] != [0, 0, 0] {
        return Err(Error::MalformedHeader("padding is not zero".into()));
    }
    let fps = f32::from_le_bytes(bytes[24..28].try_into().expect("4 bytes"));
    if !(fps.is_finite() && fps > 0.0) {
        return Err(Error::MalformedHeader(format!("fps must be positive, got {fps}")));
    }
    if frames == 0 || dim == 0 {
        return Err(Error::MalformedHeader(format!("empty shape T={frames}, n={dim}")));
    }
    let frames = usize::try_from(frames).map_err(|_| Error::MalformedHeader("T too large".into()))?;
    let dim = dim as usize;
    let expected = frames
        .checked_mul(dim)
        .ok_or_else(|| Error::MalformedHeader("T * n overflows".into()))?;
    let payload = &bytes[ISF_HEADER_LEN..];
    if payload.len() != expected.saturating_mul(4) {
        return Err(Error::DimensionMismatch {
            expected,
            found: payload.len() / 4,
        });
    }
    let data: Vec<f64> = payload
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")) as f64)
        .collect();
    FeatureSequence::from_flat(data, frames, dim, fps as f64)
}

fn decode_csv(bytes: &[u8], fps: f64) -> Result<FeatureSequence> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let mut data = Vec::new();
    let mut dim = None;
    let mut frames = 0;
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let n = *dim.get_or_insert(record.len());
        if record.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: record.len(),
            });
        }
        for field in record.iter() {
            let v: f64 = field
                .parse()
                .map_err(|_| Error::Parse(format!("row {}: not a number: {field:?}", frames + 1)))?;
            data.push(v);
        }
        frames += 1;
    }
    let dim = dim.ok_or_else(|| Error::Parse("no rows in CSV".into()))?;
    FeatureSequence::from_flat(data, frames, dim, fps)
}

/// Writes the text fallback: one frame per row, comma separated.
pub fn save_features_csv(seq: &FeatureSequence, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    for frame in seq.frames() {
        let row: Vec<String> = frame.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()?;
    Ok(())
}
