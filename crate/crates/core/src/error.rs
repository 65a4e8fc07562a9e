use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("dimension mismatch: expected {expected} values, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite value at frame {frame}, component {component}")]
    NonFiniteValue { frame: usize, component: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid budget: {0}")]
    InvalidBudget(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("index {index} out of range for {len} frames")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("block of {len} frames exceeds block size {block_size}")]
    BlockTooLarge { len: usize, block_size: usize },
    #[error("segment of {len} frames exceeds maximum of {max}")]
    SegmentTooLong { len: usize, max: usize },
    #[error("window around t={t} does not fit inside segment {start}..{end}")]
    WindowOutOfSegment { t: usize, start: usize, end: usize },
    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
    #[error("frame rate required to map seconds to frames")]
    MissingFps,
    #[error("sample set is empty")]
    EmptySampleSet,
    #[error("evaluation suite is empty")]
    EmptySuite,
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("instance too large for exhaustive search: {0}")]
    TooLarge(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
