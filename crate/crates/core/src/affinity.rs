//! Cosine affinities between frames of a normalized sequence.
//!
//! Nothing here caches a `T × T` matrix. Callers ask for single pairs,
//! rectangular blocks of at most `block_size` rows and columns, or the
//! square matrix of one shot.

use std::ops::Range;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::feature_store::FeatureSequence;

pub const DEFAULT_BLOCK_SIZE: usize = 600;
pub const DEFAULT_MAX_SEGMENT: usize = 300;

/// Dot product with a fixed left-to-right summation order.
///
/// Every affinity in the crate goes through this function, which is what
/// makes blocked and element-wise evaluation bit-identical.
#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, Copy)]
pub struct AffinityView<'a> {
    seq: &'a FeatureSequence,
    block_size: usize,
    max_segment: usize,
}

impl<'a> AffinityView<'a> {
    /// Fails unless `seq` has been through [`crate::l2_normalize`].
    pub fn new(seq: &'a FeatureSequence) -> Result<Self> {
        if !seq.is_normalized() {
            return Err(Error::InvalidConfig(
                "affinities need an l2-normalized sequence".into(),
            ));
        }
        Ok(Self {
            seq,
            block_size: DEFAULT_BLOCK_SIZE,
            max_segment: DEFAULT_MAX_SEGMENT,
        })
    }

    pub fn with_block_size(mut self, block_size: usize) -> Result<Self> {
        if block_size == 0 {
            return Err(Error::InvalidConfig("block size must be positive".into()));
        }
        self.block_size = block_size;
        Ok(self)
    }

    /// Longest segment [`Self::shot_affinity`] will materialize.
    pub fn with_max_segment(mut self, max_segment: usize) -> Result<Self> {
        if max_segment == 0 {
            return Err(Error::InvalidConfig("max segment must be positive".into()));
        }
        self.max_segment = max_segment;
        Ok(self)
    }

    pub fn sequence(&self) -> &'a FeatureSequence {
        self.seq
    }

    pub fn len(&self) -> usize {
        self.seq.frame_count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    fn check_index(&self, index: usize) -> Result<()> {
        if index >= self.len() {
            return Err(Error::IndexOutOfRange {
                index,
                len: self.len(),
            });
        }
        Ok(())
    }

    fn check_range(&self, r: &Range<usize>) -> Result<()> {
        if r.start > r.end || r.end > self.len() {
            return Err(Error::IndexOutOfRange {
                index: r.end.max(r.start),
                len: self.len(),
            });
        }
        Ok(())
    }

    /// `A_ij = ⟨c_i, c_j⟩` without bounds checks.
    #[inline]
    pub(crate) fn get(&self, i: usize, j: usize) -> f64 {
        dot(self.seq.frame(i), self.seq.frame(j))
    }

    pub fn pair_affinity(&self, i: usize, j: usize) -> Result<f64> {
        self.check_index(i)?;
        self.check_index(j)?;
        Ok(self.get(i, j))
    }

    /// Dense block `rows × cols`; each side at most `block_size` frames.
    pub fn block_affinity(&self, rows: Range<usize>, cols: Range<usize>) -> Result<Array2<f64>> {
        self.check_range(&rows)?;
        self.check_range(&cols)?;
        for r in [&rows, &cols] {
            if r.len() > self.block_size {
                return Err(Error::BlockTooLarge {
                    len: r.len(),
                    block_size: self.block_size,
                });
            }
        }
        Ok(Array2::from_shape_fn((rows.len(), cols.len()), |(a, b)| {
            self.get(rows.start + a, cols.start + b)
        }))
    }

    /// Visits `rows × cols` one block at a time, in row-block then
    /// column-block order. The callback receives the block origin.
    pub fn for_each_block<F>(&self, rows: Range<usize>, cols: Range<usize>, mut f: F) -> Result<()>
    where
        F: FnMut(usize, usize, &Array2<f64>),
    {
        self.check_range(&rows)?;
        self.check_range(&cols)?;
        let bs = self.block_size;
        for r0 in rows.clone().step_by(bs) {
            let r1 = (r0 + bs).min(rows.end);
            for c0 in cols.clone().step_by(bs) {
                let c1 = (c0 + bs).min(cols.end);
                let block = self.block_affinity(r0..r1, c0..c1)?;
                f(r0, c0, &block);
            }
        }
        Ok(())
    }

    /// `L × L` affinity matrix of one segment.
    pub fn shot_affinity(&self, segment: Range<usize>) -> Result<Array2<f64>> {
        self.check_range(&segment)?;
        if segment.len() > self.max_segment {
            return Err(Error::SegmentTooLong {
                len: segment.len(),
                max: self.max_segment,
            });
        }
        let start = segment.start;
        let mut out = Array2::zeros((segment.len(), segment.len()));
        self.for_each_block(segment.clone(), segment, |r0, c0, block| {
            for ((a, b), v) in block.indexed_iter() {
                out[[r0 - start + a, c0 - start + b]] = *v;
            }
        })?;
        Ok(out)
    }
}
