//! Object-centric affine alignment of relative depth across overlapping
//! video chunks, and metric rescaling from the hand width.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DepthAlignError {
    #[error("sample lengths differ: {prev} vs {cur}")]
    LengthMismatch { prev: usize, cur: usize },
    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("depth samples must be positive and finite")]
    NonPositiveDepth,
    #[error("current chunk depths have zero variance")]
    DegenerateFit,
    #[error("fitted scale {alpha} is not positive")]
    InvalidScale { alpha: f64 },
    #[error("hand width extents must have max > min")]
    InvalidExtents,
    #[error("overlap {index} pairs chunks {prev} -> {cur}; expected consecutive chunks of one object")]
    ChunkOrder { index: usize, prev: usize, cur: usize },
    #[error("chunk {chunk}: {source}")]
    AtChunk {
        chunk: usize,
        #[source]
        source: Box<DepthAlignError>,
    },
}

/// Depth values inside one object's mask on an overlap frame, relative
/// units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthChunkSample<T: Real> {
    pub chunk_index: usize,
    pub object_id: u32,
    pub depths: Vec<T>,
}

/// Pixelwise-corresponded samples of one object on the frame shared by
/// chunks `k - 1` and `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapPair<T: Real> {
    pub prev: DepthChunkSample<T>,
    pub cur: DepthChunkSample<T>,
}

/// `d -> alpha * d + beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineParams<T: Real> {
    pub alpha: T,
    pub beta: T,
}

impl<T: Real> AffineParams<T> {
    pub fn identity() -> Self {
        Self {
            alpha: T::one(),
            beta: T::zero(),
        }
    }

    #[inline]
    pub fn apply(&self, d: T) -> T {
        self.alpha * d + self.beta
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &Self) -> Self {
        Self {
            alpha: self.alpha * inner.alpha,
            beta: self.alpha * inner.beta + self.beta,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineFit<T: Real> {
    pub params: AffineParams<T>,
    /// `|alpha cur + beta - prev|_2` at the optimum.
    pub residual: T,
}

/// Closed-form least squares for `min |alpha cur + beta - prev|_2`.
pub fn fit_affine<T: Real>(
    prev: &DepthChunkSample<T>,
    cur: &DepthChunkSample<T>,
) -> Result<AffineFit<T>, DepthAlignError> {
    fit_affine_values(&prev.depths, &cur.depths)
}

pub fn fit_affine_values<T: Real>(prev: &[T], cur: &[T]) -> Result<AffineFit<T>, DepthAlignError> {
    if prev.len() != cur.len() {
        return Err(DepthAlignError::LengthMismatch {
            prev: prev.len(),
            cur: cur.len(),
        });
    }
    if cur.len() < 2 {
        return Err(DepthAlignError::TooFewSamples(cur.len()));
    }
    if prev.iter().chain(cur).any(|d| !(*d > T::zero()) || !d.is_finite()) {
        return Err(DepthAlignError::NonPositiveDepth);
    }
    let n = T::from_usize_lossy(cur.len());
    let mean_c = cur.iter().copied().sum::<T>() / n;
    let mean_p = prev.iter().copied().sum::<T>() / n;
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    let mut max_c = T::zero();
    for (c, p) in cur.iter().zip(prev) {
        let dc = *c - mean_c;
        sxx += dc * dc;
        sxy += dc * (*p - mean_p);
        max_c = max_c.max(*c);
    }
    if sxx <= n * (T::epsilon() * max_c).powi(2) * T::lit(16.0) {
        return Err(DepthAlignError::DegenerateFit);
    }
    let alpha = sxy / sxx;
    if !(alpha > T::zero()) {
        return Err(DepthAlignError::InvalidScale {
            alpha: alpha.to_f64_lossy(),
        });
    }
    let beta = mean_p - alpha * mean_c;
    let params = AffineParams { alpha, beta };
    let residual = cur
        .iter()
        .zip(prev)
        .map(|(c, p)| (params.apply(*c) - *p).powi(2))
        .sum::<T>()
        .sqrt();
    Ok(AffineFit { params, residual })
}

/// Cumulative chunk-to-chunk-0 mappings. Overlap `k` links chunks `k` and
/// `k + 1`; the result has one mapping per chunk, starting with the
/// identity for chunk 0.
pub fn propagate_alignment<T: Real>(
    overlaps: &[OverlapPair<T>],
) -> Result<Vec<AffineParams<T>>, DepthAlignError> {
    let mut out = Vec::with_capacity(overlaps.len() + 1);
    out.push(AffineParams::identity());
    for (k, pair) in overlaps.iter().enumerate() {
        if pair.cur.chunk_index != pair.prev.chunk_index + 1 || pair.cur.object_id != pair.prev.object_id {
            return Err(DepthAlignError::ChunkOrder {
                index: k,
                prev: pair.prev.chunk_index,
                cur: pair.cur.chunk_index,
            });
        }
        let fit = fit_affine(&pair.prev, &pair.cur).map_err(|e| DepthAlignError::AtChunk {
            chunk: pair.cur.chunk_index,
            source: Box::new(e),
        })?;
        let prev_cumulative = out[k];
        out.push(prev_cumulative.compose(&fit.params));
    }
    Ok(out)
}

/// Runs [`propagate_alignment`] independently for every object id. Pairs
/// of one object must appear in chunk order.
pub fn propagate_alignment_by_object<T: Real>(
    overlaps: &[OverlapPair<T>],
) -> Result<BTreeMap<u32, Vec<AffineParams<T>>>, DepthAlignError> {
    let mut grouped: BTreeMap<u32, Vec<OverlapPair<T>>> = BTreeMap::new();
    for p in overlaps {
        grouped.entry(p.cur.object_id).or_default().push(p.clone());
    }
    grouped
        .into_iter()
        .map(|(id, pairs)| propagate_alignment(&pairs).map(|m| (id, m)))
        .collect()
}

/// Horizontal extents of the metric hand mesh and of the unprojected
/// relative-depth hand points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HandWidthExtents<T: Real> {
    pub metric_min_x: T,
    pub metric_max_x: T,
    pub relative_min_x: T,
    pub relative_max_x: T,
}

/// Metric width over relative width.
pub fn hand_scale_factor<T: Real>(e: &HandWidthExtents<T>) -> Result<T, DepthAlignError> {
    let metric = e.metric_max_x - e.metric_min_x;
    let relative = e.relative_max_x - e.relative_min_x;
    if !(metric > T::zero()) || !(relative > T::zero()) {
        return Err(DepthAlignError::InvalidExtents);
    }
    Ok(metric / relative)
}
