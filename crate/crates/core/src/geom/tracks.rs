use serde::{Deserialize, Serialize};

use super::GeomError;
use crate::linalg::Vec3;
use crate::scalar::Real;

/// One frame of tracked points; on disk this is one JSON Lines record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackFrame<T: Real> {
    pub frame: usize,
    pub points: Vec<Vec3<T>>,
    pub valid: Vec<bool>,
}

/// Per-frame point sets where point `k` of every frame is the same
/// physical point.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackedPoints<T: Real> {
    frames: Vec<TrackFrame<T>>,
}

impl<T: Real> TrackedPoints<T> {
    pub fn new(frames: Vec<TrackFrame<T>>) -> Result<Self, GeomError> {
        let n = frames.first().map_or(0, |f| f.points.len());
        for (i, f) in frames.iter().enumerate() {
            if f.points.len() != n || f.valid.len() != n {
                return Err(GeomError::InconsistentTracks { frame: i });
            }
        }
        Ok(Self { frames })
    }

    /// All points valid.
    pub fn from_points(frames: Vec<Vec<Vec3<T>>>) -> Result<Self, GeomError> {
        Self::new(
            frames
                .into_iter()
                .enumerate()
                .map(|(i, points)| TrackFrame {
                    frame: i,
                    valid: vec![true; points.len()],
                    points,
                })
                .collect(),
        )
    }

    pub fn frames(&self) -> &[TrackFrame<T>] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn points_per_frame(&self) -> usize {
        self.frames.first().map_or(0, |f| f.points.len())
    }
}
