//! Object pose trajectories from point-track rigid deltas fused with a
//! pluggable pose refiner.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{kabsch, propagate_pose, GeomError, Pose, PoseTrajectory, TrackedPoints};
use crate::linalg::Vec3;
use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PoseTrackError {
    #[error("frame {frame} has no predecessor in a {len}-frame track")]
    FrameOutOfRange { frame: usize, len: usize },
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// Refined pose and a confidence in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Refinement<T: Real> {
    pub pose: Pose<T>,
    pub confidence: T,
}

/// Seam for an external pose refiner. Must be deterministic for a fixed
/// guess and frame.
pub trait Refiner<T: Real> {
    fn refine(&self, guess: &Pose<T>, frame: usize) -> Refinement<T>;
}

impl<T: Real, F: Fn(&Pose<T>, usize) -> Refinement<T>> Refiner<T> for F {
    fn refine(&self, guess: &Pose<T>, frame: usize) -> Refinement<T> {
        self(guess, frame)
    }
}

/// Always declines (confidence 0).
#[derive(Debug, Clone, Copy, Default)]
pub struct NullRefiner;

impl<T: Real> Refiner<T> for NullRefiner {
    fn refine(&self, guess: &Pose<T>, _frame: usize) -> Refinement<T> {
        Refinement { pose: *guess, confidence: T::zero() }
    }
}

/// Returns a stored trajectory with full confidence.
#[derive(Debug, Clone)]
pub struct OracleRefiner<T: Real> {
    pub poses: Vec<Pose<T>>,
}

impl<T: Real> Refiner<T> for OracleRefiner<T> {
    fn refine(&self, guess: &Pose<T>, frame: usize) -> Refinement<T> {
        match self.poses.get(frame) {
            Some(p) => Refinement { pose: *p, confidence: T::one() },
            None => Refinement { pose: *guess, confidence: T::zero() },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Refined,
    TrackPropagated,
    Held,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackOptions<T: Real> {
    /// Re-fit once after dropping the worst `trim_fraction` residuals.
    pub robust_trim: bool,
    pub trim_fraction: T,
}

impl<T: Real> Default for TrackOptions<T> {
    fn default() -> Self {
        Self { robust_trim: false, trim_fraction: T::lit(0.2) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FusionConfig<T: Real> {
    pub confidence_threshold: T,
    pub track: TrackOptions<T>,
}

impl<T: Real> Default for FusionConfig<T> {
    fn default() -> Self {
        Self { confidence_threshold: T::half(), track: TrackOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusedTrajectoryReport<T: Real> {
    pub trajectory: PoseTrajectory<T>,
    pub provenance: Vec<Provenance>,
    /// Rotation of the applied track delta, radians (0 where none).
    pub delta_rotation: Vec<T>,
    /// Translation of the applied track delta, meters.
    pub delta_translation: Vec<T>,
}

/// Rigid motion carrying frame `frame - 1` points onto frame `frame`.
pub fn track_delta<T: Real>(points: &TrackedPoints<T>, frame: usize) -> Result<Pose<T>, PoseTrackError> {
    track_delta_with(points, frame, &TrackOptions::default())
}

pub fn track_delta_with<T: Real>(
    points: &TrackedPoints<T>,
    frame: usize,
    opts: &TrackOptions<T>,
) -> Result<Pose<T>, PoseTrackError> {
    if frame == 0 || frame >= points.len() {
        return Err(PoseTrackError::FrameOutOfRange { frame, len: points.len() });
    }
    let prev = &points.frames()[frame - 1];
    let cur = &points.frames()[frame];
    let (src, dst): (Vec<Vec3<T>>, Vec<Vec3<T>>) = (0..prev.points.len())
        .filter(|&i| prev.valid[i] && cur.valid[i])
        .map(|i| (prev.points[i], cur.points[i]))
        .unzip();
    if src.len() < 3 {
        return Err(GeomError::DegenerateGeometry { valid_pairs: src.len() }.into());
    }
    let pose = kabsch(&src, &dst)?;
    if !opts.robust_trim {
        return Ok(pose);
    }
    let mut residuals: Vec<(T, usize)> = src
        .iter()
        .zip(&dst)
        .enumerate()
        .map(|(i, (s, d))| ((pose.transform_point(s) - *d).norm(), i))
        .collect();
    residuals.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal).then(a.1.cmp(&b.1)));
    let drop = (T::from_usize_lossy(src.len()) * opts.trim_fraction).floor().to_usize().unwrap_or(0);
    let keep = src.len() - drop.min(src.len());
    if keep < 3 {
        return Ok(pose);
    }
    let mut kept: Vec<usize> = residuals[..keep].iter().map(|r| r.1).collect();
    kept.sort_unstable();
    let a: Vec<Vec3<T>> = kept.iter().map(|&i| src[i]).collect();
    let b: Vec<Vec3<T>> = kept.iter().map(|&i| dst[i]).collect();
    Ok(kabsch(&a, &b)?)
}

/// Dead-reckons with track deltas and substitutes confident refinements.
pub fn fuse_trajectory<T: Real>(
    points: &TrackedPoints<T>,
    refiner: &dyn Refiner<T>,
    initial: &Pose<T>,
) -> FusedTrajectoryReport<T> {
    fuse_trajectory_with(points, refiner, initial, &FusionConfig::default())
}

pub fn fuse_trajectory_with<T: Real>(
    points: &TrackedPoints<T>,
    refiner: &dyn Refiner<T>,
    initial: &Pose<T>,
    cfg: &FusionConfig<T>,
) -> FusedTrajectoryReport<T> {
    let n = points.len().max(1);
    let mut poses = Vec::with_capacity(n);
    let mut provenance = Vec::with_capacity(n);
    let mut delta_rotation = Vec::with_capacity(n);
    let mut delta_translation = Vec::with_capacity(n);
    poses.push(*initial);
    provenance.push(Provenance::Held);
    delta_rotation.push(T::zero());
    delta_translation.push(T::zero());
    for frame in 1..points.len() {
        let prev = poses[frame - 1];
        let delta = track_delta_with(points, frame, &cfg.track).ok();
        let guess = delta.map_or(prev, |d| propagate_pose(&prev, &d));
        let refined = refiner.refine(&guess, frame);
        let (pose, tag) = if refined.confidence >= cfg.confidence_threshold {
            (refined.pose, Provenance::Refined)
        } else if delta.is_some() {
            (guess, Provenance::TrackPropagated)
        } else {
            (prev, Provenance::Held)
        };
        if tag == Provenance::Held {
            log::debug!("frame {frame}: no usable track delta or refinement, holding pose");
        }
        poses.push(pose);
        provenance.push(tag);
        delta_rotation.push(delta.map_or(T::zero(), |d| d.rotation.angle()));
        delta_translation.push(delta.map_or(T::zero(), |d| d.translation.norm()));
    }
    FusedTrajectoryReport {
        trajectory: PoseTrajectory::new(poses).expect("at least the initial pose"),
        provenance,
        delta_rotation,
        delta_translation,
    }
}
