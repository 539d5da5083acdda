use serde::{Deserialize, Serialize};

use super::{GeomError, Pose};
use crate::scalar::Real;

/// Control period of the reference simulator, seconds.
pub const DEFAULT_DT: f64 = 1.0 / 30.0;

/// Ordered, non-empty sequence of poses sampled at a fixed period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTrajectory<T>", into = "RawTrajectory<T>")]
pub struct PoseTrajectory<T: Real> {
    frames: Vec<Pose<T>>,
    timestep_dt: T,
}

#[derive(Serialize, Deserialize)]
struct RawTrajectory<T: Real> {
    #[serde(default = "default_dt")]
    dt: T,
    frames: Vec<Pose<T>>,
}

fn default_dt<T: Real>() -> T {
    T::lit(DEFAULT_DT)
}

impl<T: Real> TryFrom<RawTrajectory<T>> for PoseTrajectory<T> {
    type Error = GeomError;
    fn try_from(raw: RawTrajectory<T>) -> Result<Self, GeomError> {
        Self::with_dt(raw.frames, raw.dt)
    }
}

impl<T: Real> From<PoseTrajectory<T>> for RawTrajectory<T> {
    fn from(t: PoseTrajectory<T>) -> Self {
        RawTrajectory {
            dt: t.timestep_dt,
            frames: t.frames,
        }
    }
}

impl<T: Real> PoseTrajectory<T> {
    /// Builds a trajectory at the default 1/30 s period.
    pub fn new(frames: Vec<Pose<T>>) -> Result<Self, GeomError> {
        Self::with_dt(frames, T::lit(DEFAULT_DT))
    }

    pub fn with_dt(frames: Vec<Pose<T>>, dt: T) -> Result<Self, GeomError> {
        if frames.is_empty() {
            return Err(GeomError::EmptyTrajectory);
        }
        if !(dt > T::zero()) {
            return Err(GeomError::InvalidTimestep);
        }
        let frames = frames
            .into_iter()
            .map(|p| Pose::new(p.rotation, p.translation))
            .collect();
        Ok(Self {
            frames,
            timestep_dt: dt,
        })
    }

    pub fn frames(&self) -> &[Pose<T>] {
        &self.frames
    }

    pub fn into_frames(self) -> Vec<Pose<T>> {
        self.frames
    }

    pub fn dt(&self) -> T {
        self.timestep_dt
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    /// Always false; kept for API symmetry with slices.
    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn first(&self) -> &Pose<T> {
        &self.frames[0]
    }

    pub fn last(&self) -> &Pose<T> {
        &self.frames[self.frames.len() - 1]
    }

    pub fn get(&self, i: usize) -> Option<&Pose<T>> {
        self.frames.get(i)
    }

    /// Left-multiplies every frame by `offset`.
    pub fn transformed(&self, offset: &Pose<T>) -> Self {
        Self {
            frames: self.frames.iter().map(|p| offset.compose(p)).collect(),
            timestep_dt: self.timestep_dt,
        }
    }
}

/// Aligns `pred` to `reference` at the first frame and applies the same
/// rigid correction to every later frame:
/// `dR = R*_0 R_0^T`, `dt = t*_0 - dR t_0`.
pub fn align_trajectory_to_reference<T: Real>(
    pred: &PoseTrajectory<T>,
    reference: &PoseTrajectory<T>,
) -> Result<PoseTrajectory<T>, GeomError> {
    if pred.len() != reference.len() {
        return Err(GeomError::LengthMismatch {
            left: pred.len(),
            right: reference.len(),
        });
    }
    let p0 = pred.first();
    let r0 = reference.first();
    let d_rot = (r0.rotation * p0.rotation.conjugate()).normalize();
    let d_trans = r0.translation - d_rot.rotate(&p0.translation);
    let correction = Pose {
        rotation: d_rot,
        translation: d_trans,
    };
    Ok(pred.transformed(&correction))
}
