//! Residual corrections accumulated on top of a retargeted reference motion.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{Quat, Vec3};
use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResidualError {
    #[error("step {t} outside sequence of length {len}")]
    StepOutOfRange { t: usize, len: usize },
    #[error("expected {expected} joints, got {got}")]
    JointCountMismatch { expected: usize, got: usize },
    #[error("joint {joint} has lo >= hi")]
    InvalidLimits { joint: usize },
}

/// One policy output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualAction<T: Real> {
    pub delta_wrist_pos: Vec3<T>,
    /// Axis-angle, radians.
    pub delta_wrist_rot: Vec3<T>,
    pub delta_joints: Vec<T>,
}

impl<T: Real> ResidualAction<T> {
    pub fn zero(n_joints: usize) -> Self {
        Self {
            delta_wrist_pos: Vec3::zero(),
            delta_wrist_rot: Vec3::zero(),
            delta_joints: vec![T::zero(); n_joints],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlTarget<T: Real> {
    pub wrist_pos: Vec3<T>,
    pub wrist_quat: Quat<T>,
    pub joint_angles: Vec<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[T; 2]>", into = "Vec<[T; 2]>")]
pub struct JointLimits<T: Real> {
    bounds: Vec<[T; 2]>,
}

impl<T: Real> TryFrom<Vec<[T; 2]>> for JointLimits<T> {
    type Error = ResidualError;

    fn try_from(bounds: Vec<[T; 2]>) -> Result<Self, Self::Error> {
        Self::new(bounds)
    }
}

impl<T: Real> From<JointLimits<T>> for Vec<[T; 2]> {
    fn from(l: JointLimits<T>) -> Self {
        l.bounds
    }
}

impl<T: Real> JointLimits<T> {
    pub fn new(bounds: Vec<[T; 2]>) -> Result<Self, ResidualError> {
        if let Some(joint) = bounds.iter().position(|b| !(b[0] < b[1])) {
            return Err(ResidualError::InvalidLimits { joint });
        }
        Ok(Self { bounds })
    }

    pub fn uniform(n: usize, lo: T, hi: T) -> Result<Self, ResidualError> {
        Self::new(vec![[lo, hi]; n])
    }

    pub fn len(&self) -> usize {
        self.bounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bounds.is_empty()
    }

    pub fn bounds(&self) -> &[[T; 2]] {
        &self.bounds
    }

    pub fn clip(&self, j: usize, v: T) -> T {
        let [lo, hi] = self.bounds[j];
        v.max(lo).min(hi)
    }
}

/// Running sums of residuals since step 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualAccumulator<T: Real> {
    pub pos_sum: Vec3<T>,
    /// `exp(w_0) * exp(w_1) * ... * exp(w_k)`, renormalized every step.
    pub rot_product: Quat<T>,
    /// Unclipped joint sums.
    pub joint_sum: Vec<T>,
    pub steps: usize,
}

impl<T: Real> ResidualAccumulator<T> {
    pub fn new(n_joints: usize) -> Self {
        Self {
            pos_sum: Vec3::zero(),
            rot_product: Quat::identity(),
            joint_sum: vec![T::zero(); n_joints],
            steps: 0,
        }
    }

    pub fn push(&mut self, r: &ResidualAction<T>) -> Result<(), ResidualError> {
        if r.delta_joints.len() != self.joint_sum.len() {
            return Err(ResidualError::JointCountMismatch {
                expected: self.joint_sum.len(),
                got: r.delta_joints.len(),
            });
        }
        self.pos_sum += r.delta_wrist_pos;
        self.rot_product = (self.rot_product * Quat::exp(&r.delta_wrist_rot)).normalize();
        for (s, d) in self.joint_sum.iter_mut().zip(&r.delta_joints) {
            *s += *d;
        }
        self.steps += 1;
        Ok(())
    }

    /// Applies the sums to `reference`; joints are clipped only here.
    pub fn target(
        &self,
        reference: &ControlTarget<T>,
        limits: &JointLimits<T>,
    ) -> Result<ControlTarget<T>, ResidualError> {
        let n = self.joint_sum.len();
        for got in [reference.joint_angles.len(), limits.len()] {
            if got != n {
                return Err(ResidualError::JointCountMismatch { expected: n, got });
            }
        }
        Ok(ControlTarget {
            wrist_pos: reference.wrist_pos + self.pos_sum,
            wrist_quat: (reference.wrist_quat * self.rot_product).normalize(),
            joint_angles: reference
                .joint_angles
                .iter()
                .zip(&self.joint_sum)
                .enumerate()
                .map(|(j, (r, s))| limits.clip(j, *r + *s))
                .collect(),
        })
    }
}

/// O(1) update of the running sums.
pub fn incremental_accumulate<T: Real>(
    prev: &ResidualAccumulator<T>,
    residual: &ResidualAction<T>,
) -> Result<ResidualAccumulator<T>, ResidualError> {
    let mut next = prev.clone();
    next.push(residual)?;
    Ok(next)
}

/// Target at step `t` from residuals `0..=t` and `reference[t]`.
pub fn accumulate<T: Real>(
    reference: &[ControlTarget<T>],
    residuals: &[ResidualAction<T>],
    limits: &JointLimits<T>,
    t: usize,
) -> Result<ControlTarget<T>, ResidualError> {
    let len = reference.len().min(residuals.len());
    if t >= len {
        return Err(ResidualError::StepOutOfRange { t, len });
    }
    let mut acc = ResidualAccumulator::new(limits.len());
    for r in &residuals[..=t] {
        acc.push(r)?;
    }
    acc.target(&reference[t], limits)
}
