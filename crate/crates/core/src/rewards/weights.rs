use serde::{Deserialize, Serialize};

use super::{KeypointKind, RewardError};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ContactWeights<T: Real> {
    pub gamma_c: T,
    pub w_c_fingertip: T,
    pub w_c_palm: T,
    pub lambda_c: T,
    pub w_c1: T,
    pub w_c2: T,
}

impl<T: Real> Default for ContactWeights<T> {
    fn default() -> Self {
        Self {
            gamma_c: T::one(),
            w_c_fingertip: T::lit(0.5),
            w_c_palm: T::lit(2.0),
            lambda_c: T::lit(400.0),
            w_c1: T::one(),
            w_c2: T::one(),
        }
    }
}

impl<T: Real> ContactWeights<T> {
    pub fn w_c(&self, kind: KeypointKind) -> T {
        match kind {
            KeypointKind::Fingertip => self.w_c_fingertip,
            KeypointKind::Palm => self.w_c_palm,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ObjectWeights<T: Real> {
    pub w_pos: T,
    pub w_rot: T,
    pub lambda_pos: T,
    pub lambda_rot: T,
    pub w_o1: T,
    pub w_o2: T,
}

impl<T: Real> Default for ObjectWeights<T> {
    fn default() -> Self {
        Self {
            w_pos: T::lit(5.0),
            w_rot: T::one(),
            lambda_pos: T::lit(80.0),
            lambda_rot: T::lit(3.0),
            w_o1: T::lit(0.1),
            w_o2: T::lit(4.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ImitationWeights<T: Real> {
    pub w_pos: T,
    pub w_rot: T,
    pub w_jnt: T,
    pub lambda_pos: T,
    pub lambda_rot: T,
    pub lambda_jnt: T,
    /// Feed the wrist rotation error to the rotation term. Off by default:
    /// the reference formula feeds it the position error.
    pub rot_term_uses_rotation: bool,
}

impl<T: Real> Default for ImitationWeights<T> {
    fn default() -> Self {
        Self {
            w_pos: T::lit(0.5),
            w_rot: T::lit(0.5),
            w_jnt: T::lit(0.5),
            lambda_pos: T::lit(2.0),
            lambda_rot: T::lit(20.0),
            lambda_jnt: T::lit(20.0),
            rot_term_uses_rotation: false,
        }
    }
}

/// Reward hyperparameters; defaults are the reference values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RewardWeights<T: Real> {
    pub contact: ContactWeights<T>,
    pub object: ObjectWeights<T>,
    pub imitation: ImitationWeights<T>,
    pub tau_fingertip: T,
    pub tau_palm: T,
    /// COM rise over the rest height that counts as lifted, meters.
    pub lifted_height_threshold: T,
}

impl<T: Real> Default for RewardWeights<T> {
    fn default() -> Self {
        Self {
            contact: ContactWeights::default(),
            object: ObjectWeights::default(),
            imitation: ImitationWeights::default(),
            tau_fingertip: T::lit(0.03),
            tau_palm: T::lit(0.05),
            lifted_height_threshold: T::lit(0.01),
        }
    }
}

impl<T: Real> RewardWeights<T> {
    pub fn tau(&self, kind: KeypointKind) -> T {
        match kind {
            KeypointKind::Fingertip => self.tau_fingertip,
            KeypointKind::Palm => self.tau_palm,
        }
    }

    pub fn validate(&self) -> Result<(), RewardError> {
        let c = &self.contact;
        let o = &self.object;
        let i = &self.imitation;
        let finite = [
            c.gamma_c, c.w_c_fingertip, c.w_c_palm, c.w_c1, c.w_c2, o.w_pos, o.w_rot, o.w_o1, o.w_o2,
            i.w_pos, i.w_rot, i.w_jnt,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(RewardError::InvalidWeights("weights must be finite"));
        }
        let positive = [
            c.lambda_c, o.lambda_pos, o.lambda_rot, i.lambda_pos, i.lambda_rot, i.lambda_jnt,
        ];
        if positive.iter().any(|v| !(v.is_finite() && *v > T::zero())) {
            return Err(RewardError::InvalidWeights("lambdas must be positive"));
        }
        let thresholds = [self.tau_fingertip, self.tau_palm, self.lifted_height_threshold];
        if thresholds.iter().any(|v| !(v.is_finite() && *v > T::zero())) {
            return Err(RewardError::InvalidWeights("thresholds must be positive"));
        }
        Ok(())
    }
}
