use serde::{Deserialize, Serialize};

use super::{keypoint_kind, ContactPrior, FrameState, RewardError, RewardWeights};
use crate::scalar::Real;

fn lifted_gain<T: Real>(lifted: bool, base: T, extra: T) -> T {
    if lifted {
        base + extra
    } else {
        base
    }
}

/// Object-centric attraction of robot keypoints to the prior's vertices at
/// step `t`, placed by each object's current pose.
pub fn contact_reward<T: Real>(
    state: &FrameState<T>,
    prior: &ContactPrior<T>,
    weights: &RewardWeights<T>,
    t: usize,
) -> Result<T, RewardError> {
    let pairs = prior.pairs_at(t);
    if pairs.is_empty() {
        return Ok(T::zero());
    }
    let c = &weights.contact;
    let mut sum = T::zero();
    for pair in pairs {
        let obj = state.object(pair.object).ok_or(RewardError::UnknownObject(pair.object))?;
        let kp = state
            .robot_keypoint(pair.keypoint)
            .ok_or(RewardError::UnknownKeypoint(pair.keypoint))?;
        let kind = keypoint_kind(pair.keypoint).unwrap_or(kp.kind);
        let local = pair
            .vertex_object_frame
            .ok_or(RewardError::UnresolvedVertex { keypoint: pair.keypoint })?;
        let v = obj.current.transform_point(&local);
        let diff = v - kp.position;
        let dist = diff.norm();
        let d_hat = if dist < T::lit(1e-9) { kp.normal } else { diff / dist };
        let align = T::one() + c.gamma_c * kp.normal.dot(&d_hat);
        let attract = (-c.lambda_c * dist * dist).exp();
        sum += c.w_c(kind) * align * attract * lifted_gain(obj.lifted, c.w_c1, c.w_c2);
    }
    Ok(sum / T::from_usize_lossy(state.objects.len()))
}

/// Position and rotation tracking of every object, gated by lifting.
pub fn object_reward<T: Real>(state: &FrameState<T>, weights: &RewardWeights<T>) -> T {
    if state.objects.is_empty() {
        return T::zero();
    }
    let o = &weights.object;
    let sum: T = state
        .objects
        .iter()
        .map(|obj| {
            let d_pos = obj.current.translation_distance_to(&obj.reference);
            let d_rot = obj.current.rotation_angle_to(&obj.reference);
            (o.w_pos * (-o.lambda_pos * d_pos).exp() + o.w_rot * (-o.lambda_rot * d_rot).exp())
                * lifted_gain(obj.lifted, o.w_o1, o.w_o2)
        })
        .sum();
    sum / T::from_usize_lossy(state.objects.len())
}

/// Wrist and joint imitation, summed over hands.
pub fn imitation_reward<T: Real>(state: &FrameState<T>, weights: &RewardWeights<T>) -> Result<T, RewardError> {
    let w = &weights.imitation;
    let mut sum = T::zero();
    for hand in &state.hands {
        if hand.joints.len() != hand.joints_ref.len() {
            return Err(RewardError::JointCountMismatch {
                current: hand.joints.len(),
                reference: hand.joints_ref.len(),
            });
        }
        let d_pos = hand.wrist.translation_distance_to(&hand.wrist_ref);
        let d_rot_term = if w.rot_term_uses_rotation {
            hand.wrist.rotation_angle_to(&hand.wrist_ref)
        } else {
            d_pos
        };
        let joints: T = hand
            .joints
            .iter()
            .zip(&hand.joints_ref)
            .map(|(a, b)| (-w.lambda_jnt * (*a - *b).abs()).exp())
            .sum();
        sum += w.w_pos * (-w.lambda_pos * d_pos).exp() + w.w_rot * (-w.lambda_rot * d_rot_term).exp() + w.w_jnt * joints;
    }
    Ok(sum)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardBreakdown<T: Real> {
    pub contact: T,
    pub object: T,
    pub imitation: T,
    pub total: T,
}

pub fn evaluate_rewards<T: Real>(
    state: &FrameState<T>,
    prior: &ContactPrior<T>,
    weights: &RewardWeights<T>,
    t: usize,
) -> Result<RewardBreakdown<T>, RewardError> {
    let contact = contact_reward(state, prior, weights, t)?;
    let object = object_reward(state, weights);
    let imitation = imitation_reward(state, weights)?;
    Ok(RewardBreakdown {
        contact,
        object,
        imitation,
        total: contact + object + imitation,
    })
}

pub fn total_reward<T: Real>(
    state: &FrameState<T>,
    prior: &ContactPrior<T>,
    weights: &RewardWeights<T>,
    t: usize,
) -> Result<T, RewardError> {
    evaluate_rewards(state, prior, weights, t).map(|b| b.total)
}
