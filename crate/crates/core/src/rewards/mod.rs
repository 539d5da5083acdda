//! Offline contact priors and the contact, object-following and imitation
//! reward terms.

mod prior;
mod state;
mod terms;
mod weights;

pub use prior::{extract_contact_prior, ContactPair, ContactPrior, ContactThresholds, ContactTimestep};
pub use state::{
    is_lifted, keypoint_kind, FrameState, HandKeypointSet, HandSide, HandState, Keypoint, KeypointKind,
    ObjectId, ObjectState, KEYPOINTS_PER_HAND,
};
pub use terms::{
    contact_reward, evaluate_rewards, imitation_reward, object_reward, total_reward, RewardBreakdown,
};
pub use weights::{ContactWeights, ImitationWeights, ObjectWeights, RewardWeights};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RewardError {
    #[error("object {0} is not in the frame state")]
    UnknownObject(ObjectId),
    #[error("keypoint {0} is not in the frame state")]
    UnknownKeypoint(usize),
    #[error("no mesh for object {0}")]
    MissingMesh(ObjectId),
    #[error("hand must have 5 fingertips and 4 palm keypoints")]
    InvalidHand,
    #[error("joint vectors differ in length: {current} vs {reference}")]
    JointCountMismatch { current: usize, reference: usize },
    #[error("object {object} trajectory has {got} frames, need {need}")]
    TrajectoryTooShort { object: ObjectId, got: usize, need: usize },
    #[error("pair for keypoint {keypoint} lacks its object-frame vertex")]
    UnresolvedVertex { keypoint: usize },
    #[error("vertex {index} out of range for object {object}")]
    VertexOutOfRange { object: ObjectId, index: usize },
    #[error("invalid reward weights: {0}")]
    InvalidWeights(&'static str),
}
