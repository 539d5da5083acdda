use serde::{Deserialize, Serialize};

use super::RewardError;
use crate::geom::Pose;
use crate::linalg::Vec3;
use crate::scalar::Real;

pub type ObjectId = u32;

pub const KEYPOINTS_PER_HAND: usize = 9;
const FINGERTIPS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KeypointKind {
    Fingertip,
    Palm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HandSide {
    Left,
    Right,
}

impl HandSide {
    fn offset(self) -> usize {
        match self {
            HandSide::Left => 0,
            HandSide::Right => KEYPOINTS_PER_HAND,
        }
    }
}

/// Kind of a global keypoint id: left hand `0..9`, right hand `9..18`,
/// fingertips first within each hand.
pub fn keypoint_kind(id: usize) -> Option<KeypointKind> {
    (id < 2 * KEYPOINTS_PER_HAND).then(|| {
        if id % KEYPOINTS_PER_HAND < FINGERTIPS {
            KeypointKind::Fingertip
        } else {
            KeypointKind::Palm
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Keypoint<T: Real> {
    pub id: usize,
    pub kind: KeypointKind,
    pub position: Vec3<T>,
    /// Outward unit surface normal.
    pub normal: Vec3<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HandKeypointSet<T: Real> {
    pub side: HandSide,
    pub keypoints: Vec<Keypoint<T>>,
}

impl<T: Real> HandKeypointSet<T> {
    /// Five fingertips then four palm points, with global ids.
    pub fn from_arrays(
        side: HandSide,
        positions: [Vec3<T>; KEYPOINTS_PER_HAND],
        normals: [Vec3<T>; KEYPOINTS_PER_HAND],
    ) -> Self {
        let keypoints = (0..KEYPOINTS_PER_HAND)
            .map(|i| Keypoint {
                id: side.offset() + i,
                kind: keypoint_kind(i).expect("index < 9"),
                position: positions[i],
                normal: normals[i],
            })
            .collect();
        Self { side, keypoints }
    }

    pub fn validate(&self) -> Result<(), RewardError> {
        let tips = self.keypoints.iter().filter(|k| k.kind == KeypointKind::Fingertip).count();
        let palms = self.keypoints.iter().filter(|k| k.kind == KeypointKind::Palm).count();
        if tips != FINGERTIPS || palms != KEYPOINTS_PER_HAND - FINGERTIPS {
            return Err(RewardError::InvalidHand);
        }
        Ok(())
    }

    pub fn get(&self, id: usize) -> Option<&Keypoint<T>> {
        self.keypoints.iter().find(|k| k.id == id)
    }

    pub fn transformed(&self, pose: &Pose<T>) -> Self {
        Self {
            side: self.side,
            keypoints: self
                .keypoints
                .iter()
                .map(|k| Keypoint {
                    position: pose.transform_point(&k.position),
                    normal: pose.transform_vector(&k.normal),
                    ..*k
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectState<T: Real> {
    pub id: ObjectId,
    pub current: Pose<T>,
    pub reference: Pose<T>,
    pub lifted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HandState<T: Real> {
    pub robot: HandKeypointSet<T>,
    pub human: HandKeypointSet<T>,
    pub wrist: Pose<T>,
    pub wrist_ref: Pose<T>,
    pub joints: Vec<T>,
    pub joints_ref: Vec<T>,
}

/// Simulator snapshot at one control step.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FrameState<T: Real> {
    pub objects: Vec<ObjectState<T>>,
    pub hands: Vec<HandState<T>>,
}

impl<T: Real> FrameState<T> {
    pub fn object(&self, id: ObjectId) -> Option<&ObjectState<T>> {
        self.objects.iter().find(|o| o.id == id)
    }

    pub fn robot_keypoint(&self, id: usize) -> Option<&Keypoint<T>> {
        self.hands.iter().find_map(|h| h.robot.get(id))
    }
}

/// Lifted indicator: COM at least `threshold` above its rest height.
pub fn is_lifted<T: Real>(com_height: T, rest_height: T, threshold: T) -> bool {
    com_height - rest_height >= threshold
}
