//! SE(3) primitives, meshes, point tracks and rigid registration.

mod kabsch;
mod mesh;
mod pose;
pub mod spatial;
mod tracks;
mod trajectory;

pub use kabsch::{kabsch, kabsch_masked, registration_rms};
pub use mesh::TriMesh;
pub(crate) use mesh::aabb_of;
pub use pose::{propagate_pose, Pose};
pub use tracks::{TrackFrame, TrackedPoints};
pub use trajectory::{align_trajectory_to_reference, PoseTrajectory, DEFAULT_DT};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("degenerate geometry: {valid_pairs} usable point pairs, need at least 3 non-collinear")]
    DegenerateGeometry { valid_pairs: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("trajectory has no frames")]
    EmptyTrajectory,
    #[error("trajectory timestep must be positive")]
    InvalidTimestep,
    #[error("mesh has no vertices")]
    EmptyMesh,
    #[error("face {face} references vertex {index} but mesh has {vertex_count} vertices")]
    FaceIndexOutOfRange {
        face: usize,
        index: usize,
        vertex_count: usize,
    },
    #[error("track frame {frame} has a different point count or validity length")]
    InconsistentTracks { frame: usize },
}
