//! Deterministic synthetic scenarios with known ground truth.

mod rng;
mod scenario;

pub use rng::SplitMix64;
pub use scenario::{
    default_camera, generate, generate_with_mesh, primitive_mesh, HandTrack, MeshKind, MotionKind, Noise,
    ScenarioBundle, ScenarioSpec, ScriptedContact, GRASP_STANDOFF, JOINTS_PER_HAND,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthError {
    #[error("motion {motion:?} is not supported for mesh {mesh:?}")]
    UnsupportedCombination { mesh: MeshKind, motion: MotionKind },
    #[error("invalid scenario spec: {0}")]
    InvalidSpec(&'static str),
    #[error("mesh kind `loaded` needs a caller-supplied mesh")]
    MissingMesh,
}
