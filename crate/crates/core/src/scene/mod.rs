//! Camera-to-simulator frame alignment and stable placement sampling.

mod frame_align;
pub mod hull;
mod settle;

pub use frame_align::{
    compute_scene_transform, facing_alignment, facing_alignment_about, fit_table_plane,
    gravity_alignment, workspace_translation, Aabb, SceneAnchors, SceneTransform, TablePlaneFit,
};
pub use settle::{
    drop_to_plane, evaluate_candidate, perturbation_candidates, sample_stable_configuration,
    settle, settle_with, SamplingParams, SettleCandidate, SettleOutcome, SettleParams,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SceneError {
    #[error("need at least 3 table points, got {0}")]
    TooFewPoints(usize),
    #[error("no dominant plane: singular values {smallest} and {middle} within 10%")]
    DegeneratePlane { smallest: f64, middle: f64 },
    #[error("hip vector has no horizontal extent")]
    DegenerateHips,
    #[error("axis has no horizontal extent")]
    InvalidAxis,
    #[error("entities cannot be shifted along y to fit the workspace")]
    WorkspaceOverflow,
    #[error("box min exceeds max")]
    InvalidAabb,
}
