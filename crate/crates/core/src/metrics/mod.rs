//! Pose-trajectory evaluation: ADD-S and VSD AUCs, failure rate, temporal
//! stability, episode success and silhouette IoU.

mod camera;
mod image_metrics;
mod pose_metrics;
mod report;

pub use camera::{render_depth, render_silhouette, BinaryMask, CameraModel, DepthFrame};
pub use image_metrics::{failure_rate, failure_rate_with, mask_iou_proxy, silhouette_ious, vsd_score, vsd_scores};
pub use pose_metrics::{
    adds_auc, adds_auc_from_distances, adds_distance, adds_per_frame, aggregate_rollouts, episode_success,
    episode_success_with, mean_std, stability_scores, sweep_auc, temporal_stability, threshold_grid, vsd_auc,
    vsd_auc_with, EpisodeOutcome, RolloutSummary, StabilityParams,
};
pub use report::{evaluate, EvaluationInputs, MetricConfig, MetricReport};

use thiserror::Error;

use crate::geom::GeomError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("sequence lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("need at least 2 frames, got {0}")]
    TooShort(usize),
    #[error("no rendered pixel is visible with valid depth")]
    EmptyVisibleSet,
    #[error("image dimensions do not match the camera")]
    DimensionMismatch,
    #[error("depth values must be non-negative")]
    NegativeDepth,
    #[error("camera intrinsics invalid")]
    InvalidCamera,
    #[error("no masks available")]
    NoMasks,
    #[error(transparent)]
    Geom(#[from] GeomError),
}
