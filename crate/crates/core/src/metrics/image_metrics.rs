use rayon::prelude::*;

use super::camera::{render_depth, render_silhouette, BinaryMask, CameraModel, DepthFrame};
use super::MetricsError;
use crate::geom::{Pose, PoseTrajectory, TriMesh};
use crate::scalar::Real;

/// Fraction of rendered, visible, valid-depth pixels whose depth agrees
/// with the observation within `delta`.
pub fn vsd_score<T: Real>(
    mesh: &TriMesh<T>,
    pred: &Pose<T>,
    frame: &DepthFrame<T>,
    cam: &CameraModel<T>,
    delta: T,
) -> Result<T, MetricsError> {
    if frame.width != cam.width || frame.height != cam.height {
        return Err(MetricsError::DimensionMismatch);
    }
    let zbuf = render_depth(mesh, pred, cam);
    let (mut visible, mut agree) = (0usize, 0usize);
    for ((z, d), m) in zbuf.iter().zip(&frame.depth).zip(&frame.visible_mask) {
        if let Some(z) = z {
            if *m && *d > T::zero() {
                visible += 1;
                agree += usize::from((*z - *d).abs() < delta);
            }
        }
    }
    if visible == 0 {
        return Err(MetricsError::EmptyVisibleSet);
    }
    Ok(T::from_usize_lossy(agree) / T::from_usize_lossy(visible))
}

/// Per-frame VSD scores; frames without visible pixels score 0 and are
/// listed in the second value.
pub fn vsd_scores<T: Real>(
    mesh: &TriMesh<T>,
    pred: &PoseTrajectory<T>,
    frames: &[DepthFrame<T>],
    cam: &CameraModel<T>,
    delta: T,
) -> Result<(Vec<T>, Vec<usize>), MetricsError> {
    if frames.len() != pred.len() {
        return Err(MetricsError::LengthMismatch { left: pred.len(), right: frames.len() });
    }
    let results: Vec<Result<T, MetricsError>> = pred
        .frames()
        .par_iter()
        .zip(frames.par_iter())
        .map(|(p, f)| vsd_score(mesh, p, f, cam, delta))
        .collect();
    let mut scores = Vec::with_capacity(results.len());
    let mut empty = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(s) => scores.push(s),
            Err(MetricsError::EmptyVisibleSet) => {
                scores.push(T::zero());
                empty.push(i);
            }
            Err(e) => return Err(e),
        }
    }
    Ok((scores, empty))
}

/// Silhouette IoU per frame; `None` where the mask is missing.
pub fn silhouette_ious<T: Real>(
    mesh: &TriMesh<T>,
    pred: &PoseTrajectory<T>,
    masks: &[Option<BinaryMask>],
    cam: &CameraModel<T>,
) -> Result<Vec<Option<f64>>, MetricsError> {
    if masks.len() != pred.len() {
        return Err(MetricsError::LengthMismatch { left: pred.len(), right: masks.len() });
    }
    pred.frames()
        .par_iter()
        .zip(masks.par_iter())
        .map(|(p, m)| match m {
            Some(m) => render_silhouette(mesh, p, cam).iou(m).map(Some),
            None => Ok(None),
        })
        .collect()
}

/// Fraction of frames that are invalid, lack a mask, or overlap their mask
/// with IoU below `iou_tau`.
pub fn failure_rate_with<T: Real>(
    mesh: &TriMesh<T>,
    pred: &PoseTrajectory<T>,
    masks: &[Option<BinaryMask>],
    cam: &CameraModel<T>,
    validity: &[bool],
    iou_tau: f64,
) -> Result<f64, MetricsError> {
    if validity.len() != pred.len() {
        return Err(MetricsError::LengthMismatch { left: pred.len(), right: validity.len() });
    }
    if pred.is_empty() {
        return Ok(0.0);
    }
    let ious = silhouette_ious(mesh, pred, masks, cam)?;
    let failures = ious
        .iter()
        .zip(validity)
        .filter(|(iou, valid)| !**valid || iou.map_or(true, |v| v < iou_tau))
        .count();
    Ok(failures as f64 / pred.len() as f64)
}

pub fn failure_rate<T: Real>(
    mesh: &TriMesh<T>,
    pred: &PoseTrajectory<T>,
    masks: &[Option<BinaryMask>],
    cam: &CameraModel<T>,
    validity: &[bool],
) -> Result<f64, MetricsError> {
    failure_rate_with(mesh, pred, masks, cam, validity, 0.1)
}

/// Mean silhouette IoU over frames that have a mask.
pub fn mask_iou_proxy<T: Real>(
    mesh: &TriMesh<T>,
    pred: &PoseTrajectory<T>,
    masks: &[Option<BinaryMask>],
    cam: &CameraModel<T>,
) -> Result<f64, MetricsError> {
    let ious: Vec<f64> = silhouette_ious(mesh, pred, masks, cam)?.into_iter().flatten().collect();
    if ious.is_empty() {
        return Err(MetricsError::NoMasks);
    }
    Ok(ious.iter().sum::<f64>() / ious.len() as f64)
}
