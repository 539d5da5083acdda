use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::MetricsError;
use crate::geom::spatial::KdTree;
use crate::geom::{Pose, PoseTrajectory, TriMesh};
use crate::scalar::Real;

/// `n` evenly spaced thresholds from `lo` to `hi` inclusive.
pub fn threshold_grid<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let last = T::from_usize_lossy(n - 1);
            (0..n).map(|k| lo + (hi - lo) * T::from_usize_lossy(k) / last).collect()
        }
    }
}

/// Mean over the threshold grid of the fraction of `values` that pass.
pub fn sweep_auc<T: Real>(values: &[T], thresholds: &[T], pass: impl Fn(T, T) -> bool) -> T {
    if values.is_empty() || thresholds.is_empty() {
        return T::zero();
    }
    let n = T::from_usize_lossy(values.len());
    let total: T = thresholds
        .iter()
        .map(|&tau| T::from_usize_lossy(values.iter().filter(|&&v| pass(v, tau)).count()) / n)
        .sum();
    total / T::from_usize_lossy(thresholds.len())
}

/// Distances against thresholds over `[0, max_tau]`, success when `d <= tau`.
pub fn adds_auc_from_distances<T: Real>(distances: &[T], max_tau: T, samples: usize) -> T {
    sweep_auc(distances, &threshold_grid(T::zero(), max_tau, samples), |d, tau| d <= tau)
}

/// Mean over predicted vertices of the distance to the closest
/// ground-truth vertex.
pub fn adds_distance<T: Real>(mesh: &TriMesh<T>, pred: &Pose<T>, gt: &Pose<T>) -> T {
    let tree = KdTree::new(mesh.transformed_vertices(gt));
    let pts = mesh.transformed_vertices(pred);
    let sum: T = pts
        .iter()
        .map(|p| tree.nearest(p).map_or(T::zero(), |(_, d)| d))
        .sum();
    sum / T::from_usize_lossy(pts.len().max(1))
}

fn check_lengths<T: Real>(a: &PoseTrajectory<T>, b: &PoseTrajectory<T>) -> Result<(), MetricsError> {
    if a.len() != b.len() {
        return Err(MetricsError::LengthMismatch { left: a.len(), right: b.len() });
    }
    Ok(())
}

pub fn adds_per_frame<T: Real>(
    mesh: &TriMesh<T>,
    pred: &PoseTrajectory<T>,
    gt: &PoseTrajectory<T>,
) -> Result<Vec<T>, MetricsError> {
    check_lengths(pred, gt)?;
    Ok(pred
        .frames()
        .par_iter()
        .zip(gt.frames().par_iter())
        .map(|(p, g)| adds_distance(mesh, p, g))
        .collect())
}

/// Area under the ADD-S accuracy curve, 100 thresholds over `[0, 0.10]` m.
pub fn adds_auc<T: Real>(mesh: &TriMesh<T>, pred: &PoseTrajectory<T>, gt: &PoseTrajectory<T>) -> Result<T, MetricsError> {
    let d = adds_per_frame(mesh, pred, gt)?;
    Ok(adds_auc_from_distances(&d, T::lit(0.10), 100))
}

/// Per-frame VSD scores swept over `[lo, hi]`, success when `s >= tau`.
pub fn vsd_auc_with<T: Real>(scores: &[T], lo: T, hi: T, samples: usize) -> T {
    sweep_auc(scores, &threshold_grid(lo, hi, samples), |s, tau| s >= tau)
}

pub fn vsd_auc<T: Real>(scores: &[T]) -> T {
    vsd_auc_with(scores, T::lit(0.1), T::lit(0.5), 100)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityParams<T: Real> {
    pub trans_scale: T,
    pub rot_scale: T,
}

impl<T: Real> Default for StabilityParams<T> {
    fn default() -> Self {
        Self {
            trans_scale: T::lit(0.01),
            rot_scale: T::lit(0.1),
        }
    }
}

/// Per-step smoothness scores comparing successive relative motions.
pub fn stability_scores<T: Real>(
    pred: &PoseTrajectory<T>,
    gt: &PoseTrajectory<T>,
    params: &StabilityParams<T>,
) -> Result<Vec<T>, MetricsError> {
    check_lengths(pred, gt)?;
    if pred.len() < 2 {
        return Err(MetricsError::TooShort(pred.len()));
    }
    let p = pred.frames();
    let g = gt.frames();
    Ok((0..p.len() - 1)
        .map(|i| {
            let dp = p[i].relative_to_next(&p[i + 1]);
            let dg = g[i].relative_to_next(&g[i + 1]);
            let e_trans = dp.translation.distance(&dg.translation);
            let e_rot = dp.rotation.angle_to(&dg.rotation);
            T::half() * (-e_trans / params.trans_scale).exp() + T::half() * (-e_rot / params.rot_scale).exp()
        })
        .collect())
}

/// Mean and population standard deviation.
pub fn mean_std<T: Real>(xs: &[T]) -> (T, T) {
    if xs.is_empty() {
        return (T::zero(), T::zero());
    }
    let n = T::from_usize_lossy(xs.len());
    let mean = xs.iter().copied().sum::<T>() / n;
    let var = xs.iter().map(|x| (*x - mean).powi(2)).sum::<T>() / n;
    (mean, var.sqrt())
}

pub fn temporal_stability<T: Real>(pred: &PoseTrajectory<T>, gt: &PoseTrajectory<T>) -> Result<(T, T), MetricsError> {
    Ok(mean_std(&stability_scores(pred, gt, &StabilityParams::default())?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpisodeOutcome<T: Real> {
    pub success: bool,
    /// Mean rotation error, radians.
    pub e_r: T,
    /// Mean position error, meters.
    pub e_t: T,
}

pub fn episode_success_with<T: Real>(
    pred: &PoseTrajectory<T>,
    reference: &PoseTrajectory<T>,
    rot_threshold: T,
    pos_threshold: T,
) -> Result<EpisodeOutcome<T>, MetricsError> {
    check_lengths(pred, reference)?;
    let mut success = true;
    let (mut sr, mut st) = (T::zero(), T::zero());
    for (p, r) in pred.frames().iter().zip(reference.frames()) {
        let er = p.rotation_angle_to(r);
        let et = p.translation_distance_to(r);
        success &= er < rot_threshold && et < pos_threshold;
        sr += er;
        st += et;
    }
    let n = T::from_usize_lossy(pred.len());
    Ok(EpisodeOutcome {
        success,
        e_r: sr / n,
        e_t: st / n,
    })
}

/// Success when every frame is within 0.5 rad and 3 cm.
pub fn episode_success<T: Real>(pred: &PoseTrajectory<T>, reference: &PoseTrajectory<T>) -> Result<EpisodeOutcome<T>, MetricsError> {
    episode_success_with(pred, reference, T::lit(0.5), T::lit(0.03))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RolloutSummary {
    pub rollouts: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// Means over successful rollouts only; `None` when there are none.
    pub e_r: Option<f64>,
    pub e_t: Option<f64>,
}

pub fn aggregate_rollouts<T: Real>(outcomes: &[EpisodeOutcome<T>]) -> RolloutSummary {
    let ok: Vec<&EpisodeOutcome<T>> = outcomes.iter().filter(|o| o.success).collect();
    let mean = |f: fn(&EpisodeOutcome<T>) -> T| {
        (!ok.is_empty()).then(|| ok.iter().map(|o| f(o).to_f64_lossy()).sum::<f64>() / ok.len() as f64)
    };
    RolloutSummary {
        rollouts: outcomes.len(),
        successes: ok.len(),
        success_rate: if outcomes.is_empty() { 0.0 } else { ok.len() as f64 / outcomes.len() as f64 },
        e_r: mean(|o| o.e_r),
        e_t: mean(|o| o.e_t),
    }
}
