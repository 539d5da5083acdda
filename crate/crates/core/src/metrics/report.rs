use serde::{Deserialize, Serialize};

use super::camera::{BinaryMask, CameraModel, DepthFrame};
use super::image_metrics::{failure_rate_with, mask_iou_proxy, vsd_scores};
use super::pose_metrics::{
    adds_auc_from_distances, adds_per_frame, episode_success_with, mean_std, stability_scores, vsd_auc_with,
    StabilityParams,
};
use super::MetricsError;
use crate::geom::{align_trajectory_to_reference, PoseTrajectory, TriMesh};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MetricConfig {
    pub adds_max_tau: f64,
    pub vsd_delta: f64,
    pub vsd_tau_min: f64,
    pub vsd_tau_max: f64,
    pub auc_samples: usize,
    pub iou_fail_tau: f64,
    pub success_rot: f64,
    pub success_pos: f64,
    pub stability_trans_scale: f64,
    pub stability_rot_scale: f64,
    /// Align the prediction to the ground truth at frame 0 before ADD-S.
    pub align_first_frame: bool,
}

impl Default for MetricConfig {
    fn default() -> Self {
        Self {
            adds_max_tau: 0.10,
            vsd_delta: 0.02,
            vsd_tau_min: 0.1,
            vsd_tau_max: 0.5,
            auc_samples: 100,
            iou_fail_tau: 0.1,
            success_rot: 0.5,
            success_pos: 0.03,
            stability_trans_scale: 0.01,
            stability_rot_scale: 0.1,
            align_first_frame: true,
        }
    }
}

/// Whatever is available for one sequence; metrics whose inputs are
/// missing are skipped.
#[derive(Debug, Clone, Copy)]
pub struct EvaluationInputs<'a, T: Real> {
    pub mesh: &'a TriMesh<T>,
    pub pred: &'a PoseTrajectory<T>,
    pub gt: Option<&'a PoseTrajectory<T>>,
    pub camera: Option<&'a CameraModel<T>>,
    pub depth: Option<&'a [DepthFrame<T>]>,
    pub masks: Option<&'a [Option<BinaryMask>]>,
    /// Per-frame validity; all frames are valid when absent.
    pub validity: Option<&'a [bool]>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub adds_auc: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vsd_auc: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub temporal_stability_mean: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub temporal_stability_std: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub success: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e_r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e_t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mask_iou: Option<f64>,
    /// Frames whose VSD visible set was empty (scored 0).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub vsd_empty_frames: Vec<usize>,
}

fn cell(v: Option<f64>, digits: usize) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.digits$}"))
}

impl MetricReport {
    pub fn table_header() -> Vec<&'static str> {
        vec!["ADD-S", "VSD", "Failure Rate", "Temp. Stability", "Success", "E_r", "E_t", "IoU"]
    }

    pub fn table_row(&self) -> Vec<String> {
        let stability = match (self.temporal_stability_mean, self.temporal_stability_std) {
            (Some(m), Some(s)) => format!("{m:.4} ± {s:.4}"),
            _ => "-".to_string(),
        };
        vec![
            cell(self.adds_auc, 4),
            cell(self.vsd_auc, 4),
            cell(self.failure_rate, 4),
            stability,
            self.success.map_or_else(|| "-".to_string(), |s| s.to_string()),
            cell(self.e_r, 4),
            cell(self.e_t, 4),
            cell(self.mask_iou, 4),
        ]
    }

    /// Aligned plain-text table with optional row labels.
    pub fn table(rows: &[(String, MetricReport)]) -> String {
        let mut header: Vec<String> = vec!["Sequence".into()];
        header.extend(Self::table_header().into_iter().map(String::from));
        let mut body: Vec<Vec<String>> = vec![header];
        for (label, r) in rows {
            let mut row = vec![label.clone()];
            row.extend(r.table_row());
            body.push(row);
        }
        let cols = body[0].len();
        let widths: Vec<usize> = (0..cols)
            .map(|c| body.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for (i, row) in body.iter().enumerate() {
            let line: Vec<String> = row
                .iter()
                .zip(&widths)
                .map(|(s, w)| format!("{s:<w$}", w = *w))
                .collect();
            out.push_str(line.join("  ").trim_end());
            out.push('\n');
            if i == 0 {
                let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
                out.push_str(&rule.join("  "));
                out.push('\n');
            }
        }
        out
    }
}

fn valid_subset<T: Copy>(xs: &[T], validity: Option<&[bool]>) -> Vec<T> {
    match validity {
        Some(v) => xs.iter().zip(v).filter(|(_, ok)| **ok).map(|(x, _)| *x).collect(),
        None => xs.to_vec(),
    }
}

/// Runs every metric whose inputs are present.
pub fn evaluate<T: Real>(inputs: &EvaluationInputs<'_, T>, cfg: &MetricConfig) -> Result<MetricReport, MetricsError> {
    let mut report = MetricReport::default();
    let pred = inputs.pred;
    if let Some(v) = inputs.validity {
        if v.len() != pred.len() {
            return Err(MetricsError::LengthMismatch { left: pred.len(), right: v.len() });
        }
    }
    if let Some(gt) = inputs.gt {
        let aligned = if cfg.align_first_frame {
            align_trajectory_to_reference(pred, gt)?
        } else {
            pred.clone()
        };
        let d = adds_per_frame(inputs.mesh, &aligned, gt)?;
        let d = valid_subset(&d, inputs.validity);
        report.adds_auc = Some(adds_auc_from_distances(&d, T::lit(cfg.adds_max_tau), cfg.auc_samples).to_f64_lossy());
        if pred.len() >= 2 {
            let params = StabilityParams {
                trans_scale: T::lit(cfg.stability_trans_scale),
                rot_scale: T::lit(cfg.stability_rot_scale),
            };
            let (m, s) = mean_std(&stability_scores(pred, gt, &params)?);
            report.temporal_stability_mean = Some(m.to_f64_lossy());
            report.temporal_stability_std = Some(s.to_f64_lossy());
        }
        let ep = episode_success_with(pred, gt, T::lit(cfg.success_rot), T::lit(cfg.success_pos))?;
        report.success = Some(ep.success);
        report.e_r = Some(ep.e_r.to_f64_lossy());
        report.e_t = Some(ep.e_t.to_f64_lossy());
    }
    if let (Some(cam), Some(depth)) = (inputs.camera, inputs.depth) {
        let (scores, empty) = vsd_scores(inputs.mesh, pred, depth, cam, T::lit(cfg.vsd_delta))?;
        let scores = valid_subset(&scores, inputs.validity);
        report.vsd_auc = Some(
            vsd_auc_with(&scores, T::lit(cfg.vsd_tau_min), T::lit(cfg.vsd_tau_max), cfg.auc_samples).to_f64_lossy(),
        );
        report.vsd_empty_frames = empty;
    }
    if let (Some(cam), Some(masks)) = (inputs.camera, inputs.masks) {
        let all_valid;
        let validity = match inputs.validity {
            Some(v) => v,
            None => {
                all_valid = vec![true; pred.len()];
                &all_valid
            }
        };
        report.failure_rate = Some(failure_rate_with(inputs.mesh, pred, masks, cam, validity, cfg.iou_fail_tau)?);
        report.mask_iou = mask_iou_proxy(inputs.mesh, pred, masks, cam).ok();
    }
    Ok(report)
}
