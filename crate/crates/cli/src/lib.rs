//! Command implementations behind the `manip` binary.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use manip_core::depth_align::{hand_scale_factor, propagate_alignment_by_object, AffineParams, HandWidthExtents, OverlapPair};
use manip_core::geom::{Pose, PoseTrajectory, TriMesh};
use manip_core::io;
use manip_core::linalg::Vec3;
use manip_core::metrics::{self, BinaryMask, CameraModel, DepthFrame, EvaluationInputs, MetricConfig, MetricReport};
use manip_core::rewards::{self, ContactPrior, FrameState, HandKeypointSet, ObjectId, RewardWeights};
use manip_core::scene::{self, Aabb, SamplingParams, SceneAnchors, SettleCandidate};
use manip_core::synth::{self, HandTrack, ScenarioSpec};

/// Failure classes mapped to process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad or missing input; exit code 2.
    #[error("{0:#}")]
    Input(anyhow::Error),
    /// Anything else; exit code 1.
    #[error("{0:#}")]
    Internal(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Internal(_) => 1,
        }
    }
}

fn input(e: impl Into<anyhow::Error>) -> CliError {
    CliError::Input(e.into())
}

fn input_msg(msg: impl std::fmt::Display) -> CliError {
    CliError::Input(anyhow::anyhow!("{msg}"))
}

fn internal(e: impl Into<anyhow::Error>) -> CliError {
    CliError::Internal(e.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Parser)]
#[command(name = "manip", version, about = "Video-to-robot manipulation toolkit")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Reward weights JSON; defaults to the built-in values.
    #[arg(long, global = true)]
    pub weights: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output file (directory for `synth`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    #[arg(long, global = true, default_value_t = 0.10)]
    pub adds_max_tau: f64,
    #[arg(long, global = true, default_value_t = 0.02)]
    pub vsd_delta: f64,
    #[arg(long, global = true, default_value_t = 0.1)]
    pub iou_fail_tau: f64,
    #[arg(long, global = true, default_value_t = 0.5)]
    pub success_rot: f64,
    #[arg(long, global = true, default_value_t = 0.03)]
    pub success_pos: f64,
}

impl GlobalOpts {
    pub fn metric_config(&self) -> MetricConfig {
        MetricConfig {
            adds_max_tau: self.adds_max_tau,
            vsd_delta: self.vsd_delta,
            iou_fail_tau: self.iou_fail_tau,
            success_rot: self.success_rot,
            success_pos: self.success_pos,
            ..MetricConfig::default()
        }
    }

    pub fn reward_weights(&self) -> Result<RewardWeights<f64>, CliError> {
        let w = match &self.weights {
            Some(p) => io::read_json(p).map_err(input)?,
            None => RewardWeights::default(),
        };
        w.validate().map_err(input)?;
        Ok(w)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score a predicted object trajectory.
    Evaluate(EvaluateArgs),
    /// Per-frame rewards for a stream of simulator states, as CSV.
    Rewards(RewardsArgs),
    /// Stable placement by perturb, settle and select.
    Settle(SettleArgs),
    /// Camera-to-simulator transform and chunk depth alignment.
    Align(AlignArgs),
    /// Write a synthetic scenario bundle to `--out`.
    Synth(SynthArgs),
    /// Contact prior from human keypoints and an object trajectory.
    ExtractPrior(ExtractPriorArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricKind {
    Adds,
    Vsd,
    Failure,
    Stability,
    Success,
    Iou,
}

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub gt: Option<PathBuf>,
    #[arg(long)]
    pub mesh: PathBuf,
    #[arg(long)]
    pub depth_dir: Option<PathBuf>,
    #[arg(long)]
    pub masks_dir: Option<PathBuf>,
    #[arg(long)]
    pub camera: Option<PathBuf>,
    /// JSON array of per-frame validity flags.
    #[arg(long)]
    pub validity: Option<PathBuf>,
    /// Metrics to compute; by default every metric whose inputs are given.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub metrics: Vec<MetricKind>,
}

#[derive(Debug, Clone, Args)]
pub struct RewardsArgs {
    /// JSON Lines, one frame state per line.
    #[arg(long)]
    pub states: PathBuf,
    #[arg(long)]
    pub prior: PathBuf,
    /// `ID=PATH` meshes used to resolve prior vertices.
    #[arg(long = "mesh")]
    pub meshes: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct SettleArgs {
    #[arg(long)]
    pub mesh: PathBuf,
    /// Pose JSON `{rotation: [w,x,y,z], translation: [x,y,z]}`.
    #[arg(long)]
    pub pose: PathBuf,
    #[arg(long, default_value_t = 20)]
    pub candidates: usize,
    #[arg(long, default_value_t = 45.0)]
    pub max_angle_deg: f64,
    #[arg(long, default_value_t = 20)]
    pub steps: usize,
}

#[derive(Debug, Clone, Args)]
pub struct AlignArgs {
    #[arg(long)]
    pub scene: PathBuf,
    /// JSON `{overlaps: [...], hand_extents?: {...}}`.
    #[arg(long)]
    pub chunks: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub spec: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ExtractPriorArgs {
    /// `hands.json` from a bundle, or a bare array of hand tracks.
    #[arg(long)]
    pub hands: PathBuf,
    #[arg(long)]
    pub trajectory: PathBuf,
    #[arg(long)]
    pub mesh: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub object_id: ObjectId,
}

/// What a command hands back for printing.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    /// Machine-readable document written to `--out`.
    pub file: String,
    pub json: String,
    pub table: String,
}

pub fn to_json<T: Serialize + ?Sized>(v: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(v).map_err(internal)?;
    s.push('\n');
    Ok(s)
}

fn read_mesh(path: &Path) -> Result<TriMesh<f64>, CliError> {
    io::read_obj(path).map_err(input)
}

fn read_trajectory(path: &Path) -> Result<PoseTrajectory<f64>, CliError> {
    io::read_json(path).map_err(input)
}

fn wants(selected: &[MetricKind], k: MetricKind) -> bool {
    selected.is_empty() || selected.contains(&k)
}

pub fn cmd_evaluate(args: &EvaluateArgs, cfg: &MetricConfig) -> Result<MetricReport, CliError> {
    let explicit = !args.metrics.is_empty();
    let need = |k: MetricKind| explicit && args.metrics.contains(&k);
    for k in [MetricKind::Adds, MetricKind::Stability, MetricKind::Success] {
        if need(k) && args.gt.is_none() {
            return Err(input_msg(format!("metric {k:?} requested but --gt is missing")));
        }
    }
    if need(MetricKind::Vsd) && args.depth_dir.is_none() {
        return Err(input_msg("metric vsd requested but --depth-dir is missing"));
    }
    for k in [MetricKind::Failure, MetricKind::Iou] {
        if need(k) && args.masks_dir.is_none() {
            return Err(input_msg(format!("metric {k:?} requested but --masks-dir is missing")));
        }
    }
    let mesh = read_mesh(&args.mesh)?;
    let pred = read_trajectory(&args.pred)?;
    let gt = args.gt.as_deref().map(read_trajectory).transpose()?;
    if let Some(g) = &gt {
        if g.len() != pred.len() {
            return Err(input_msg(format!("--pred has {} frames but --gt has {}", pred.len(), g.len())));
        }
    }
    let use_images = args.depth_dir.is_some() || args.masks_dir.is_some();
    let camera: Option<CameraModel<f64>> = match (&args.camera, use_images) {
        (Some(p), _) => {
            let c: CameraModel<f64> = io::read_json(p).map_err(input)?;
            c.validate().map_err(input)?;
            Some(c)
        }
        (None, true) => return Err(input_msg("--depth-dir/--masks-dir need --camera")),
        (None, false) => None,
    };
    let validity: Option<Vec<bool>> = args.validity.as_deref().map(io::read_json).transpose().map_err(input)?;
    let masks: Option<Vec<Option<BinaryMask>>> = match &args.masks_dir {
        Some(d) if wants(&args.metrics, MetricKind::Failure) || wants(&args.metrics, MetricKind::Iou) || args.depth_dir.is_some() => {
            Some(io::read_mask_dir(d, pred.len()).map_err(input)?)
        }
        _ => None,
    };
    let depth: Option<Vec<DepthFrame<f64>>> = match &args.depth_dir {
        Some(d) if wants(&args.metrics, MetricKind::Vsd) => {
            let raw = io::read_depth_dir(d).map_err(input)?;
            if raw.len() != pred.len() {
                return Err(input_msg(format!("{}: {} depth frames for {} poses", d.display(), raw.len(), pred.len())));
            }
            let frames = raw
                .into_iter()
                .enumerate()
                .map(|(i, (h, data))| {
                    let depth: Vec<f64> = data.iter().map(|v| *v as f64).collect();
                    let visible = match masks.as_ref().and_then(|m| m[i].as_ref()) {
                        Some(m) if m.width == h.width && m.height == h.height => m.data.clone(),
                        Some(_) => return Err(input_msg(format!("mask {i} size differs from depth"))),
                        None => depth.iter().map(|d| *d > 0.0).collect(),
                    };
                    DepthFrame::new(h.width, h.height, depth, visible).map_err(input)
                })
                .collect::<Result<Vec<_>, _>>()?;
            Some(frames)
        }
        _ => None,
    };
    let only = |k: MetricKind, v: Option<f64>| if wants(&args.metrics, k) { v } else { None };
    let inputs = EvaluationInputs {
        mesh: &mesh,
        pred: &pred,
        gt: gt.as_ref(),
        camera: camera.as_ref(),
        depth: depth.as_deref(),
        masks: masks.as_deref().filter(|_| wants(&args.metrics, MetricKind::Failure) || wants(&args.metrics, MetricKind::Iou)),
        validity: validity.as_deref(),
    };
    let r = metrics::evaluate(&inputs, cfg).map_err(input)?;
    Ok(MetricReport {
        adds_auc: only(MetricKind::Adds, r.adds_auc),
        vsd_auc: only(MetricKind::Vsd, r.vsd_auc),
        failure_rate: only(MetricKind::Failure, r.failure_rate),
        temporal_stability_mean: only(MetricKind::Stability, r.temporal_stability_mean),
        temporal_stability_std: only(MetricKind::Stability, r.temporal_stability_std),
        success: if wants(&args.metrics, MetricKind::Success) { r.success } else { None },
        e_r: only(MetricKind::Success, r.e_r),
        e_t: only(MetricKind::Success, r.e_t),
        mask_iou: only(MetricKind::Iou, r.mask_iou),
        vsd_empty_frames: r.vsd_empty_frames,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardRow {
    pub t: usize,
    pub r_contact: f64,
    pub r_obj: f64,
    pub r_imit: f64,
    pub r_total: f64,
}

fn parse_mesh_arg(s: &str) -> Result<(ObjectId, PathBuf), CliError> {
    let (id, path) = s.split_once('=').ok_or_else(|| input_msg(format!("--mesh expects ID=PATH, got {s:?}")))?;
    let id = id.parse().map_err(|_| input_msg(format!("bad object id in --mesh {s:?}")))?;
    Ok((id, PathBuf::from(path)))
}

fn read_states(path: &Path) -> Result<Vec<FrameState<f64>>, CliError> {
    let text = fs::read_to_string(path).with_context(|| path.display().to_string()).map_err(input)?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| input_msg(format!("{}: malformed state at line {}: {e}", path.display(), i + 1)))
        })
        .collect()
}

pub fn cmd_rewards(args: &RewardsArgs, weights: &RewardWeights<f64>) -> Result<Vec<RewardRow>, CliError> {
    let states = read_states(&args.states)?;
    let mut prior: ContactPrior<f64> = io::read_json(&args.prior).map_err(input)?;
    let mut meshes = BTreeMap::new();
    for m in &args.meshes {
        let (id, path) = parse_mesh_arg(m)?;
        meshes.insert(id, read_mesh(&path)?);
    }
    prior.resolve_vertices(&meshes).map_err(input)?;
    states
        .par_iter()
        .enumerate()
        .map(|(t, s)| {
            let b = rewards::evaluate_rewards(s, &prior, weights, t)
                .map_err(|e| input_msg(format!("state at line {}: {e}", t + 1)))?;
            Ok(RewardRow { t, r_contact: b.contact, r_obj: b.object, r_imit: b.imitation, r_total: b.total })
        })
        .collect()
}

pub fn rewards_csv(rows: &[RewardRow]) -> String {
    let mut s = String::from("t,r_contact,r_obj,r_imit,r_total\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{},{},{}", r.t, r.r_contact, r.r_obj, r.r_imit, r.r_total);
    }
    s
}

pub fn cmd_settle(args: &SettleArgs, seed: u64) -> Result<SettleCandidate<f64>, CliError> {
    let mesh = read_mesh(&args.mesh)?;
    let pose: Pose<f64> = io::read_json(&args.pose).map_err(input)?;
    if !pose.is_finite() {
        return Err(input_msg("pose must be finite"));
    }
    let params = SamplingParams {
        n_candidates: args.candidates,
        max_angle: args.max_angle_deg.to_radians(),
        settle_steps: args.steps,
        ..SamplingParams::default()
    };
    Ok(scene::sample_stable_configuration(&mesh, &pose, &params, seed))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Hips {
    pub left: Vec3<f64>,
    pub right: Vec3<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Pelvis {
    pub human: Vec3<f64>,
    pub robot: Vec3<f64>,
}

/// Scene description; `table_points_path` is relative to the scene file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SceneFile {
    pub table_points_path: PathBuf,
    pub hips: Hips,
    pub pelvis: Pelvis,
    pub workspace_aabb: Aabb<f64>,
    /// Camera-frame bounds of the reconstructed entities; defaults to the
    /// human pelvis point.
    #[serde(default)]
    pub entities_aabb: Option<Aabb<f64>>,
    pub gravity_axis: Vec3<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChunksFile {
    pub overlaps: Vec<OverlapPair<f64>>,
    #[serde(default)]
    pub hand_extents: Option<HandWidthExtents<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlignOutput {
    pub table_plane: scene::TablePlaneFit<f64>,
    pub scene_transform: scene::SceneTransform<f64>,
    /// The three steps composed into one camera-to-simulator pose.
    pub camera_to_sim: Pose<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth_alignment: Option<BTreeMap<u32, Vec<AffineParams<f64>>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hand_scale: Option<f64>,
}

pub fn cmd_align(args: &AlignArgs) -> Result<AlignOutput, CliError> {
    let scene_file: SceneFile = io::read_json(&args.scene).map_err(input)?;
    let base = args.scene.parent().unwrap_or(Path::new("."));
    let table_path = base.join(&scene_file.table_points_path);
    let table: Vec<Vec3<f64>> = io::read_json(&table_path).map_err(input)?;
    let pelvis_box = Aabb { min: scene_file.pelvis.human, max: scene_file.pelvis.human };
    let anchors = SceneAnchors {
        left_hip: scene_file.hips.left,
        right_hip: scene_file.hips.right,
        human_pelvis: scene_file.pelvis.human,
        robot_pelvis: scene_file.pelvis.robot,
        entities_aabb: scene_file.entities_aabb.unwrap_or(pelvis_box),
        workspace_aabb: scene_file.workspace_aabb,
        gravity_axis: scene_file.gravity_axis,
    };
    let (plane, transform) = scene::compute_scene_transform(&table, &anchors).map_err(input)?;
    let chunks: Option<ChunksFile> = args.chunks.as_deref().map(io::read_json).transpose().map_err(input)?;
    let (depth_alignment, hand_scale) = match &chunks {
        Some(c) => (
            Some(propagate_alignment_by_object(&c.overlaps).map_err(input)?),
            c.hand_extents.as_ref().map(hand_scale_factor).transpose().map_err(input)?,
        ),
        None => (None, None),
    };
    Ok(AlignOutput {
        table_plane: plane,
        camera_to_sim: transform.to_pose(),
        scene_transform: transform,
        depth_alignment,
        hand_scale,
    })
}

pub fn cmd_synth(args: &SynthArgs, out: &Path) -> Result<synth::ScenarioBundle, CliError> {
    let spec: ScenarioSpec = io::read_json(&args.spec).map_err(input)?;
    let bundle = synth::generate(&spec).map_err(input)?;
    bundle.write_dir(out).map_err(internal)?;
    Ok(bundle)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum HandsFile {
    Bundle { human: Vec<HandTrack> },
    Bare(Vec<HandTrack>),
}

pub fn cmd_extract_prior(args: &ExtractPriorArgs, weights: &RewardWeights<f64>) -> Result<ContactPrior<f64>, CliError> {
    let hands = match io::read_json::<HandsFile>(&args.hands).map_err(input)? {
        HandsFile::Bundle { human } | HandsFile::Bare(human) => human,
    };
    let traj = read_trajectory(&args.trajectory)?;
    let mesh = read_mesh(&args.mesh)?;
    let n = hands.iter().map(|h| h.keypoints.len()).min().unwrap_or(0);
    let per_frame: Vec<Vec<HandKeypointSet<f64>>> =
        (0..n).map(|i| hands.iter().map(|h| h.keypoints[i].clone()).collect()).collect();
    let trajs = BTreeMap::from([(args.object_id, traj)]);
    let meshes = BTreeMap::from([(args.object_id, mesh)]);
    rewards::extract_contact_prior(&per_frame, &trajs, &meshes, weights).map_err(input)
}

fn kv_table(pairs: &[(&str, String)]) -> String {
    let w = pairs.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    pairs.iter().map(|(k, v)| format!("{k:<w$}  {v}\n")).collect()
}

fn dispatch(cli: &Cli) -> Result<Output, CliError> {
    let g = &cli.global;
    match &cli.command {
        Command::Evaluate(a) => {
            let report = cmd_evaluate(a, &g.metric_config())?;
            let json = to_json(&report)?;
            let label = a.pred.file_stem().map_or("pred".into(), |s| s.to_string_lossy().into_owned());
            Ok(Output { file: json.clone(), json, table: MetricReport::table(&[(label, report)]) })
        }
        Command::Rewards(a) => {
            let rows = cmd_rewards(a, &g.reward_weights()?)?;
            let csv = rewards_csv(&rows);
            Ok(Output { file: csv.clone(), json: to_json(&rows)?, table: csv })
        }
        Command::Settle(a) => {
            let c = cmd_settle(a, g.seed)?;
            let json = to_json(&c)?;
            let table = kv_table(&[
                ("stable", c.stable.to_string()),
                ("rotational_deviation", format!("{:.6}", c.rotational_deviation)),
                ("settled_translation", format!("{:?}", <[f64; 3]>::from(c.settled_pose.translation))),
                ("settled_rotation", format!("{:?}", <[f64; 4]>::from(c.settled_pose.rotation))),
            ]);
            Ok(Output { file: json.clone(), json, table })
        }
        Command::Align(a) => {
            let o = cmd_align(a)?;
            let json = to_json(&o)?;
            let t = o.scene_transform.workspace_translation;
            let table = kv_table(&[
                ("table_normal", format!("{:?}", <[f64; 3]>::from(o.table_plane.normal))),
                ("table_inlier_rms", format!("{:.6}", o.table_plane.inlier_rms)),
                ("gravity_angle", format!("{:.6}", o.scene_transform.gravity_rotation.rotation.angle())),
                ("facing_angle", format!("{:.6}", o.scene_transform.facing_rotation.rotation.angle())),
                ("workspace_translation", format!("{:?}", <[f64; 3]>::from(t))),
                ("hand_scale", o.hand_scale.map_or("-".into(), |s| format!("{s:.6}"))),
            ]);
            Ok(Output { file: json.clone(), json, table })
        }
        Command::Synth(a) => {
            let out = g.out.as_deref().ok_or_else(|| input_msg("synth needs --out DIR"))?;
            let b = cmd_synth(a, out)?;
            let summary = serde_json::json!({
                "out": out,
                "frames": b.gt.len(),
                "vertices": b.mesh.vertex_count(),
                "contacts": b.contacts.len(),
            });
            let json = to_json(&summary)?;
            let table = kv_table(&[
                ("out", out.display().to_string()),
                ("frames", b.gt.len().to_string()),
                ("vertices", b.mesh.vertex_count().to_string()),
            ]);
            Ok(Output { file: String::new(), json, table })
        }
        Command::ExtractPrior(a) => {
            let p = cmd_extract_prior(a, &g.reward_weights()?)?;
            let json = to_json(&p)?;
            let table = kv_table(&[
                ("timesteps", p.timesteps.len().to_string()),
                ("pairs", p.pair_count().to_string()),
            ]);
            Ok(Output { file: json.clone(), json, table })
        }
    }
}

/// Runs a parsed command line on a pool of `--jobs` threads and returns
/// the text for standard output. The `--out` file is written here, except
/// for `synth` whose bundle is written by the command itself.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    let out = match cli.global.jobs {
        Some(0) => return Err(input_msg("--jobs must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(internal)?
            .install(|| dispatch(cli))?,
        None => dispatch(cli)?,
    };
    if let (Some(path), false) = (&cli.global.out, matches!(cli.command, Command::Synth(_))) {
        fs::write(path, &out.file)
            .with_context(|| format!("writing {}", path.display()))
            .map_err(internal)?;
    }
    Ok(match cli.global.format {
        Format::Json => out.json,
        Format::Table => out.table,
    })
}
