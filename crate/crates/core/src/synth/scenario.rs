use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{SplitMix64, SynthError};
use crate::geom::{Pose, PoseTrajectory, TrackFrame, TrackedPoints, TriMesh};
use crate::io::{self, DepthHeader, IoError};
use crate::linalg::{Mat3, Quat, Vec3};
use crate::metrics::{render_depth, render_silhouette, BinaryMask, CameraModel, DepthFrame};
use crate::rewards::{is_lifted, FrameState, HandKeypointSet, HandSide, HandState, ObjectState, KEYPOINTS_PER_HAND};

pub const JOINTS_PER_HAND: usize = 12;
/// Fingertip standoff from the scripted contact vertices once in contact.
pub const GRASP_STANDOFF: f64 = 0.02;
const LIFT_HEIGHT: f64 = 0.15;
const LIFT_THRESHOLD: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeshKind {
    Cube,
    Cylinder,
    Sphere,
    Tetra,
    /// Caller-supplied mesh, see [`generate_with_mesh`].
    Loaded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MotionKind {
    Static,
    Lift,
    Rotate,
    Tumble,
    Grasp,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct Noise {
    pub track_sigma: f64,
    pub depth_sigma: f64,
    pub outlier_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub seed: u64,
    pub mesh_kind: MeshKind,
    pub motion_kind: MotionKind,
    #[serde(default)]
    pub noise: Noise,
    pub n_frames: usize,
    #[serde(default = "default_camera")]
    pub camera: CameraModel<f64>,
    #[serde(default = "default_track_points")]
    pub n_track_points: usize,
}

fn default_track_points() -> usize {
    64
}

impl ScenarioSpec {
    pub fn new(seed: u64, mesh_kind: MeshKind, motion_kind: MotionKind, n_frames: usize) -> Self {
        Self {
            seed,
            mesh_kind,
            motion_kind,
            noise: Noise::default(),
            n_frames,
            camera: default_camera(),
            n_track_points: default_track_points(),
        }
    }

    fn validate(&self) -> Result<(), SynthError> {
        let n = &self.noise;
        if self.n_frames < 2 {
            return Err(SynthError::InvalidSpec("n_frames must be at least 2"));
        }
        if !(n.track_sigma >= 0.0 && n.depth_sigma >= 0.0 && (0.0..=1.0).contains(&n.outlier_fraction)) {
            return Err(SynthError::InvalidSpec("noise parameters must be non-negative"));
        }
        if self.n_track_points < 3 {
            return Err(SynthError::InvalidSpec("need at least 3 track points"));
        }
        self.camera.validate().map_err(|_| SynthError::InvalidSpec("invalid camera"))?;
        if self.motion_kind == MotionKind::Grasp && !matches!(self.mesh_kind, MeshKind::Cube | MeshKind::Cylinder) {
            return Err(SynthError::UnsupportedCombination {
                mesh: self.mesh_kind,
                motion: self.motion_kind,
            });
        }
        Ok(())
    }
}

/// Camera looking at the table origin from the front and above; world is
/// `z`-up with the table at `z = 0`.
pub fn default_camera() -> CameraModel<f64> {
    let eye = Vec3::new(0.0, -0.55, 0.35);
    let target = Vec3::new(0.0, 0.0, 0.05);
    let forward = (target - eye).normalize();
    let right = forward.cross(&Vec3::unit_z()).normalize();
    let down = forward.cross(&right);
    let rot = Mat3::from_cols(right, down, forward).transpose();
    let camera_from_world = Pose::from_matrix(&rot, -rot.mul_vec(&eye));
    CameraModel::new(200.0, 200.0, 80.0, 60.0, 160, 120)
        .expect("valid intrinsics")
        .with_extrinsics(camera_from_world)
}

pub fn primitive_mesh(kind: MeshKind) -> Option<TriMesh<f64>> {
    match kind {
        MeshKind::Cube => Some(TriMesh::cube(0.08, 12)),
        MeshKind::Cylinder => Some(TriMesh::cylinder(0.03, 0.10, 48, 12)),
        MeshKind::Sphere => Some(TriMesh::sphere(0.04, 24, 48)),
        MeshKind::Tetra => Some(TriMesh::tetrahedron(0.06, 10)),
        MeshKind::Loaded => None,
    }
}

/// Per-frame hand data for one side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HandTrack {
    pub side: HandSide,
    pub keypoints: Vec<HandKeypointSet<f64>>,
    pub wrist: Vec<Pose<f64>>,
    pub joints: Vec<Vec<f64>>,
}

/// Scripted contact: fingertip id and the mesh vertex it approaches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScriptedContact {
    pub keypoint: usize,
    pub vertex_index: usize,
    /// First frame at which the fingertip is within the standoff.
    pub from_frame: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioBundle {
    pub spec: ScenarioSpec,
    pub mesh: TriMesh<f64>,
    pub gt: PoseTrajectory<f64>,
    pub tracks: Vec<TrackFrame<f64>>,
    pub camera: CameraModel<f64>,
    /// Rendered from `gt`, stored at `f32` precision like the disk format.
    pub depth: Vec<DepthFrame<f64>>,
    pub masks: Vec<BinaryMask>,
    pub human_hands: Vec<HandTrack>,
    pub robot_hands: Vec<HandTrack>,
    pub lifted: Vec<bool>,
    pub contacts: Vec<ScriptedContact>,
}

fn rest_pose(mesh: &TriMesh<f64>) -> Pose<f64> {
    let (lo, _) = mesh.aabb();
    Pose::from_translation(Vec3::new(0.0, 0.0, -lo.z))
}

fn lift_fraction(i: usize, start: usize, n: usize) -> f64 {
    if i <= start || n <= start + 1 {
        0.0
    } else {
        (i - start) as f64 / (n - 1 - start) as f64
    }
}

fn motion(spec: &ScenarioSpec, mesh: &TriMesh<f64>, contact_frame: usize) -> Vec<Pose<f64>> {
    let n = spec.n_frames;
    let rest = rest_pose(mesh);
    let com = rest.transform_point(&mesh.center_of_mass());
    let about_com = |q: Quat<f64>| {
        Pose::from_translation(com)
            .compose(&Pose::from_rotation(q))
            .compose(&Pose::from_translation(-com))
    };
    let mut rng = SplitMix64::derive(spec.seed, 1);
    let tumble_axis = rng.unit_vector();
    (0..n)
        .map(|i| match spec.motion_kind {
            MotionKind::Static => rest,
            MotionKind::Lift | MotionKind::Grasp => {
                let start = if spec.motion_kind == MotionKind::Lift { n / 4 } else { contact_frame };
                let z = LIFT_HEIGHT * lift_fraction(i, start, n);
                Pose::from_translation(Vec3::new(0.0, 0.0, z)).compose(&rest)
            }
            MotionKind::Rotate => {
                let yaw = (3.0f64).to_radians() * i as f64;
                about_com(Quat::from_axis_angle(&Vec3::unit_z(), yaw)).compose(&rest)
            }
            MotionKind::Tumble => {
                let a = (4.0f64).to_radians() * i as f64;
                let phase = std::f64::consts::TAU * i as f64 / n as f64;
                let lift = Vec3::new(0.04 * phase.sin(), 0.0, 0.08 + 0.04 * lift_fraction(i, 0, n));
                Pose::from_translation(lift)
                    .compose(&about_com(Quat::from_axis_angle(&tumble_axis, a)))
                    .compose(&rest)
            }
        })
        .collect()
}

/// Object-frame points: three contact targets then far-away parking spots.
struct HandScript {
    contact_vertices: Vec<(usize, Vec3<f64>)>,
    contact_frame: usize,
}

fn contact_targets(mesh: &TriMesh<f64>) -> Vec<(usize, Vec3<f64>)> {
    let com = mesh.center_of_mass();
    [Vec3::unit_x(), -Vec3::unit_x(), Vec3::unit_y()]
        .into_iter()
        .map(|dir| {
            let extent = mesh
                .vertices()
                .iter()
                .map(|v| (*v - com).dot(&dir))
                .fold(f64::NEG_INFINITY, f64::max);
            let target = com + dir * extent;
            let idx = (0..mesh.vertex_count())
                .min_by(|&a, &b| {
                    let da = (mesh.vertices()[a] - target).norm_squared();
                    let db = (mesh.vertices()[b] - target).norm_squared();
                    da.total_cmp(&db).then(a.cmp(&b))
                })
                .expect("non-empty mesh");
            (idx, dir)
        })
        .collect()
}

fn hand_tracks(
    mesh: &TriMesh<f64>,
    gt: &[Pose<f64>],
    script: Option<&HandScript>,
) -> Vec<HandTrack> {
    let com = mesh.center_of_mass();
    let sides = [(HandSide::Left, -0.3), (HandSide::Right, 0.3)];
    sides
        .iter()
        .enumerate()
        .map(|(h, &(side, x_off))| {
            let park = |k: usize| com + Vec3::new(x_off + 0.01 * k as f64, -0.3, 0.2);
            let mut keypoints = Vec::with_capacity(gt.len());
            let mut wrist = Vec::with_capacity(gt.len());
            let mut joints = Vec::with_capacity(gt.len());
            for (i, pose) in gt.iter().enumerate() {
                let mut pos = [Vec3::zero(); KEYPOINTS_PER_HAND];
                let mut nrm = [-Vec3::unit_z(); KEYPOINTS_PER_HAND];
                for (k, p) in pos.iter_mut().enumerate() {
                    *p = park(k);
                }
                if let (Some(s), HandSide::Left) = (script, side) {
                    for (k, (vi, dir)) in s.contact_vertices.iter().enumerate() {
                        let gap = if i >= s.contact_frame {
                            GRASP_STANDOFF
                        } else {
                            0.05 + 0.05 * (s.contact_frame - 1 - i) as f64 / s.contact_frame as f64
                        };
                        pos[k] = mesh.vertices()[*vi] + *dir * gap;
                        nrm[k] = -*dir;
                    }
                }
                let set = HandKeypointSet::from_arrays(side, pos, nrm).transformed(pose);
                keypoints.push(set);
                wrist.push(pose.compose(&Pose::from_translation(park(KEYPOINTS_PER_HAND))));
                joints.push(
                    (0..JOINTS_PER_HAND)
                        .map(|j| 0.3 * (0.1 * i as f64 + j as f64 + h as f64).sin())
                        .collect(),
                );
            }
            HandTrack { side, keypoints, wrist, joints }
        })
        .collect()
}

fn track_points(spec: &ScenarioSpec, mesh: &TriMesh<f64>, gt: &[Pose<f64>]) -> Vec<TrackFrame<f64>> {
    let mut pick = SplitMix64::derive(spec.seed, 2);
    let local: Vec<Vec3<f64>> = (0..spec.n_track_points)
        .map(|_| mesh.vertices()[pick.below(mesh.vertex_count())])
        .collect();
    let mut noise = SplitMix64::derive(spec.seed, 3);
    let n = &spec.noise;
    gt.iter()
        .enumerate()
        .map(|(i, pose)| {
            let points = local
                .iter()
                .map(|p| {
                    let mut w = pose.transform_point(p);
                    if n.track_sigma > 0.0 {
                        w += noise.gaussian_vec3(n.track_sigma);
                    }
                    if n.outlier_fraction > 0.0 && noise.next_f64() < n.outlier_fraction {
                        w += Vec3::new(noise.uniform(-0.2, 0.2), noise.uniform(-0.2, 0.2), noise.uniform(-0.2, 0.2));
                    }
                    w
                })
                .collect::<Vec<_>>();
            TrackFrame { frame: i, valid: vec![true; points.len()], points }
        })
        .collect()
}

fn depth_frames(spec: &ScenarioSpec, mesh: &TriMesh<f64>, gt: &[Pose<f64>]) -> Vec<DepthFrame<f64>> {
    let cam = &spec.camera;
    let mut noise = SplitMix64::derive(spec.seed, 4);
    gt.iter()
        .map(|pose| {
            let zbuf = render_depth(mesh, pose, cam);
            let visible: Vec<bool> = zbuf.iter().map(Option::is_some).collect();
            let depth = zbuf
                .iter()
                .map(|z| match z {
                    Some(z) => {
                        let jitter = if spec.noise.depth_sigma > 0.0 {
                            spec.noise.depth_sigma * noise.next_gaussian()
                        } else {
                            0.0
                        };
                        ((z + jitter).max(0.0) as f32) as f64
                    }
                    None => 0.0,
                })
                .collect();
            DepthFrame::new(cam.width, cam.height, depth, visible).expect("consistent dimensions")
        })
        .collect()
}

/// Builds a scenario around a primitive mesh.
pub fn generate(spec: &ScenarioSpec) -> Result<ScenarioBundle, SynthError> {
    let mesh = primitive_mesh(spec.mesh_kind).ok_or(SynthError::MissingMesh)?;
    generate_with_mesh(spec, mesh)
}

pub fn generate_with_mesh(spec: &ScenarioSpec, mesh: TriMesh<f64>) -> Result<ScenarioBundle, SynthError> {
    spec.validate()?;
    let n = spec.n_frames;
    let contact_frame = 30.min(n / 2).max(1);
    let gt = motion(spec, &mesh, contact_frame);
    let script = (spec.motion_kind == MotionKind::Grasp).then(|| HandScript {
        contact_vertices: contact_targets(&mesh),
        contact_frame,
    });
    let contacts = script
        .as_ref()
        .map(|s| {
            s.contact_vertices
                .iter()
                .enumerate()
                .map(|(k, (vi, _))| ScriptedContact { keypoint: k, vertex_index: *vi, from_frame: contact_frame })
                .collect()
        })
        .unwrap_or_default();
    let hands = hand_tracks(&mesh, &gt, script.as_ref());
    let com = mesh.center_of_mass();
    let rest_z = gt[0].transform_point(&com).z;
    let lifted = gt
        .iter()
        .map(|p| is_lifted(p.transform_point(&com).z, rest_z, LIFT_THRESHOLD))
        .collect();
    let masks = gt.iter().map(|p| render_silhouette(&mesh, p, &spec.camera)).collect();
    Ok(ScenarioBundle {
        spec: spec.clone(),
        tracks: track_points(spec, &mesh, &gt),
        depth: depth_frames(spec, &mesh, &gt),
        masks,
        camera: spec.camera,
        gt: PoseTrajectory::new(gt).expect("n_frames >= 2"),
        robot_hands: hands.clone(),
        human_hands: hands,
        lifted,
        contacts,
        mesh,
    })
}

impl ScenarioBundle {
    pub const OBJECT_ID: u32 = 0;

    pub fn tracked_points(&self) -> TrackedPoints<f64> {
        TrackedPoints::new(self.tracks.clone()).expect("generated tracks are consistent")
    }

    /// Human demonstration keypoints per frame, both hands.
    pub fn human_keypoints(&self) -> Vec<Vec<HandKeypointSet<f64>>> {
        (0..self.gt.len())
            .map(|i| self.human_hands.iter().map(|h| h.keypoints[i].clone()).collect())
            .collect()
    }

    /// Reward inputs where the robot reproduces the demonstration exactly.
    pub fn frame_states(&self) -> Vec<FrameState<f64>> {
        (0..self.gt.len())
            .map(|i| FrameState {
                objects: vec![ObjectState {
                    id: Self::OBJECT_ID,
                    current: self.gt.frames()[i],
                    reference: self.gt.frames()[i],
                    lifted: self.lifted[i],
                }],
                hands: self
                    .robot_hands
                    .iter()
                    .zip(&self.human_hands)
                    .map(|(r, h)| HandState {
                        robot: r.keypoints[i].clone(),
                        human: h.keypoints[i].clone(),
                        wrist: r.wrist[i],
                        wrist_ref: h.wrist[i],
                        joints: r.joints[i].clone(),
                        joints_ref: h.joints[i].clone(),
                    })
                    .collect(),
            })
            .collect()
    }

    /// Writes the bundle in the interchange formats:
    /// `mesh.obj`, `gt_trajectory.json`, `tracks.jsonl`, `camera.json`,
    /// `depth/`, `masks/`, `hands.json`, `states.jsonl`, `lifted.json`,
    /// `contacts.json` and `spec.json`.
    pub fn write_dir(&self, dir: &Path) -> Result<(), IoError> {
        let mkdir = |p: &Path| fs::create_dir_all(p).map_err(|source| IoError::Io { path: p.to_path_buf(), source });
        let depth_dir = dir.join("depth");
        let mask_dir = dir.join("masks");
        mkdir(dir)?;
        mkdir(&depth_dir)?;
        mkdir(&mask_dir)?;
        io::write_obj(&dir.join("mesh.obj"), &self.mesh)?;
        io::write_json(&dir.join("gt_trajectory.json"), &self.gt)?;
        io::write_tracks(&dir.join("tracks.jsonl"), &self.tracked_points())?;
        io::write_json(&dir.join("camera.json"), &self.camera)?;
        io::write_json(&dir.join("spec.json"), &self.spec)?;
        io::write_json(&dir.join("lifted.json"), &self.lifted)?;
        io::write_json(&dir.join("contacts.json"), &self.contacts)?;
        io::write_json(
            &dir.join("hands.json"),
            &serde_json::json!({ "human": self.human_hands, "robot": self.robot_hands }),
        )?;
        let states_path = dir.join("states.jsonl");
        let mut lines = String::new();
        for s in self.frame_states() {
            let line = serde_json::to_string(&s).map_err(|source| IoError::Json { path: states_path.clone(), source })?;
            lines.push_str(&line);
            lines.push('\n');
        }
        fs::write(&states_path, lines).map_err(|source| IoError::Io { path: states_path.clone(), source })?;
        for (i, (d, m)) in self.depth.iter().zip(&self.masks).enumerate() {
            let header = DepthHeader { width: d.width, height: d.height, frame_index: i };
            let data: Vec<f32> = d.depth.iter().map(|v| *v as f32).collect();
            io::write_depth(&depth_dir.join(io::depth_file_name(i)), &header, &data)?;
            io::write_pgm(&mask_dir.join(io::mask_file_name(i)), m)?;
        }
        Ok(())
    }
}
