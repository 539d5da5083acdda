//! Deterministic numerical core for turning tracked human demonstrations
//! into simulated dexterous-manipulation skills.
//!
//! The crate covers rigid-motion recovery from point tracks, object-centric
//! depth alignment, camera-to-simulator scene setup with stable-placement
//! sampling, contact/object/imitation rewards, residual action
//! accumulation and a 6D pose-trajectory evaluation suite.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`). The aliases at
//! the crate root fix the scalar to `f64`, which is what the file formats,
//! the synthetic scenario generator and the CLI use.

pub mod depth_align;
pub mod geom;
pub mod io;
pub mod linalg;
pub mod metrics;
pub mod pose_track;
pub mod residual;
pub mod rewards;
pub mod scalar;
pub mod scene;
pub mod synth;

pub use scalar::Real;

pub type Vec3 = linalg::Vec3<f64>;
pub type Quat = linalg::Quat<f64>;
pub type Mat3 = linalg::Mat3<f64>;
pub type Pose = geom::Pose<f64>;
pub type PoseTrajectory = geom::PoseTrajectory<f64>;
pub type TrackedPoints = geom::TrackedPoints<f64>;
pub type TriMesh = geom::TriMesh<f64>;

pub type Vec3f = linalg::Vec3<f32>;
pub type Quatf = linalg::Quat<f32>;
pub type Posef = geom::Pose<f32>;
pub type PoseTrajectoryf = geom::PoseTrajectory<f32>;
pub type TriMeshf = geom::TriMesh<f32>;

pub type ContactPrior = rewards::ContactPrior<f64>;
pub type RewardWeights = rewards::RewardWeights<f64>;
pub type FrameState = rewards::FrameState<f64>;
pub type CameraModel = metrics::CameraModel<f64>;
pub type DepthFrame = metrics::DepthFrame<f64>;
pub type ControlTarget = residual::ControlTarget<f64>;
pub type ResidualAction = residual::ResidualAction<f64>;
