use serde::{Deserialize, Serialize};

use super::SceneError;
use crate::geom::Pose;
use crate::linalg::{symmetric_eigen, Mat3, Quat, Vec3};
use crate::scalar::Real;

/// Dominant plane of the table point cloud.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TablePlaneFit<T: Real> {
    /// Unit normal pointing to the camera side of the plane.
    pub normal: Vec3<T>,
    pub centroid: Vec3<T>,
    pub inlier_rms: T,
}

/// Plane through the centroid whose normal is the direction of least
/// variance. The camera is assumed at the origin of the cloud's frame.
pub fn fit_table_plane<T: Real>(points: &[Vec3<T>]) -> Result<TablePlaneFit<T>, SceneError> {
    if points.len() < 3 {
        return Err(SceneError::TooFewPoints(points.len()));
    }
    let centroid = Vec3::centroid(points);
    let mut cov = Mat3::zero();
    for p in points {
        let d = *p - centroid;
        cov = cov + Mat3::outer(&d, &d);
    }
    let eig = symmetric_eigen(&cov);
    let sigma = eig.values.map(|v| v.max(T::zero()).sqrt());
    if !(sigma[1] > T::zero()) || sigma[1] - sigma[0] <= T::lit(0.1) * sigma[1] {
        return Err(SceneError::DegeneratePlane {
            smallest: sigma[0].to_f64_lossy(),
            middle: sigma[1].to_f64_lossy(),
        });
    }
    let mut normal = eig.vectors.col(0).normalize();
    if normal.dot(&(-centroid)) < T::zero() {
        normal = -normal;
    }
    let n = T::from_usize_lossy(points.len());
    let inlier_rms = (points
        .iter()
        .map(|p| normal.dot(&(*p - centroid)).powi(2))
        .sum::<T>()
        / n)
        .sqrt();
    Ok(TablePlaneFit {
        normal,
        centroid,
        inlier_rms,
    })
}

/// Minimal rotation taking `-plane.normal` onto `sim_gravity_axis`.
/// Antiparallel inputs rotate 180 degrees about `+x` (made orthogonal to
/// the normal when needed).
pub fn gravity_alignment<T: Real>(plane: &TablePlaneFit<T>, sim_gravity_axis: &Vec3<T>) -> Pose<T> {
    let down = -plane.normal.normalize();
    let g = sim_gravity_axis.normalize();
    Pose::from_rotation(Quat::from_two_vectors(&down, &g, &Vec3::unit_x()))
}

/// Yaw about the simulator's `+z` (up) axis that points the horizontal
/// part of the left-to-right hip vector along `sim_x_axis`.
pub fn facing_alignment<T: Real>(
    left_hip: &Vec3<T>,
    right_hip: &Vec3<T>,
    sim_x_axis: &Vec3<T>,
) -> Result<Pose<T>, SceneError> {
    facing_alignment_about(left_hip, right_hip, sim_x_axis, &Vec3::unit_z())
}

pub fn facing_alignment_about<T: Real>(
    left_hip: &Vec3<T>,
    right_hip: &Vec3<T>,
    sim_x_axis: &Vec3<T>,
    up: &Vec3<T>,
) -> Result<Pose<T>, SceneError> {
    let up = up.normalize();
    let horizontal = |v: &Vec3<T>| *v - up * v.dot(&up);
    let hip = horizontal(&(*right_hip - *left_hip));
    let min_len = T::lit(1e-3);
    let hip = hip.try_normalize(min_len).ok_or(SceneError::DegenerateHips)?;
    let x = horizontal(sim_x_axis)
        .try_normalize(T::lit(1e-9))
        .ok_or(SceneError::InvalidAxis)?;
    let yaw = hip.cross(&x).dot(&up).atan2(hip.dot(&x));
    Ok(Pose::from_rotation(Quat::from_axis_angle(&up, yaw)))
}

/// Axis-aligned box, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb<T: Real> {
    pub min: Vec3<T>,
    pub max: Vec3<T>,
}

impl<T: Real> Aabb<T> {
    pub fn new(min: Vec3<T>, max: Vec3<T>) -> Result<Self, SceneError> {
        if min.x > max.x || min.y > max.y || min.z > max.z {
            return Err(SceneError::InvalidAabb);
        }
        Ok(Self { min, max })
    }

    pub fn from_points(pts: &[Vec3<T>]) -> Option<Self> {
        if pts.is_empty() {
            return None;
        }
        let (min, max) = crate::geom::aabb_of(pts);
        Some(Self { min, max })
    }

    pub fn translated(&self, t: &Vec3<T>) -> Self {
        Self {
            min: self.min + *t,
            max: self.max + *t,
        }
    }

    /// Bounding box of this box's corners after `pose`.
    pub fn transformed(&self, pose: &Pose<T>) -> Self {
        let corners: Vec<Vec3<T>> = (0..8)
            .map(|i| {
                Vec3::new(
                    if i & 1 == 0 { self.min.x } else { self.max.x },
                    if i & 2 == 0 { self.min.y } else { self.max.y },
                    if i & 4 == 0 { self.min.z } else { self.max.z },
                )
            })
            .map(|c| pose.transform_point(&c))
            .collect();
        Self::from_points(&corners).expect("eight corners")
    }

    pub fn contains(&self, other: &Self) -> bool {
        other.min.x >= self.min.x
            && other.min.y >= self.min.y
            && other.min.z >= self.min.z
            && other.max.x <= self.max.x
            && other.max.y <= self.max.y
            && other.max.z <= self.max.z
    }
}

/// `robot_pelvis - human_pelvis`, plus the smallest shift along `y` that
/// keeps the translated entities inside the workspace.
pub fn workspace_translation<T: Real>(
    human_pelvis: &Vec3<T>,
    robot_pelvis: &Vec3<T>,
    entities: &Aabb<T>,
    workspace: &Aabb<T>,
) -> Result<Vec3<T>, SceneError> {
    let base = *robot_pelvis - *human_pelvis;
    let moved = entities.translated(&base);
    let fits = |lo: T, hi: T, wlo: T, whi: T| lo >= wlo && hi <= whi;
    if !fits(moved.min.x, moved.max.x, workspace.min.x, workspace.max.x)
        || !fits(moved.min.z, moved.max.z, workspace.min.z, workspace.max.z)
        || moved.max.y - moved.min.y > workspace.max.y - workspace.min.y
    {
        return Err(SceneError::WorkspaceOverflow);
    }
    let shift = if moved.max.y > workspace.max.y {
        workspace.max.y - moved.max.y
    } else if moved.min.y < workspace.min.y {
        workspace.min.y - moved.min.y
    } else {
        T::zero()
    };
    Ok(base + Vec3::new(T::zero(), shift, T::zero()))
}

/// Camera-to-simulator transform, applied gravity, then facing, then
/// translation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SceneTransform<T: Real> {
    pub gravity_rotation: Pose<T>,
    pub facing_rotation: Pose<T>,
    pub workspace_translation: Vec3<T>,
}

impl<T: Real> SceneTransform<T> {
    pub fn rotation(&self) -> Pose<T> {
        self.facing_rotation.compose(&self.gravity_rotation)
    }

    pub fn to_pose(&self) -> Pose<T> {
        Pose::from_translation(self.workspace_translation).compose(&self.rotation())
    }

    pub fn apply_point(&self, p: &Vec3<T>) -> Vec3<T> {
        self.to_pose().transform_point(p)
    }
}

/// Everything needed to place the video scene in the simulator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneAnchors<T: Real> {
    pub left_hip: Vec3<T>,
    pub right_hip: Vec3<T>,
    pub human_pelvis: Vec3<T>,
    pub robot_pelvis: Vec3<T>,
    /// Bounds of the reconstructed entities in the camera frame.
    pub entities_aabb: Aabb<T>,
    pub workspace_aabb: Aabb<T>,
    pub gravity_axis: Vec3<T>,
}

/// Full gravity / facing / translation chain from a table cloud and body
/// anchors expressed in the camera frame.
pub fn compute_scene_transform<T: Real>(
    table_points: &[Vec3<T>],
    anchors: &SceneAnchors<T>,
) -> Result<(TablePlaneFit<T>, SceneTransform<T>), SceneError> {
    let plane = fit_table_plane(table_points)?;
    let gravity = gravity_alignment(&plane, &anchors.gravity_axis);
    let up = -anchors.gravity_axis.normalize();
    let lh = gravity.transform_point(&anchors.left_hip);
    let rh = gravity.transform_point(&anchors.right_hip);
    let facing = facing_alignment_about(&lh, &rh, &Vec3::unit_x(), &up)?;
    let rot = facing.compose(&gravity);
    let pelvis = rot.transform_point(&anchors.human_pelvis);
    let entities = anchors.entities_aabb.transformed(&rot);
    let t = workspace_translation(&pelvis, &anchors.robot_pelvis, &entities, &anchors.workspace_aabb)?;
    Ok((
        plane,
        SceneTransform {
            gravity_rotation: gravity,
            facing_rotation: facing,
            workspace_translation: t,
        },
    ))
}
