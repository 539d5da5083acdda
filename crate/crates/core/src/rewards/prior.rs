use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{HandKeypointSet, ObjectId, RewardError, RewardWeights};
use crate::geom::{PoseTrajectory, TriMesh};
use crate::linalg::Vec3;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactPair<T: Real> {
    pub keypoint: usize,
    pub object: ObjectId,
    pub vertex_index: usize,
    /// Vertex in the object frame. Files written without it are completed
    /// by [`ContactPrior::resolve_vertices`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex_object_frame: Option<Vec3<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactTimestep<T: Real> {
    pub t: usize,
    pub pairs: Vec<ContactPair<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactThresholds<T: Real> {
    pub fingertip: T,
    pub palm: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactPrior<T: Real> {
    /// Sorted by `t`.
    pub timesteps: Vec<ContactTimestep<T>>,
    pub thresholds: ContactThresholds<T>,
}

impl<T: Real> ContactPrior<T> {
    pub fn pairs_at(&self, t: usize) -> &[ContactPair<T>] {
        match self.timesteps.binary_search_by_key(&t, |s| s.t) {
            Ok(i) => &self.timesteps[i].pairs,
            Err(_) => &[],
        }
    }

    pub fn pair_count(&self) -> usize {
        self.timesteps.iter().map(|s| s.pairs.len()).sum()
    }

    /// Fills missing object-frame vertices from the meshes and sorts the
    /// timesteps. Pairs that already carry a vertex need no mesh.
    pub fn resolve_vertices(&mut self, meshes: &BTreeMap<ObjectId, TriMesh<T>>) -> Result<(), RewardError> {
        self.timesteps.sort_by_key(|s| s.t);
        for pair in self.timesteps.iter_mut().flat_map(|s| s.pairs.iter_mut()) {
            let mesh = match (meshes.get(&pair.object), pair.vertex_object_frame) {
                (Some(m), _) => m,
                (None, Some(_)) => continue,
                (None, None) => return Err(RewardError::MissingMesh(pair.object)),
            };
            let v = mesh.vertices().get(pair.vertex_index).ok_or(RewardError::VertexOutOfRange {
                object: pair.object,
                index: pair.vertex_index,
            })?;
            pair.vertex_object_frame.get_or_insert(*v);
        }
        Ok(())
    }
}

/// Lowest-index nearest vertex by squared distance.
fn nearest_vertex<T: Real>(vertices: &[Vec3<T>], p: &Vec3<T>) -> Option<(usize, T)> {
    let mut best: Option<(usize, T)> = None;
    for (i, v) in vertices.iter().enumerate() {
        let d2 = (*v - *p).norm_squared();
        if best.map_or(true, |(_, b)| d2 < b) {
            best = Some((i, d2));
        }
    }
    best.map(|(i, d2)| (i, d2.sqrt()))
}

/// Keeps, for every frame, keypoint and object, the nearest world-space
/// vertex of the reference-posed mesh when it lies within the keypoint's
/// threshold.
pub fn extract_contact_prior<T: Real>(
    human_traj: &[Vec<HandKeypointSet<T>>],
    object_trajs: &BTreeMap<ObjectId, PoseTrajectory<T>>,
    meshes: &BTreeMap<ObjectId, TriMesh<T>>,
    weights: &RewardWeights<T>,
) -> Result<ContactPrior<T>, RewardError> {
    let frames = human_traj.len();
    for (&id, traj) in object_trajs {
        if !meshes.contains_key(&id) {
            return Err(RewardError::MissingMesh(id));
        }
        if traj.len() < frames {
            return Err(RewardError::TrajectoryTooShort { object: id, got: traj.len(), need: frames });
        }
    }
    let timesteps = human_traj
        .par_iter()
        .enumerate()
        .map(|(t, hands)| {
            let world: Vec<(ObjectId, Vec<Vec3<T>>)> = object_trajs
                .iter()
                .map(|(&id, traj)| (id, meshes[&id].transformed_vertices(&traj.frames()[t])))
                .collect();
            let mut pairs = Vec::new();
            for kp in hands.iter().flat_map(|h| h.keypoints.iter()) {
                let tau = weights.tau(kp.kind);
                for (id, verts) in &world {
                    if let Some((idx, d)) = nearest_vertex(verts, &kp.position) {
                        if d <= tau {
                            pairs.push(ContactPair {
                                keypoint: kp.id,
                                object: *id,
                                vertex_index: idx,
                                vertex_object_frame: Some(meshes[id].vertices()[idx]),
                            });
                        }
                    }
                }
            }
            ContactTimestep { t, pairs }
        })
        .collect();
    Ok(ContactPrior {
        timesteps,
        thresholds: ContactThresholds {
            fingertip: weights.tau_fingertip,
            palm: weights.tau_palm,
        },
    })
}
