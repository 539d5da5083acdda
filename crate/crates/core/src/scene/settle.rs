use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::hull::{convex_hull, support_query};
use crate::geom::{Pose, TriMesh};
use crate::linalg::{Quat, Vec3};
use crate::scalar::Real;
use crate::synth::SplitMix64;

/// Quasi-static settler tuning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SettleParams<T: Real> {
    /// Vertices closer than this to `z = 0` count as contacts, meters.
    pub contact_band: T,
    /// Largest rotation per tipping step, radians.
    pub step_angle: T,
    /// Slack on the COM-in-support test, meters.
    pub support_tolerance: T,
}

impl<T: Real> Default for SettleParams<T> {
    fn default() -> Self {
        Self {
            contact_band: T::lit(5e-4),
            step_angle: T::lit(2.0f64.to_radians()),
            support_tolerance: T::lit(1e-9),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SettleOutcome<T: Real> {
    pub pose: Pose<T>,
    pub at_rest: bool,
    /// Tipping rotations performed.
    pub steps: usize,
}

/// Translation that puts the lowest vertex on `z = 0`.
pub fn drop_to_plane<T: Real>(mesh: &TriMesh<T>, pose: &Pose<T>) -> Pose<T> {
    let min_z = mesh
        .transformed_vertices(pose)
        .iter()
        .fold(T::infinity(), |m, v| m.min(v.z));
    Pose::new(pose.rotation, pose.translation - Vec3::new(T::zero(), T::zero(), min_z))
}

/// Rest pose after at most `steps` tipping rotations with default tuning.
pub fn settle<T: Real>(mesh: &TriMesh<T>, pose: &Pose<T>, steps: usize) -> Pose<T> {
    settle_with(mesh, pose, steps, &SettleParams::default()).pose
}

pub fn settle_with<T: Real>(
    mesh: &TriMesh<T>,
    pose: &Pose<T>,
    steps: usize,
    params: &SettleParams<T>,
) -> SettleOutcome<T> {
    let com = mesh.center_of_mass();
    let up = Vec3::unit_z();
    let mut pose = drop_to_plane(mesh, pose);
    let mut done = 0;
    loop {
        let world = mesh.transformed_vertices(&pose);
        let contacts: Vec<[T; 2]> = world
            .iter()
            .filter(|v| v.z <= params.contact_band)
            .map(|v| [v.x, v.y])
            .collect();
        let hull = convex_hull(&contacts);
        let c = pose.transform_point(&com);
        let Some(q) = support_query(&hull, [c.x, c.y], params.support_tolerance) else {
            return SettleOutcome { pose, at_rest: true, steps: done };
        };
        if done == steps {
            return SettleOutcome { pose, at_rest: false, steps: done };
        }
        let pivot = Vec3::new(q[0], q[1], T::zero());
        let toward = Vec3::new(c.x - q[0], c.y - q[1], T::zero()).normalize();
        let axis = up.cross(&toward);
        // first non-contact vertex to reach the plane limits the step
        let mut angle = params.step_angle;
        for v in world.iter().filter(|v| v.z > params.contact_band) {
            let r = *v - pivot;
            let reach = T::FRAC_PI_2() - r.dot(&toward).atan2(r.z);
            if reach > T::zero() && reach < angle {
                angle = reach;
            }
        }
        let rot = Quat::from_axis_angle(&axis, angle);
        let about = Pose::from_translation(pivot)
            .compose(&Pose::from_rotation(rot))
            .compose(&Pose::from_translation(-pivot));
        pose = drop_to_plane(mesh, &about.compose(&pose));
        done += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SettleCandidate<T: Real> {
    pub initial_pose: Pose<T>,
    pub settled_pose: Pose<T>,
    /// Settled rotation versus the original estimated pose, radians.
    pub rotational_deviation: T,
    pub stable: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingParams<T: Real> {
    pub n_candidates: usize,
    pub max_angle: T,
    pub settle_steps: usize,
    pub stability_threshold: T,
    pub settle: SettleParams<T>,
}

impl<T: Real> Default for SamplingParams<T> {
    fn default() -> Self {
        Self {
            n_candidates: 20,
            max_angle: T::FRAC_PI_4(),
            settle_steps: 20,
            stability_threshold: T::lit(0.75),
            settle: SettleParams::default(),
        }
    }
}

/// Settles `pose` once and scores it against `reference`.
pub fn evaluate_candidate<T: Real>(
    mesh: &TriMesh<T>,
    pose: &Pose<T>,
    reference: &Pose<T>,
    params: &SamplingParams<T>,
) -> SettleCandidate<T> {
    let out = settle_with(mesh, pose, params.settle_steps, &params.settle);
    let rotational_deviation = out.pose.rotation_angle_to(reference);
    SettleCandidate {
        initial_pose: *pose,
        settled_pose: out.pose,
        rotational_deviation,
        stable: out.at_rest && rotational_deviation < params.stability_threshold,
    }
}

/// Candidate 0 is `initial`; the rest rotate it about its COM by a random
/// axis and an angle uniform in `[-max_angle, max_angle]`.
pub fn perturbation_candidates<T: Real>(
    mesh: &TriMesh<T>,
    initial: &Pose<T>,
    params: &SamplingParams<T>,
    seed: u64,
) -> Vec<Pose<T>> {
    let com = mesh.center_of_mass();
    let com_world = initial.transform_point(&com);
    let mut rng = SplitMix64::new(seed);
    let max = params.max_angle.to_f64_lossy();
    let mut out = Vec::with_capacity(params.n_candidates + 1);
    out.push(*initial);
    for _ in 0..params.n_candidates {
        let axis: Vec3<T> = rng.unit_vector().cast();
        let angle = T::lit(rng.uniform(-max, max));
        let rotation = (Quat::from_axis_angle(&axis, angle) * initial.rotation).normalize();
        let translation = com_world - rotation.rotate(&com);
        out.push(Pose::new(rotation, translation));
    }
    out
}

/// Perturb, settle each candidate, keep the stable one closest to the
/// original pose. Ties go to the lowest candidate index.
pub fn sample_stable_configuration<T: Real>(
    mesh: &TriMesh<T>,
    initial: &Pose<T>,
    params: &SamplingParams<T>,
    seed: u64,
) -> SettleCandidate<T> {
    let candidates = perturbation_candidates(mesh, initial, params, seed);
    let settled: Vec<SettleCandidate<T>> = candidates
        .par_iter()
        .map(|p| evaluate_candidate(mesh, p, initial, params))
        .collect();
    let pick = |only_stable: bool| {
        settled
            .iter()
            .filter(|c| !only_stable || c.stable)
            .fold(None::<&SettleCandidate<T>>, |best, c| match best {
                Some(b) if b.rotational_deviation <= c.rotational_deviation => Some(b),
                _ => Some(c),
            })
            .copied()
    };
    pick(true).or_else(|| pick(false)).expect("candidate 0 always present")
}
