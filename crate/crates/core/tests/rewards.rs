use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use manip_core::rewards::{
    contact_reward, evaluate_rewards, extract_contact_prior, imitation_reward, object_reward, total_reward, ContactPair,
    ContactPrior, ContactThresholds, ContactTimestep, FrameState, HandKeypointSet, HandSide, HandState, KeypointKind,
    ObjectState, RewardError, RewardWeights,
};
use manip_core::synth::{generate, MeshKind, MotionKind, ScenarioSpec, SplitMix64};
use manip_core::{Pose, PoseTrajectory, Quat, TriMesh, Vec3};

type V = [f64; 3];
type Q = [f64; 4];

/// Table-4 values typed in independently of the crate defaults.
mod w {
    pub const GAMMA: f64 = 1.0;
    pub const WC_TIP: f64 = 0.5;
    pub const WC_PALM: f64 = 2.0;
    pub const LAMBDA_C: f64 = 400.0;
    pub const WC1: f64 = 1.0;
    pub const WC2: f64 = 1.0;
    pub const WO_POS: f64 = 5.0;
    pub const WO_ROT: f64 = 1.0;
    pub const LO_POS: f64 = 80.0;
    pub const LO_ROT: f64 = 3.0;
    pub const WO1: f64 = 0.1;
    pub const WO2: f64 = 4.0;
    pub const WI_POS: f64 = 0.5;
    pub const WI_ROT: f64 = 0.5;
    pub const WI_JNT: f64 = 0.5;
    pub const LI_POS: f64 = 2.0;
    pub const LI_ROT: f64 = 20.0;
    pub const LI_JNT: f64 = 20.0;
}

fn sub(a: V, b: V) -> V {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: V, b: V) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: V) -> f64 {
    dot(a, a).sqrt()
}

fn rotate(q: Q, v: V) -> V {
    let [w, x, y, z] = q;
    let m = [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ];
    [dot(m[0], v), dot(m[1], v), dot(m[2], v)]
}

/// Geodesic angle via the relative quaternion `a^-1 b`.
fn angle(a: Q, b: Q) -> f64 {
    let [aw, ax, ay, az] = a;
    let [bw, bx, by, bz] = b;
    let w = aw * bw + ax * bx + ay * by + az * bz;
    let x = aw * bx - ax * bw - ay * bz + az * by;
    let y = aw * by + ax * bz - ay * bw - az * bx;
    let z = aw * bz - ax * by + ay * bx - az * bw;
    2.0 * (x * x + y * y + z * z).sqrt().atan2(w.abs())
}

struct RawObject {
    id: u32,
    cur: (Q, V),
    reference: (Q, V),
    lifted: bool,
}

struct RawHand {
    left: bool,
    pos: [V; 9],
    nrm: [V; 9],
    wrist: (Q, V),
    wrist_ref: (Q, V),
    joints: Vec<f64>,
    joints_ref: Vec<f64>,
}

struct Raw {
    objects: Vec<RawObject>,
    hands: Vec<RawHand>,
    pairs: Vec<(usize, u32, V)>,
}

fn oracle_contact(s: &Raw) -> f64 {
    if s.pairs.is_empty() {
        return 0.0;
    }
    let mut sum = 0.0;
    for &(kp, obj, local) in &s.pairs {
        let o = s.objects.iter().find(|o| o.id == obj).unwrap();
        let hand = s.hands.iter().find(|h| h.left == (kp < 9)).unwrap();
        let (p, n) = (hand.pos[kp % 9], hand.nrm[kp % 9]);
        let r = rotate(o.cur.0, local);
        let v = [r[0] + o.cur.1[0], r[1] + o.cur.1[1], r[2] + o.cur.1[2]];
        let d = sub(v, p);
        let dist = norm(d);
        let cos = if dist < 1e-9 { dot(n, n) } else { dot(n, d) / dist };
        let wc = if kp % 9 < 5 { w::WC_TIP } else { w::WC_PALM };
        let gate = w::WC1 + if o.lifted { w::WC2 } else { 0.0 };
        sum += wc * (1.0 + w::GAMMA * cos) * (-w::LAMBDA_C * dist * dist).exp() * gate;
    }
    sum / s.objects.len() as f64
}

fn oracle_object(s: &Raw) -> f64 {
    if s.objects.is_empty() {
        return 0.0;
    }
    let total: f64 = s
        .objects
        .iter()
        .map(|o| {
            let dp = norm(sub(o.cur.1, o.reference.1));
            let dr = angle(o.cur.0, o.reference.0);
            let gate = w::WO1 + if o.lifted { w::WO2 } else { 0.0 };
            (w::WO_POS * (-w::LO_POS * dp).exp() + w::WO_ROT * (-w::LO_ROT * dr).exp()) * gate
        })
        .sum();
    total / s.objects.len() as f64
}

fn oracle_imitation(s: &Raw) -> f64 {
    s.hands
        .iter()
        .map(|h| {
            let dp = norm(sub(h.wrist.1, h.wrist_ref.1));
            let j: f64 = h.joints.iter().zip(&h.joints_ref).map(|(a, b)| (-w::LI_JNT * (a - b).abs()).exp()).sum();
            w::WI_POS * (-w::LI_POS * dp).exp() + w::WI_ROT * (-w::LI_ROT * dp).exp() + w::WI_JNT * j
        })
        .sum()
}

fn v3(a: V) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

fn pose(p: &(Q, V)) -> Pose {
    Pose { rotation: Quat::new(p.0[0], p.0[1], p.0[2], p.0[3]), translation: v3(p.1) }
}

fn to_state(s: &Raw) -> (FrameState<f64>, ContactPrior<f64>) {
    let set = |h: &RawHand| {
        HandKeypointSet::from_arrays(
            if h.left { HandSide::Left } else { HandSide::Right },
            h.pos.map(v3),
            h.nrm.map(v3),
        )
    };
    let state = FrameState {
        objects: s
            .objects
            .iter()
            .map(|o| ObjectState { id: o.id, current: pose(&o.cur), reference: pose(&o.reference), lifted: o.lifted })
            .collect(),
        hands: s
            .hands
            .iter()
            .map(|h| HandState {
                robot: set(h),
                human: set(h),
                wrist: pose(&h.wrist),
                wrist_ref: pose(&h.wrist_ref),
                joints: h.joints.clone(),
                joints_ref: h.joints_ref.clone(),
            })
            .collect(),
    };
    let prior = ContactPrior {
        timesteps: vec![ContactTimestep {
            t: 0,
            pairs: s
                .pairs
                .iter()
                .map(|&(kp, obj, local)| ContactPair { keypoint: kp, object: obj, vertex_index: 0, vertex_object_frame: Some(v3(local)) })
                .collect(),
        }],
        thresholds: ContactThresholds { fingertip: 0.03, palm: 0.05 },
    };
    (state, prior)
}

fn unit_q(rng: &mut SplitMix64) -> Q {
    let a = rng.unit_vector();
    let t = rng.uniform(-PI, PI);
    let (s, c) = (t / 2.0).sin_cos();
    [c, s * a.x, s * a.y, s * a.z]
}

fn near_q(rng: &mut SplitMix64, q: Q, scale: f64) -> Q {
    let d = Quat::exp(&rng.gaussian_vec3(scale));
    let r = Quat::new(q[0], q[1], q[2], q[3]) * d;
    let n = (r.w * r.w + r.x * r.x + r.y * r.y + r.z * r.z).sqrt();
    [r.w / n, r.x / n, r.y / n, r.z / n]
}

fn rv(rng: &mut SplitMix64, s: f64) -> V {
    [rng.uniform(-s, s), rng.uniform(-s, s), rng.uniform(-s, s)]
}

fn random_raw(rng: &mut SplitMix64) -> Raw {
    let n_obj = 1 + rng.below(3);
    let objects: Vec<RawObject> = (0..n_obj)
        .map(|k| {
            let cur = (unit_q(rng), rv(rng, 0.3));
            let reference = (near_q(rng, cur.0, 0.2), {
                let d = rv(rng, 0.03);
                [cur.1[0] + d[0], cur.1[1] + d[1], cur.1[2] + d[2]]
            });
            RawObject { id: 3 * k as u32 + 1, cur, reference, lifted: rng.next_f64() < 0.5 }
        })
        .collect();
    let hands = [true, false]
        .iter()
        .map(|&left| {
            let mut pos = [[0.0; 3]; 9];
            let mut nrm = [[0.0; 3]; 9];
            for k in 0..9 {
                let o = &objects[rng.below(n_obj)];
                let d = rv(rng, 0.08);
                pos[k] = [o.cur.1[0] + d[0], o.cur.1[1] + d[1], o.cur.1[2] + d[2]];
                let n = rng.unit_vector();
                nrm[k] = [n.x, n.y, n.z];
            }
            let wrist = (unit_q(rng), rv(rng, 0.5));
            let wrist_ref = (near_q(rng, wrist.0, 0.1), {
                let d = rv(rng, 0.2);
                [wrist.1[0] + d[0], wrist.1[1] + d[1], wrist.1[2] + d[2]]
            });
            let joints: Vec<f64> = (0..12).map(|_| rng.uniform(-1.0, 1.0)).collect();
            let joints_ref = joints.iter().map(|j| j + rng.uniform(-0.1, 0.1)).collect();
            RawHand { left, pos, nrm, wrist, wrist_ref, joints, joints_ref }
        })
        .collect();
    let n_pairs = rng.below(6);
    let pairs = (0..n_pairs)
        .map(|_| (rng.below(18), objects[rng.below(n_obj)].id, rv(rng, 0.05)))
        .collect();
    Raw { objects, hands, pairs }
}

fn single(kind: KeypointKind, offset: Vec3, normal: Vec3, lifted: bool) -> (FrameState<f64>, ContactPrior<f64>) {
    let kp = if kind == KeypointKind::Fingertip { 0 } else { 5 };
    let vertex = Vec3::new(0.01, 0.02, 0.03);
    let obj_pose = Pose::new(Quat::from_axis_angle(&Vec3::unit_z(), 0.3), Vec3::new(0.1, 0.0, 0.05));
    let mut pos = [Vec3::new(5.0, 5.0, 5.0); 9];
    let mut nrm = [Vec3::unit_z(); 9];
    pos[kp] = obj_pose.transform_point(&vertex) + offset;
    nrm[kp] = normal;
    let hand = HandKeypointSet::from_arrays(HandSide::Left, pos, nrm);
    let state = FrameState {
        objects: vec![ObjectState { id: 0, current: obj_pose, reference: obj_pose, lifted }],
        hands: vec![HandState {
            robot: hand.clone(),
            human: hand,
            wrist: Pose::identity(),
            wrist_ref: Pose::identity(),
            joints: vec![],
            joints_ref: vec![],
        }],
    };
    let prior = ContactPrior {
        timesteps: vec![ContactTimestep {
            t: 0,
            pairs: vec![ContactPair { keypoint: kp, object: 0, vertex_index: 0, vertex_object_frame: Some(vertex) }],
        }],
        thresholds: ContactThresholds { fingertip: 0.03, palm: 0.05 },
    };
    (state, prior)
}

#[test]
fn default_weights() {
    let d = RewardWeights::default();
    assert_eq!(
        [d.contact.gamma_c, d.contact.w_c_fingertip, d.contact.w_c_palm, d.contact.lambda_c, d.contact.w_c1, d.contact.w_c2],
        [w::GAMMA, w::WC_TIP, w::WC_PALM, w::LAMBDA_C, w::WC1, w::WC2]
    );
    assert_eq!(
        [d.object.w_pos, d.object.w_rot, d.object.lambda_pos, d.object.lambda_rot, d.object.w_o1, d.object.w_o2],
        [w::WO_POS, w::WO_ROT, w::LO_POS, w::LO_ROT, w::WO1, w::WO2]
    );
    let i = d.imitation;
    assert_eq!(
        [i.w_pos, i.w_rot, i.w_jnt, i.lambda_pos, i.lambda_rot, i.lambda_jnt],
        [w::WI_POS, w::WI_ROT, w::WI_JNT, w::LI_POS, w::LI_ROT, w::LI_JNT]
    );
    assert_eq!((d.tau_fingertip, d.tau_palm), (0.03, 0.05));
}

#[test]
fn contact_closed_forms() {
    let wts = RewardWeights::default();
    let (s, p) = single(KeypointKind::Fingertip, Vec3::zero(), Vec3::unit_x(), false);
    assert!((contact_reward(&s, &p, &wts, 0).unwrap() - 1.0).abs() < 1e-12);
    let (s, p) = single(KeypointKind::Palm, Vec3::zero(), Vec3::unit_x(), true);
    assert!((contact_reward(&s, &p, &wts, 0).unwrap() - 8.0).abs() < 1e-12);
    // 10 cm out along -n: d points back along n
    let n = Vec3::new(0.0, 0.6, 0.8);
    let (s, p) = single(KeypointKind::Fingertip, n * -0.1, n, false);
    let r = contact_reward(&s, &p, &wts, 0).unwrap();
    assert!((r - 0.5 * 2.0 * (-4.0f64).exp()).abs() < 1e-12);
    // no pairs at this step
    assert_eq!(contact_reward(&s, &p, &wts, 1).unwrap(), 0.0);
}

#[test]
fn object_closed_forms() {
    let wts = RewardWeights::default();
    let (mut s, _) = single(KeypointKind::Fingertip, Vec3::zero(), Vec3::unit_z(), false);
    assert!((object_reward(&s, &wts) - 0.6).abs() < 1e-12);
    s.objects[0].lifted = true;
    assert!((object_reward(&s, &wts) - 24.6).abs() < 1e-12);
    s.objects[0].lifted = false;
    s.objects[0].current.translation += Vec3::new(0.01, 0.0, 0.0);
    let expect = (5.0 * (-0.8f64).exp() + 1.0) * 0.1;
    assert!((object_reward(&s, &wts) - expect).abs() < 1e-12);
    assert!((expect - 0.3247).abs() < 1e-4);
}

#[test]
fn imitation_closed_forms() {
    let mut wts = RewardWeights::default();
    let (mut s, _) = single(KeypointKind::Fingertip, Vec3::zero(), Vec3::unit_z(), false);
    let j = 12;
    s.hands[0].joints = vec![0.2; j];
    s.hands[0].joints_ref = vec![0.2; j];
    assert!((imitation_reward(&s, &wts).unwrap() - (1.0 + 0.5 * j as f64)).abs() < 1e-12);
    s.hands[0].wrist.translation = Vec3::new(0.5, 0.0, 0.0);
    // the position error feeds both wrist terms
    let as_printed = 0.5 * (-1.0f64).exp() + 0.5 * (-10.0f64).exp() + 0.5 * j as f64;
    assert!((imitation_reward(&s, &wts).unwrap() - as_printed).abs() < 1e-12);
    wts.imitation.rot_term_uses_rotation = true;
    let with_rotation = 0.5 * (-1.0f64).exp() + 0.5 + 0.5 * j as f64;
    assert!((imitation_reward(&s, &wts).unwrap() - with_rotation).abs() < 1e-12);
    s.hands[0].wrist.translation = Vec3::new(1e6, 0.0, 0.0);
    s.hands[0].wrist.rotation = Quat::from_axis_angle(&Vec3::unit_x(), PI);
    s.hands[0].joints = vec![1e6; j];
    assert!(imitation_reward(&s, &wts).unwrap() < 1e-12);
    s.hands[0].joints.pop();
    assert!(matches!(imitation_reward(&s, &wts), Err(RewardError::JointCountMismatch { .. })));
}

#[test]
fn total_is_the_sum() {
    let wts = RewardWeights::default();
    assert_eq!(total_reward(&FrameState::default(), &ContactPrior { timesteps: vec![], thresholds: ContactThresholds { fingertip: 0.03, palm: 0.05 } }, &wts, 0).unwrap(), 0.0);
    let (s, p) = single(KeypointKind::Fingertip, Vec3::zero(), Vec3::unit_x(), false);
    let b: manip_core::rewards::RewardBreakdown<f64> = evaluate_rewards(&s, &p, &wts, 0).unwrap();
    assert!((b.contact - 1.0).abs() < 1e-12 && (b.object - 0.6).abs() < 1e-12 && (b.imitation - 1.0).abs() < 1e-12);
    assert!((b.total - 2.6).abs() < 1e-12);
    assert_eq!(b.total, b.contact + b.object + b.imitation);
}

#[test]
fn unknown_object_is_an_error() {
    let wts = RewardWeights::default();
    let (mut s, p) = single(KeypointKind::Fingertip, Vec3::zero(), Vec3::unit_x(), false);
    s.objects[0].id = 9;
    assert!(matches!(contact_reward(&s, &p, &wts, 0), Err(RewardError::UnknownObject(0))));
}

#[test]
fn random_states_match_oracle() {
    let wts = RewardWeights::default();
    let mut rng = SplitMix64::new(2024);
    for _ in 0..5000 {
        let raw = random_raw(&mut rng);
        let (state, prior) = to_state(&raw);
        let b = evaluate_rewards(&state, &prior, &wts, 0).unwrap();
        let (c, o, i) = (oracle_contact(&raw), oracle_object(&raw), oracle_imitation(&raw));
        assert!((b.contact - c).abs() <= 1e-12 * c.abs().max(1.0));
        assert!((b.object - o).abs() <= 1e-12 * o.abs().max(1.0));
        assert!((b.imitation - i).abs() <= 1e-12 * i.abs().max(1.0));
        assert!((b.total - (c + o + i)).abs() <= 1e-12 * (c + o + i).abs().max(1.0));
        assert!(b.contact >= 0.0 && b.object >= 0.0 && b.imitation >= 0.0);
    }
}

#[test]
fn contact_is_object_centric() {
    let wts = RewardWeights::default();
    let mut rng = SplitMix64::new(99);
    for _ in 0..200 {
        let raw = random_raw(&mut rng);
        let (mut state, prior) = to_state(&raw);
        let before = contact_reward(&state, &prior, &wts, 0).unwrap();
        let g = Pose::new(Quat::from_axis_angle(&rng.unit_vector(), rng.uniform(-PI, PI)), rng.gaussian_vec3(1.0));
        for o in &mut state.objects {
            o.current = g.compose(&o.current);
        }
        for h in &mut state.hands {
            h.robot = h.robot.transformed(&g);
        }
        let after = contact_reward(&state, &prior, &wts, 0).unwrap();
        assert!((after - before).abs() <= 1e-9 * before.abs().max(1e-300));
    }
}

#[test]
fn contact_decreases_with_distance() {
    let wts = RewardWeights::default();
    let u = Vec3::new(1.0, -2.0, 0.5).normalize();
    let n = Vec3::new(0.3, 0.9, -0.1).normalize();
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let (s, p) = single(KeypointKind::Palm, u * (-0.002 * k as f64), n, false);
        let r = contact_reward(&s, &p, &wts, 0).unwrap();
        assert!(r < last);
        last = r;
    }
}

fn lone_fingertip(at: Vec3) -> Vec<Vec<HandKeypointSet<f64>>> {
    let mut pos = [Vec3::new(5.0, 5.0, 5.0); 9];
    pos[0] = at;
    vec![vec![HandKeypointSet::from_arrays(HandSide::Left, pos, [Vec3::unit_z(); 9])]]
}

#[test]
fn prior_thresholds() {
    let mesh = TriMesh::cube(0.08, 4);
    let traj = BTreeMap::from([(0u32, PoseTrajectory::new(vec![Pose::identity()]).unwrap())]);
    let meshes = BTreeMap::from([(0u32, mesh.clone())]);
    let wts = RewardWeights::default();
    let far = extract_contact_prior(&lone_fingertip(Vec3::new(0.2, 0.0, 0.0)), &traj, &meshes, &wts).unwrap();
    assert_eq!(far.pair_count(), 0);
    let v = 17;
    let on = extract_contact_prior(&lone_fingertip(mesh.vertices()[v]), &traj, &meshes, &wts).unwrap();
    assert_eq!(on.pairs_at(0).len(), 1);
    assert_eq!(on.pairs_at(0)[0].vertex_index, v);
    assert_eq!(on.pairs_at(0)[0].vertex_object_frame, Some(mesh.vertices()[v]));
}

/// Exhaustive nearest-vertex scan over every frame and keypoint.
fn brute_force_prior(
    hands: &[Vec<HandKeypointSet<f64>>],
    traj: &PoseTrajectory,
    mesh: &TriMesh,
) -> BTreeSet<(usize, usize, usize)> {
    let mut out = BTreeSet::new();
    for (t, frame) in hands.iter().enumerate() {
        let world: Vec<Vec3> = mesh.vertices().iter().map(|v| traj.frames()[t].transform_point(v)).collect();
        for kp in frame.iter().flat_map(|h| &h.keypoints) {
            let tau = if kp.kind == KeypointKind::Fingertip { 0.03 } else { 0.05 };
            let mut best = (f64::INFINITY, 0);
            for (i, v) in world.iter().enumerate() {
                let d = v.distance(&kp.position);
                if d < best.0 {
                    best = (d, i);
                }
            }
            if best.0 <= tau {
                out.insert((t, kp.id, best.1));
            }
        }
    }
    out
}

#[test]
fn grasp_prior_matches_script_and_brute_force() {
    for (seed, kind) in [(1, MeshKind::Cube), (2, MeshKind::Cylinder)] {
        let b = generate(&ScenarioSpec::new(seed, kind, MotionKind::Grasp, 60)).unwrap();
        let hands = b.human_keypoints();
        let prior = extract_contact_prior(
            &hands,
            &BTreeMap::from([(0u32, b.gt.clone())]),
            &BTreeMap::from([(0u32, b.mesh.clone())]),
            &RewardWeights::default(),
        )
        .unwrap();
        let got: BTreeSet<(usize, usize, usize)> = prior
            .timesteps
            .iter()
            .flat_map(|s| s.pairs.iter().map(move |p| (s.t, p.keypoint, p.vertex_index)))
            .collect();
        assert_eq!(got, brute_force_prior(&hands, &b.gt, &b.mesh));
        let scripted: BTreeSet<(usize, usize, usize)> = (0..60)
            .flat_map(|t| b.contacts.iter().filter(move |c| t >= c.from_frame).map(move |c| (t, c.keypoint, c.vertex_index)))
            .collect();
        assert_eq!(got, scripted);
        assert_eq!(b.contacts.len(), 3);
        assert_eq!(b.contacts[0].from_frame, 30);
    }
}

#[test]
fn prior_ignores_vertex_order() {
    let b = generate(&ScenarioSpec::new(4, MeshKind::Cube, MotionKind::Grasp, 40)).unwrap();
    let hands = b.human_keypoints();
    let n = b.mesh.vertex_count();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut rng = SplitMix64::new(5);
    for i in (1..n).rev() {
        perm.swap(i, rng.below(i + 1));
    }
    let shuffled = b.mesh.permuted(&perm).unwrap();
    let triples = |mesh: &TriMesh| {
        let p = extract_contact_prior(
            &hands,
            &BTreeMap::from([(0u32, b.gt.clone())]),
            &BTreeMap::from([(0u32, mesh.clone())]),
            &RewardWeights::default(),
        )
        .unwrap();
        p.timesteps
            .iter()
            .flat_map(|s| {
                s.pairs.iter().map(move |q| {
                    let v = q.vertex_object_frame.unwrap();
                    (s.t, q.keypoint, q.object, v.x.to_bits(), v.y.to_bits(), v.z.to_bits())
                })
            })
            .collect::<BTreeSet<_>>()
    };
    let a = triples(&b.mesh);
    assert!(!a.is_empty());
    assert_eq!(a, triples(&shuffled));
}

#[test]
fn contact_rises_as_fingertips_approach() {
    let b = generate(&ScenarioSpec::new(3, MeshKind::Cube, MotionKind::Grasp, 60)).unwrap();
    let prior = extract_contact_prior(
        &b.human_keypoints(),
        &BTreeMap::from([(0u32, b.gt.clone())]),
        &BTreeMap::from([(0u32, b.mesh.clone())]),
        &RewardWeights::default(),
    )
    .unwrap();
    let contact = b.contacts[0].from_frame;
    let states = b.frame_states();
    let wts = RewardWeights::default();
    let mut last = -1.0;
    // the grasp-frame contact targets scored against the approach
    for s in &states[..=contact] {
        let r = contact_reward(s, &prior, &wts, contact).unwrap();
        assert!(r > last);
        last = r;
    }
}

#[test]
fn prior_json_roundtrip_and_resolution() {
    let text = r#"{"timesteps":[{"t":2,"pairs":[{"keypoint":5,"object":0,"vertex_index":3}]},{"t":0,"pairs":[]}],"thresholds":{"fingertip":0.03,"palm":0.05}}"#;
    let mut p: ContactPrior<f64> = serde_json::from_str(text).unwrap();
    let mesh = TriMesh::cube(0.08, 1);
    assert!(matches!(p.resolve_vertices(&BTreeMap::new()), Err(RewardError::MissingMesh(0))));
    p.resolve_vertices(&BTreeMap::from([(0u32, mesh.clone())])).unwrap();
    assert_eq!(p.timesteps[0].t, 0);
    assert_eq!(p.pairs_at(2)[0].vertex_object_frame, Some(mesh.vertices()[3]));
    let back: ContactPrior<f64> = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
    assert_eq!(back, p);
    p.timesteps[1].pairs[0].vertex_index = 10_000;
    p.timesteps[1].pairs[0].vertex_object_frame = None;
    assert!(matches!(
        p.resolve_vertices(&BTreeMap::from([(0u32, mesh)])),
        Err(RewardError::VertexOutOfRange { .. })
    ));
}
