use std::f64::consts::TAU;

use manip_core::metrics::{
    adds_auc, adds_auc_from_distances, adds_distance, aggregate_rollouts, episode_success, evaluate, failure_rate,
    mask_iou_proxy, render_silhouette, temporal_stability, vsd_auc, vsd_score, BinaryMask, EvaluationInputs,
    MetricConfig, MetricsError,
};
use manip_core::synth::SplitMix64;
use manip_core::{CameraModel, DepthFrame, Pose, PoseTrajectory, Quat, TriMesh, Vec3};

fn brute_adds(mesh: &TriMesh, pred: &Pose, gt: &Pose) -> f64 {
    let p: Vec<Vec3> = mesh.vertices().iter().map(|v| pred.transform_point(v)).collect();
    let g: Vec<Vec3> = mesh.vertices().iter().map(|v| gt.transform_point(v)).collect();
    let mut sum = 0.0;
    for a in &p {
        let mut best = f64::INFINITY;
        for b in &g {
            best = best.min(a.distance(b));
        }
        sum += best;
    }
    sum / p.len() as f64
}

fn traj(frames: Vec<Pose>) -> PoseTrajectory {
    PoseTrajectory::new(frames).unwrap()
}

#[test]
fn adds_examples() {
    let mut rng = SplitMix64::new(1);
    let sphere = TriMesh::sphere(0.05, 12, 20);
    let p = Pose::new(Quat::from_axis_angle(&rng.unit_vector(), 1.0), rng.gaussian_vec3(0.2));
    assert_eq!(adds_distance(&sphere, &p, &p), 0.0);
    let d = 0.013;
    let gt = Pose::from_translation(Vec3::new(d, 0.0, 0.0));
    let v = adds_distance(&sphere, &Pose::identity(), &gt);
    assert!(v <= d + 1e-15);
    assert!((v - brute_adds(&sphere, &Pose::identity(), &gt)).abs() < 1e-12);
    let cyl = TriMesh::cylinder(0.03, 0.1, 48, 6);
    let spun = Pose::from_rotation(Quat::from_axis_angle(&Vec3::unit_z(), TAU / 48.0 * 5.0));
    assert!(adds_distance(&cyl, &spun, &Pose::identity()) < 1e-12);
    assert!(adds_distance(&cyl, &Pose::from_rotation(Quat::from_axis_angle(&Vec3::unit_z(), 0.05)), &Pose::identity()) < 2e-3);
}

#[test]
fn adds_matches_exhaustive_scan() {
    let mut rng = SplitMix64::new(2);
    let meshes = [TriMesh::cube(0.08, 6), TriMesh::tetrahedron(0.06, 8), TriMesh::cylinder(0.03, 0.1, 24, 4)];
    for mesh in &meshes {
        for _ in 0..10 {
            let a = Pose::new(Quat::from_axis_angle(&rng.unit_vector(), rng.uniform(-3.0, 3.0)), rng.gaussian_vec3(0.05));
            let b = Pose::new(Quat::from_axis_angle(&rng.unit_vector(), rng.uniform(-3.0, 3.0)), rng.gaussian_vec3(0.05));
            assert!((adds_distance(mesh, &a, &b) - brute_adds(mesh, &a, &b)).abs() < 1e-12);
        }
    }
}

#[test]
fn adds_auc_examples() {
    // vertices far apart, so a small offset keeps each vertex's own match
    let mesh = TriMesh::tetrahedron(0.5, 1);
    let gt = traj((0..10).map(|i| Pose::from_translation(Vec3::new(0.0, 0.01 * i as f64, 0.0))).collect());
    assert_eq!(adds_auc(&mesh, &gt, &gt).unwrap(), 1.0);
    let shift = |d: f64| traj(gt.frames().iter().map(|p| Pose::from_translation(Vec3::new(d, 0.0, 0.0)).compose(p)).collect());
    assert!((adds_auc(&mesh, &shift(0.05), &gt).unwrap() - 0.5).abs() < 0.01);
    assert_eq!(adds_auc(&mesh, &shift(0.2), &gt).unwrap(), 0.0);
    assert!(matches!(
        adds_auc(&mesh, &traj(vec![Pose::identity(); 3]), &gt),
        Err(MetricsError::LengthMismatch { .. })
    ));
    assert_eq!(adds_auc_from_distances(&[0.05; 7], 0.1, 100), 0.5);
    // improving every frame never lowers the AUC
    let mut rng = SplitMix64::new(4);
    let d: Vec<f64> = (0..30).map(|_| rng.uniform(0.0, 0.12)).collect();
    let before = adds_auc_from_distances(&d, 0.1, 100);
    let better: Vec<f64> = d.iter().map(|x| x * rng.uniform(0.5, 1.0)).collect();
    assert!(adds_auc_from_distances(&better, 0.1, 100) >= before);
}

fn wall_camera() -> CameraModel {
    CameraModel::new(100.0, 100.0, 32.0, 24.0, 64, 48).unwrap()
}

/// Square facing the camera at 1 m, covering columns 12..=51 and rows 4..=43.
fn wall() -> (TriMesh, Pose) {
    (TriMesh::plane_grid(0.398, 80), Pose::from_translation(Vec3::new(0.0, 0.0, 1.0)))
}

#[test]
fn vsd_examples() {
    let cam = wall_camera();
    let (mesh, pose) = wall();
    let n = cam.pixel_count();
    let flat = DepthFrame::new(64, 48, vec![1.0; n], vec![true; n]).unwrap();
    assert_eq!(vsd_score(&mesh, &pose, &flat, &cam, 0.02).unwrap(), 1.0);
    let back = Pose::from_translation(Vec3::new(0.0, 0.0, 1.05));
    assert_eq!(vsd_score(&mesh, &back, &flat, &cam, 0.02).unwrap(), 0.0);
    // left half occluded, lower half of the rest disagrees
    let mut depth = vec![1.0; n];
    let mut mask = vec![true; n];
    for row in 0..48 {
        for col in 0..64 {
            mask[row * 64 + col] = col >= 32;
            if row >= 24 {
                depth[row * 64 + col] = 1.5;
            }
        }
    }
    let frame = DepthFrame::new(64, 48, depth, mask).unwrap();
    // visible: cols 32..=51 x rows 4..=43 = 800; agreeing: rows 4..=23 = 400
    assert_eq!(vsd_score(&mesh, &pose, &frame, &cam, 0.02).unwrap(), 400.0 / 800.0);
    let empty = DepthFrame::new(64, 48, vec![0.0; n], vec![true; n]).unwrap();
    assert!(matches!(vsd_score(&mesh, &pose, &empty, &cam, 0.02), Err(MetricsError::EmptyVisibleSet)));
    let small = DepthFrame::new(2, 2, vec![1.0; 4], vec![true; 4]).unwrap();
    assert!(matches!(vsd_score(&mesh, &pose, &small, &cam, 0.02), Err(MetricsError::DimensionMismatch)));
}

#[test]
fn vsd_auc_examples() {
    assert_eq!(vsd_auc(&[1.0; 5]), 1.0);
    assert_eq!(vsd_auc(&[0.3; 5]), 0.5);
    assert_eq!(vsd_auc(&[0.05; 5]), 0.0);
}

fn rect(c0: usize, c1: usize, r0: usize, r1: usize) -> BinaryMask {
    let mut m = BinaryMask::empty(64, 48);
    for r in r0..r1 {
        for c in c0..c1 {
            m.set(c, r);
        }
    }
    m
}

#[test]
fn iou_examples() {
    let a = rect(0, 20, 10, 20);
    let b = rect(10, 30, 10, 20);
    assert!((a.iou(&b).unwrap() - 1.0 / 3.0).abs() < 1e-15);
    assert_eq!(a.iou(&rect(40, 50, 0, 5)).unwrap(), 0.0);
    let cam = wall_camera();
    let (mesh, pose) = wall();
    let t = traj(vec![pose; 4]);
    let sil = render_silhouette(&mesh, &pose, &cam);
    // cross dilation leaves the four corners unset
    assert_eq!(sil.count(), 42 * 42 - 4);
    assert_eq!(mask_iou_proxy(&mesh, &t, &vec![Some(sil.clone()); 4], &cam).unwrap(), 1.0);
    assert_eq!(mask_iou_proxy(&mesh, &t, &vec![Some(rect(0, 5, 0, 2)); 4], &cam).unwrap(), 0.0);
    assert!(matches!(mask_iou_proxy(&mesh, &t, &[None, None, None, None], &cam), Err(MetricsError::NoMasks)));
}

#[test]
fn failure_rate_examples() {
    let cam = wall_camera();
    let (mesh, pose) = wall();
    let t = traj(vec![pose; 6]);
    let sil = render_silhouette(&mesh, &pose, &cam);
    let perfect = vec![Some(sil.clone()); 6];
    assert_eq!(failure_rate(&mesh, &t, &perfect, &cam, &[false; 6]).unwrap(), 1.0);
    assert_eq!(failure_rate(&mesh, &t, &perfect, &cam, &[true; 6]).unwrap(), 0.0);
    // keep 5% of the silhouette pixels
    let inside: Vec<usize> = (0..sil.data.len()).filter(|&i| sil.data[i]).collect();
    let mut weak = BinaryMask::empty(64, 48);
    let keep = inside.len() / 20;
    for &i in &inside[..keep] {
        weak.data[i] = true;
    }
    let iou = weak.iou(&sil).unwrap();
    assert_eq!(iou, keep as f64 / inside.len() as f64);
    assert!(iou <= 0.05);
    let masks: Vec<Option<BinaryMask>> = (0..6).map(|i| Some(if i % 2 == 0 { weak.clone() } else { sil.clone() })).collect();
    assert_eq!(failure_rate(&mesh, &t, &masks, &cam, &[true; 6]).unwrap(), 0.5);
    let mut reversed = masks.clone();
    reversed.reverse();
    assert_eq!(failure_rate(&mesh, &t, &reversed, &cam, &[true; 6]).unwrap(), 0.5);
    let mut missing = perfect.clone();
    missing[0] = None;
    assert!((failure_rate(&mesh, &t, &missing, &cam, &[true; 6]).unwrap() - 1.0 / 6.0).abs() < 1e-15);
}

#[test]
fn stability_examples() {
    let gt = traj(vec![Pose::identity(); 6]);
    let step = |d: Pose| {
        let mut f = vec![Pose::identity()];
        for _ in 0..5 {
            f.push(d.compose(f.last().unwrap()));
        }
        traj(f)
    };
    let expect = 0.5 * (-1.0f64).exp() + 0.5;
    let (m, s) = temporal_stability(&step(Pose::from_translation(Vec3::new(0.01, 0.0, 0.0))), &gt).unwrap();
    assert!((m - expect).abs() < 1e-12 && s < 1e-12);
    assert!((m - 0.6839).abs() < 1e-4);
    let (m, _) = temporal_stability(&step(Pose::from_rotation(Quat::from_axis_angle(&Vec3::unit_y(), 0.1))), &gt).unwrap();
    assert!((m - expect).abs() < 1e-12);
    let mut rng = SplitMix64::new(7);
    let moving = traj(
        (0..20)
            .map(|i| Pose::new(Quat::from_axis_angle(&Vec3::unit_x(), 0.1 * i as f64), Vec3::new(0.0, 0.01 * i as f64, 0.0)))
            .collect(),
    );
    let offset = Pose::new(Quat::from_axis_angle(&rng.unit_vector(), 1.2), rng.gaussian_vec3(0.3));
    let (m, s) = temporal_stability(&moving.transformed(&offset), &moving).unwrap();
    assert!((m - 1.0).abs() < 1e-9 && s < 1e-9);
    assert!(matches!(
        temporal_stability(&traj(vec![Pose::identity()]), &traj(vec![Pose::identity()])),
        Err(MetricsError::TooShort(1))
    ));
}

#[test]
fn success_examples() {
    let gt = traj((0..8).map(|i| Pose::from_translation(Vec3::new(0.0, 0.0, 0.01 * i as f64))).collect());
    let same = episode_success(&gt, &gt).unwrap();
    assert!(same.success && same.e_r == 0.0 && same.e_t == 0.0);
    let err = Pose::new(Quat::from_axis_angle(&Vec3::unit_z(), 0.2), Vec3::new(0.02, 0.0, 0.0));
    let off = traj(gt.frames().iter().map(|p| Pose::new(err.rotation * p.rotation, p.translation + err.translation)).collect());
    let o = episode_success(&off, &gt).unwrap();
    assert!(o.success && (o.e_r - 0.2).abs() < 1e-12 && (o.e_t - 0.02).abs() < 1e-12);
    let mut frames = gt.frames().to_vec();
    frames[3].rotation = Quat::from_axis_angle(&Vec3::unit_x(), 0.6);
    let bad = episode_success(&traj(frames), &gt).unwrap();
    assert!(!bad.success);
    let summary = aggregate_rollouts(&[same, o, bad]);
    assert_eq!((summary.rollouts, summary.successes), (3, 2));
    assert!((summary.e_r.unwrap() - 0.1).abs() < 1e-12);
    assert_eq!(aggregate_rollouts(&[bad]).e_r, None);
}

#[test]
fn evaluate_skips_invalid_frames_for_adds() {
    let mesh = TriMesh::tetrahedron(0.5, 1);
    let gt = traj(vec![Pose::identity(); 4]);
    let mut frames = vec![Pose::identity(); 4];
    frames[2] = Pose::from_translation(Vec3::new(0.3, 0.0, 0.0));
    let pred = traj(frames);
    let cfg = MetricConfig::default();
    let mut inputs = EvaluationInputs {
        mesh: &mesh,
        pred: &pred,
        gt: Some(&gt),
        camera: None,
        depth: None,
        masks: None,
        validity: None,
    };
    let all = evaluate(&inputs, &cfg).unwrap();
    assert_eq!(all.adds_auc, Some(0.75));
    assert_eq!(all.vsd_auc, None);
    let validity = [true, true, false, true];
    inputs.validity = Some(&validity);
    let r = evaluate(&inputs, &cfg).unwrap();
    assert_eq!(r.adds_auc, Some(1.0));
    assert_eq!(r.success, Some(false));
}
