//! Least-squares rigid registration of corresponded point sets.

use super::{GeomError, Pose};
use crate::linalg::{svd3, Mat3, Quat, Vec3};
use crate::scalar::Real;

fn rank_tolerance<T: Real>() -> T {
    T::epsilon().sqrt() * T::lit(0.1)
}

/// Proper rigid transform `T` minimizing `sum |T src_i - dst_i|^2`.
///
/// Centroid subtraction, SVD of the 3x3 cross-covariance, and the
/// determinant-sign correction on the smallest singular direction so the
/// rotation never contains a reflection.
pub fn kabsch<T: Real>(src: &[Vec3<T>], dst: &[Vec3<T>]) -> Result<Pose<T>, GeomError> {
    if src.len() != dst.len() {
        return Err(GeomError::LengthMismatch {
            left: src.len(),
            right: dst.len(),
        });
    }
    if src.len() < 3 {
        return Err(GeomError::DegenerateGeometry { valid_pairs: src.len() });
    }
    let cs = Vec3::centroid(src);
    let cd = Vec3::centroid(dst);
    let mut h = Mat3::zero();
    for (p, q) in src.iter().zip(dst) {
        h = h + Mat3::outer(&(*p - cs), &(*q - cd));
    }
    let svd = svd3(&h);
    if !(svd.sigma[0] > T::zero()) || svd.sigma[1] <= rank_tolerance::<T>() * svd.sigma[0] {
        return Err(GeomError::DegenerateGeometry { valid_pairs: src.len() });
    }
    // H = U S V^T  =>  R = V diag(1, 1, d) U^T
    let d = (svd.v * svd.u.transpose()).det().signum();
    let r = svd.v * Mat3::diag(T::one(), T::one(), d) * svd.u.transpose();
    let rotation = Quat::from_matrix(&r);
    let translation = cd - rotation.rotate(&cs);
    Ok(Pose::new(rotation, translation))
}

/// Kabsch over the pairs where both `valid` flags are set.
pub fn kabsch_masked<T: Real>(
    src: &[Vec3<T>],
    dst: &[Vec3<T>],
    src_valid: &[bool],
    dst_valid: &[bool],
) -> Result<Pose<T>, GeomError> {
    let n = src.len();
    if dst.len() != n || src_valid.len() != n || dst_valid.len() != n {
        return Err(GeomError::LengthMismatch {
            left: n,
            right: dst.len(),
        });
    }
    let (a, b): (Vec<Vec3<T>>, Vec<Vec3<T>>) = (0..n)
        .filter(|&i| src_valid[i] && dst_valid[i])
        .map(|i| (src[i], dst[i]))
        .unzip();
    if a.len() < 3 {
        return Err(GeomError::DegenerateGeometry { valid_pairs: a.len() });
    }
    kabsch(&a, &b)
}

/// Root-mean-square of `|pose src_i - dst_i|`.
pub fn registration_rms<T: Real>(pose: &Pose<T>, src: &[Vec3<T>], dst: &[Vec3<T>]) -> T {
    let n = T::from_usize_lossy(src.len().max(1));
    let sum: T = src
        .iter()
        .zip(dst)
        .map(|(p, q)| (pose.transform_point(p) - *q).norm_squared())
        .sum();
    (sum / n).sqrt()
}
