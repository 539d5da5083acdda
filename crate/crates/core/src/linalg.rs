//! Fixed-size 3D vectors, 3x3 matrices, quaternions and the Jacobi
//! factorizations built on them.

use std::ops::{Add, AddAssign, Div, Index, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::scalar::{clamp, Real};

const JACOBI_MAX_SWEEPS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[T; 3]", into = "[T; 3]")]
pub struct Vec3<T: Real> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> From<[T; 3]> for Vec3<T> {
    fn from(a: [T; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

impl<T: Real> From<Vec3<T>> for [T; 3] {
    fn from(v: Vec3<T>) -> Self {
        [v.x, v.y, v.z]
    }
}

impl<T: Real> Vec3<T> {
    #[inline]
    pub const fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    #[inline]
    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn unit_x() -> Self {
        Self::new(T::one(), T::zero(), T::zero())
    }

    pub fn unit_y() -> Self {
        Self::new(T::zero(), T::one(), T::zero())
    }

    pub fn unit_z() -> Self {
        Self::new(T::zero(), T::zero(), T::one())
    }

    #[inline]
    pub fn dot(&self, o: &Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(&self, o: &Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    #[inline]
    pub fn norm_squared(&self) -> T {
        self.dot(self)
    }

    #[inline]
    pub fn norm(&self) -> T {
        self.norm_squared().sqrt()
    }

    /// Unit vector in the same direction, or `None` for a (near) zero vector.
    pub fn try_normalize(&self, min_norm: T) -> Option<Self> {
        let n = self.norm();
        if n <= min_norm || !n.is_finite() {
            None
        } else {
            Some(*self / n)
        }
    }

    pub fn normalize(&self) -> Self {
        *self / self.norm()
    }

    #[inline]
    pub fn distance(&self, o: &Self) -> T {
        (*self - *o).norm()
    }

    pub fn scale(&self, s: T) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn component_min(&self, o: &Self) -> Self {
        Self::new(self.x.min(o.x), self.y.min(o.y), self.z.min(o.z))
    }

    pub fn component_max(&self, o: &Self) -> Self {
        Self::new(self.x.max(o.x), self.y.max(o.y), self.z.max(o.z))
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn cast<U: Real>(&self) -> Vec3<U> {
        Vec3::new(
            U::lit(self.x.to_f64_lossy()),
            U::lit(self.y.to_f64_lossy()),
            U::lit(self.z.to_f64_lossy()),
        )
    }

    /// Some unit vector orthogonal to `self` (which must be non-zero).
    pub fn any_orthogonal(&self) -> Self {
        let a = if self.x.abs() <= self.y.abs() && self.x.abs() <= self.z.abs() {
            Self::unit_x()
        } else if self.y.abs() <= self.z.abs() {
            Self::unit_y()
        } else {
            Self::unit_z()
        };
        self.cross(&a).normalize()
    }

    pub fn centroid(points: &[Self]) -> Self {
        let n = T::from_usize_lossy(points.len());
        points.iter().fold(Self::zero(), |acc, p| acc + *p) / n
    }
}

impl<T: Real> Index<usize> for Vec3<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("Vec3 index {i} out of range"),
        }
    }
}

impl<T: Real> Add for Vec3<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Real> AddAssign for Vec3<T> {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> Sub for Vec3<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Real> SubAssign for Vec3<T> {
    #[inline]
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<T: Real> Neg for Vec3<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

impl<T: Real> Mul<T> for Vec3<T> {
    type Output = Self;
    #[inline]
    fn mul(self, s: T) -> Self {
        self.scale(s)
    }
}

impl<T: Real> Div<T> for Vec3<T> {
    type Output = Self;
    #[inline]
    fn div(self, s: T) -> Self {
        Self::new(self.x / s, self.y / s, self.z / s)
    }
}

/// Row-major 3x3 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mat3<T: Real> {
    pub m: [[T; 3]; 3],
}

impl<T: Real> Mat3<T> {
    pub fn zero() -> Self {
        Self { m: [[T::zero(); 3]; 3] }
    }

    pub fn identity() -> Self {
        Self::diag(T::one(), T::one(), T::one())
    }

    pub fn diag(a: T, b: T, c: T) -> Self {
        let mut r = Self::zero();
        r.m[0][0] = a;
        r.m[1][1] = b;
        r.m[2][2] = c;
        r
    }

    pub fn from_cols(c0: Vec3<T>, c1: Vec3<T>, c2: Vec3<T>) -> Self {
        Self {
            m: [[c0.x, c1.x, c2.x], [c0.y, c1.y, c2.y], [c0.z, c1.z, c2.z]],
        }
    }

    /// `a * b^T`.
    pub fn outer(a: &Vec3<T>, b: &Vec3<T>) -> Self {
        let mut r = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                r.m[i][j] = a[i] * b[j];
            }
        }
        r
    }

    pub fn col(&self, j: usize) -> Vec3<T> {
        Vec3::new(self.m[0][j], self.m[1][j], self.m[2][j])
    }

    fn set_col(&mut self, j: usize, v: Vec3<T>) {
        self.m[0][j] = v.x;
        self.m[1][j] = v.y;
        self.m[2][j] = v.z;
    }

    pub fn transpose(&self) -> Self {
        let mut r = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                r.m[i][j] = self.m[j][i];
            }
        }
        r
    }

    pub fn det(&self) -> T {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn mul_vec(&self, v: &Vec3<T>) -> Vec3<T> {
        let m = &self.m;
        Vec3::new(
            m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
        )
    }

    pub fn trace(&self) -> T {
        self.m[0][0] + self.m[1][1] + self.m[2][2]
    }

    pub fn frobenius_norm(&self) -> T {
        self.m.iter().flatten().map(|v| *v * *v).sum::<T>().sqrt()
    }
}

impl<T: Real> Mul for Mat3<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut r = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                r.m[i][j] = self.m[i][0] * o.m[0][j] + self.m[i][1] * o.m[1][j] + self.m[i][2] * o.m[2][j];
            }
        }
        r
    }
}

impl<T: Real> Add for Mat3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        let mut r = self;
        for i in 0..3 {
            for j in 0..3 {
                r.m[i][j] += o.m[i][j];
            }
        }
        r
    }
}

/// Unit quaternion in Hamilton convention, stored `(w, x, y, z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[T; 4]", into = "[T; 4]")]
pub struct Quat<T: Real> {
    pub w: T,
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> From<[T; 4]> for Quat<T> {
    fn from(a: [T; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }
}

impl<T: Real> From<Quat<T>> for [T; 4] {
    fn from(q: Quat<T>) -> Self {
        [q.w, q.x, q.y, q.z]
    }
}

impl<T: Real> Default for Quat<T> {
    fn default() -> Self {
        Self::identity()
    }
}

impl<T: Real> Quat<T> {
    pub const fn new(w: T, x: T, y: T, z: T) -> Self {
        Self { w, x, y, z }
    }

    pub fn identity() -> Self {
        Self::new(T::one(), T::zero(), T::zero(), T::zero())
    }

    pub fn vector(&self) -> Vec3<T> {
        Vec3::new(self.x, self.y, self.z)
    }

    pub fn from_scalar_vector(w: T, v: Vec3<T>) -> Self {
        Self::new(w, v.x, v.y, v.z)
    }

    /// Rotation of `angle` radians about `axis` (normalized internally).
    pub fn from_axis_angle(axis: &Vec3<T>, angle: T) -> Self {
        let a = axis.normalize();
        let h = angle * T::half();
        Self::from_scalar_vector(h.cos(), a * h.sin())
    }

    /// Exponential map of a rotation vector: `(cos(|w|/2), sin(|w|/2) w/|w|)`,
    /// identity below `1e-12`.
    pub fn exp(omega: &Vec3<T>) -> Self {
        let theta = omega.norm();
        if theta < T::lit(1e-12) {
            return Self::identity();
        }
        let h = theta * T::half();
        Self::from_scalar_vector(h.cos(), *omega * (h.sin() / theta))
    }

    /// Rotation vector (axis * angle) with angle in `[0, pi]`.
    pub fn log(&self) -> Vec3<T> {
        let q = if self.w < T::zero() { -*self } else { *self };
        let v = q.vector();
        let s = v.norm();
        if s < T::lit(1e-15) {
            return v * T::two();
        }
        let angle = T::two() * s.atan2(q.w);
        v * (angle / s)
    }

    pub fn dot(&self, o: &Self) -> T {
        self.w * o.w + self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn norm(&self) -> T {
        self.dot(self).sqrt()
    }

    /// Unit quaternion; inputs already unit to within a few ulps are
    /// returned unchanged so repeated normalization is a no-op.
    pub fn normalize(&self) -> Self {
        let n2 = self.dot(self);
        if (n2 - T::one()).abs() <= T::lit(4.0) * T::epsilon() {
            return *self;
        }
        let n = n2.sqrt();
        Self::new(self.w / n, self.x / n, self.y / n, self.z / n)
    }

    pub fn conjugate(&self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    /// Rotates `v` by this (unit) quaternion.
    pub fn rotate(&self, v: &Vec3<T>) -> Vec3<T> {
        // v' = v + 2w(u x v) + 2u x (u x v)
        let u = self.vector();
        let t = u.cross(v) * T::two();
        *v + t * self.w + u.cross(&t)
    }

    /// Geodesic angle between two rotations in `[0, pi]`, sign-robust.
    ///
    /// Equal to `2 acos(|<q1, q2>|)`; evaluated through `atan2` so small
    /// angles keep full precision.
    pub fn angle_to(&self, o: &Self) -> T {
        let rel = self.conjugate() * *o;
        let s = rel.vector().norm();
        let c = rel.w.abs();
        clamp(T::two() * s.atan2(c), T::zero(), T::PI())
    }

    /// Rotation angle of this quaternion in `[0, pi]`.
    pub fn angle(&self) -> T {
        Self::identity().angle_to(self)
    }

    pub fn to_matrix(&self) -> Mat3<T> {
        let (w, x, y, z) = (self.w, self.x, self.y, self.z);
        let two = T::two();
        Mat3 {
            m: [
                [
                    T::one() - two * (y * y + z * z),
                    two * (x * y - w * z),
                    two * (x * z + w * y),
                ],
                [
                    two * (x * y + w * z),
                    T::one() - two * (x * x + z * z),
                    two * (y * z - w * x),
                ],
                [
                    two * (x * z - w * y),
                    two * (y * z + w * x),
                    T::one() - two * (x * x + y * y),
                ],
            ],
        }
    }

    /// Quaternion of a proper rotation matrix (Shepperd's method).
    pub fn from_matrix(r: &Mat3<T>) -> Self {
        let m = &r.m;
        let tr = r.trace();
        let one = T::one();
        let quarter = T::lit(0.25);
        let q = if tr > T::zero() {
            let s = (tr + one).sqrt() * T::two();
            Self::new(
                quarter * s,
                (m[2][1] - m[1][2]) / s,
                (m[0][2] - m[2][0]) / s,
                (m[1][0] - m[0][1]) / s,
            )
        } else if m[0][0] > m[1][1] && m[0][0] > m[2][2] {
            let s = (one + m[0][0] - m[1][1] - m[2][2]).sqrt() * T::two();
            Self::new(
                (m[2][1] - m[1][2]) / s,
                quarter * s,
                (m[0][1] + m[1][0]) / s,
                (m[0][2] + m[2][0]) / s,
            )
        } else if m[1][1] > m[2][2] {
            let s = (one + m[1][1] - m[0][0] - m[2][2]).sqrt() * T::two();
            Self::new(
                (m[0][2] - m[2][0]) / s,
                (m[0][1] + m[1][0]) / s,
                quarter * s,
                (m[1][2] + m[2][1]) / s,
            )
        } else {
            let s = (one + m[2][2] - m[0][0] - m[1][1]).sqrt() * T::two();
            Self::new(
                (m[1][0] - m[0][1]) / s,
                (m[0][2] + m[2][0]) / s,
                (m[1][2] + m[2][1]) / s,
                quarter * s,
            )
        };
        q.normalize()
    }

    /// Minimal-angle rotation taking unit vector `from` onto unit vector `to`.
    ///
    /// For antiparallel inputs the 180 degree axis is `fallback_axis`
    /// projected orthogonal to `from` (or any orthogonal axis if that
    /// projection vanishes).
    pub fn from_two_vectors(from: &Vec3<T>, to: &Vec3<T>, fallback_axis: &Vec3<T>) -> Self {
        let d = from.dot(to);
        if d < T::lit(-1.0 + 1e-12) {
            let proj = *fallback_axis - *from * fallback_axis.dot(from);
            let axis = proj
                .try_normalize(T::lit(1e-9))
                .unwrap_or_else(|| from.any_orthogonal());
            return Self::from_scalar_vector(T::zero(), axis);
        }
        Self::from_scalar_vector(T::one() + d, from.cross(to)).normalize()
    }

    pub fn cast<U: Real>(&self) -> Quat<U> {
        Quat::new(
            U::lit(self.w.to_f64_lossy()),
            U::lit(self.x.to_f64_lossy()),
            U::lit(self.y.to_f64_lossy()),
            U::lit(self.z.to_f64_lossy()),
        )
    }

    pub fn is_finite(&self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl<T: Real> Neg for Quat<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl<T: Real> Mul for Quat<T> {
    type Output = Self;
    /// Hamilton product.
    #[inline]
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        )
    }
}

/// Eigen-decomposition of a symmetric 3x3 matrix.
#[derive(Debug, Clone, Copy)]
pub struct SymmetricEigen<T: Real> {
    /// Ascending.
    pub values: [T; 3],
    /// Column `i` is the unit eigenvector of `values[i]`.
    pub vectors: Mat3<T>,
}

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix.
pub fn symmetric_eigen<T: Real>(a: &Mat3<T>) -> SymmetricEigen<T> {
    let mut m = *a;
    let mut v = Mat3::identity();
    let scale = a.frobenius_norm();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off = (m.m[0][1] * m.m[0][1] + m.m[0][2] * m.m[0][2] + m.m[1][2] * m.m[1][2]).sqrt();
        if off <= T::epsilon() * scale || off == T::zero() {
            break;
        }
        for &(p, q) in &[(0usize, 1usize), (0, 2), (1, 2)] {
            let apq = m.m[p][q];
            if apq == T::zero() {
                continue;
            }
            let theta = (m.m[q][q] - m.m[p][p]) / (T::two() * apq);
            let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
            let c = T::one() / (t * t + T::one()).sqrt();
            let s = t * c;
            // m <- J^T m J with J the (p, q) Givens rotation
            for k in 0..3 {
                let mkp = m.m[k][p];
                let mkq = m.m[k][q];
                m.m[k][p] = c * mkp - s * mkq;
                m.m[k][q] = s * mkp + c * mkq;
            }
            for k in 0..3 {
                let mpk = m.m[p][k];
                let mqk = m.m[q][k];
                m.m[p][k] = c * mpk - s * mqk;
                m.m[q][k] = s * mpk + c * mqk;
            }
            for k in 0..3 {
                let vkp = v.m[k][p];
                let vkq = v.m[k][q];
                v.m[k][p] = c * vkp - s * vkq;
                v.m[k][q] = s * vkp + c * vkq;
            }
        }
    }
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| m.m[i][i].partial_cmp(&m.m[j][j]).unwrap_or(std::cmp::Ordering::Equal));
    SymmetricEigen {
        values: [m.m[order[0]][order[0]], m.m[order[1]][order[1]], m.m[order[2]][order[2]]],
        vectors: Mat3::from_cols(v.col(order[0]), v.col(order[1]), v.col(order[2])),
    }
}

/// `a = u * diag(sigma) * v^T` with `sigma` descending and `u`, `v` orthogonal.
#[derive(Debug, Clone, Copy)]
pub struct Svd3<T: Real> {
    pub u: Mat3<T>,
    pub sigma: [T; 3],
    pub v: Mat3<T>,
}

/// One-sided Jacobi SVD of a 3x3 matrix.
pub fn svd3<T: Real>(a: &Mat3<T>) -> Svd3<T> {
    let mut w = *a;
    let mut v = Mat3::identity();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for &(p, q) in &[(0usize, 1usize), (0, 2), (1, 2)] {
            let cp = w.col(p);
            let cq = w.col(q);
            let alpha = cp.norm_squared();
            let beta = cq.norm_squared();
            let gamma = cp.dot(&cq);
            if gamma == T::zero() || gamma.abs() <= T::epsilon() * (alpha * beta).sqrt() {
                continue;
            }
            rotated = true;
            let zeta = (beta - alpha) / (T::two() * gamma);
            let t = zeta.signum() / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
            let c = T::one() / (T::one() + t * t).sqrt();
            let s = c * t;
            w.set_col(p, cp * c - cq * s);
            w.set_col(q, cp * s + cq * c);
            let vp = v.col(p);
            let vq = v.col(q);
            v.set_col(p, vp * c - vq * s);
            v.set_col(q, vp * s + vq * c);
        }
        if !rotated {
            break;
        }
    }

    let norms = [w.col(0).norm(), w.col(1).norm(), w.col(2).norm()];
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap_or(std::cmp::Ordering::Equal));
    let sigma = [norms[order[0]], norms[order[1]], norms[order[2]]];
    let v_sorted = Mat3::from_cols(v.col(order[0]), v.col(order[1]), v.col(order[2]));

    let tiny = T::epsilon() * T::lit(8.0) * sigma[0].max(T::min_positive_value());
    let u0 = if sigma[0] > tiny {
        w.col(order[0]) / sigma[0]
    } else {
        Vec3::unit_x()
    };
    let u1 = if sigma[1] > tiny {
        w.col(order[1]) / sigma[1]
    } else {
        u0.any_orthogonal()
    };
    let u2 = if sigma[2] > tiny {
        w.col(order[2]) / sigma[2]
    } else {
        u0.cross(&u1).normalize()
    };
    Svd3 {
        u: Mat3::from_cols(u0, u1, u2),
        sigma,
        v: v_sorted,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn reconstruct(s: &Svd3<f64>) -> Mat3<f64> {
        s.u * Mat3::diag(s.sigma[0], s.sigma[1], s.sigma[2]) * s.v.transpose()
    }

    #[test]
    fn svd_reconstructs_general_matrix() {
        let a = Mat3 {
            m: [[2.0, -1.0, 0.3], [0.5, 4.0, 1.0], [-3.0, 0.2, 0.7]],
        };
        let s = svd3(&a);
        let r = reconstruct(&s);
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(r.m[i][j], a.m[i][j], epsilon = 1e-13);
            }
        }
        assert!(s.sigma[0] >= s.sigma[1] && s.sigma[1] >= s.sigma[2]);
        let utu = s.u.transpose() * s.u;
        assert_abs_diff_eq!(utu.m[0][1], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(utu.m[2][2], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn svd_rank_deficient_completes_u() {
        let a = Mat3::<f64>::outer(&Vec3::new(1.0, 2.0, 3.0), &Vec3::new(0.0, 1.0, -1.0))
            + Mat3::outer(&Vec3::new(-1.0, 0.5, 0.0), &Vec3::new(1.0, 0.0, 0.0));
        let s = svd3(&a);
        assert!(s.sigma[2] < 1e-12);
        assert_abs_diff_eq!(s.u.det().abs(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn eigen_of_diagonal_and_rotated() {
        let q = Quat::<f64>::from_axis_angle(&Vec3::new(1.0, 2.0, -0.5), 0.7);
        let r = q.to_matrix();
        let a = r * Mat3::diag(3.0, 1.0, 0.25) * r.transpose();
        let e = symmetric_eigen(&a);
        assert_abs_diff_eq!(e.values[0], 0.25, epsilon = 1e-13);
        assert_abs_diff_eq!(e.values[2], 3.0, epsilon = 1e-13);
        let n = e.vectors.col(0);
        let expect = r.col(2);
        assert_abs_diff_eq!(n.dot(&expect).abs(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn quaternion_matrix_round_trip() {
        for (axis, ang) in [
            (Vec3::new(0.0, 0.0, 1.0), 3.0),
            (Vec3::new(1.0, -1.0, 0.2), 1.2),
            (Vec3::new(0.3, 0.1, -2.0), 3.14),
        ] {
            let q = Quat::from_axis_angle(&axis, ang);
            let back = Quat::from_matrix(&q.to_matrix());
            assert!(q.angle_to(&back) < 1e-12);
            let v = Vec3::new(0.3, -1.0, 2.0);
            assert_abs_diff_eq!(q.rotate(&v).x, q.to_matrix().mul_vec(&v).x, epsilon = 1e-14);
        }
    }

    #[test]
    fn angle_is_sign_robust_and_precise() {
        let q = Quat::from_axis_angle(&Vec3::unit_z(), 1e-10);
        assert_abs_diff_eq!(Quat::identity().angle_to(&q), 1e-10, epsilon = 1e-20);
        assert_abs_diff_eq!(Quat::identity().angle_to(&(-q)), 1e-10, epsilon = 1e-20);
    }

    #[test]
    fn exp_log_round_trip() {
        let w = Vec3::new(0.2, -0.4, 1.1);
        assert_abs_diff_eq!(Quat::exp(&w).log().distance(&w), 0.0, epsilon = 1e-14);
        assert_eq!(Quat::exp(&Vec3::new(1e-13, 0.0, 0.0)), Quat::identity());
    }

    #[test]
    fn two_vectors_antiparallel_uses_fallback() {
        let q = Quat::<f64>::from_two_vectors(&Vec3::unit_z(), &(-Vec3::unit_z()), &Vec3::unit_x());
        assert_abs_diff_eq!(q.vector().x.abs(), 1.0, epsilon = 1e-15);
        let out = q.rotate(&Vec3::unit_z());
        assert_abs_diff_eq!(out.z, -1.0, epsilon = 1e-15);
    }
}
