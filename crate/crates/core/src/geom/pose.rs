use serde::{Deserialize, Serialize};

use crate::linalg::{Mat3, Quat, Vec3};
use crate::scalar::Real;

/// Rigid transform in SE(3): `p -> R p + t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose<T: Real> {
    /// Unit quaternion `(w, x, y, z)`.
    pub rotation: Quat<T>,
    /// Meters.
    pub translation: Vec3<T>,
}

impl<T: Real> Default for Pose<T> {
    fn default() -> Self {
        Self::identity()
    }
}

impl<T: Real> Pose<T> {
    pub fn new(rotation: Quat<T>, translation: Vec3<T>) -> Self {
        Self {
            rotation: rotation.normalize(),
            translation,
        }
    }

    pub fn identity() -> Self {
        Self {
            rotation: Quat::identity(),
            translation: Vec3::zero(),
        }
    }

    pub fn from_rotation(rotation: Quat<T>) -> Self {
        Self::new(rotation, Vec3::zero())
    }

    pub fn from_translation(translation: Vec3<T>) -> Self {
        Self {
            rotation: Quat::identity(),
            translation,
        }
    }

    pub fn from_matrix(rotation: &Mat3<T>, translation: Vec3<T>) -> Self {
        Self::new(Quat::from_matrix(rotation), translation)
    }

    pub fn rotation_matrix(&self) -> Mat3<T> {
        self.rotation.to_matrix()
    }

    /// `self ∘ other`: applies `other` first, then `self`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            rotation: (self.rotation * other.rotation).normalize(),
            translation: self.rotation.rotate(&other.translation) + self.translation,
        }
    }

    pub fn inverse(&self) -> Self {
        let r = self.rotation.conjugate();
        Self {
            rotation: r,
            translation: -r.rotate(&self.translation),
        }
    }

    #[inline]
    pub fn transform_point(&self, p: &Vec3<T>) -> Vec3<T> {
        self.rotation.rotate(p) + self.translation
    }

    #[inline]
    pub fn transform_vector(&self, v: &Vec3<T>) -> Vec3<T> {
        self.rotation.rotate(v)
    }

    /// Geodesic rotation angle to `other`, radians in `[0, pi]`.
    pub fn rotation_angle_to(&self, other: &Self) -> T {
        self.rotation.angle_to(&other.rotation)
    }

    pub fn translation_distance_to(&self, other: &Self) -> T {
        self.translation.distance(&other.translation)
    }

    /// Relative motion `self^-1 ∘ next`.
    pub fn relative_to_next(&self, next: &Self) -> Self {
        self.inverse().compose(next)
    }

    pub fn is_finite(&self) -> bool {
        self.rotation.is_finite() && self.translation.is_finite()
    }

    pub fn cast<U: Real>(&self) -> Pose<U> {
        Pose::new(self.rotation.cast(), self.translation.cast())
    }
}

/// Applies a world-frame `delta` to the previous world pose: `delta ∘ prev`.
pub fn propagate_pose<T: Real>(prev: &Pose<T>, delta: &Pose<T>) -> Pose<T> {
    delta.compose(prev)
}
