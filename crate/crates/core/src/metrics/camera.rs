use serde::{Deserialize, Serialize};

use super::MetricsError;
use crate::geom::{Pose, TriMesh};
use crate::linalg::Vec3;
use crate::scalar::Real;

/// Pinhole camera. Pixel `(col, row)` covers `[col, col+1) x [row, row+1)`
/// in image coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraModel<T: Real> {
    pub fx: T,
    pub fy: T,
    pub cx: T,
    pub cy: T,
    pub width: usize,
    pub height: usize,
    /// World-to-camera extrinsics; identity means poses are already in the
    /// camera frame.
    #[serde(default)]
    pub camera_from_world: Pose<T>,
}

impl<T: Real> CameraModel<T> {
    pub fn new(fx: T, fy: T, cx: T, cy: T, width: usize, height: usize) -> Result<Self, MetricsError> {
        let cam = Self {
            fx,
            fy,
            cx,
            cy,
            width,
            height,
            camera_from_world: Pose::identity(),
        };
        cam.validate()?;
        Ok(cam)
    }

    pub fn with_extrinsics(mut self, camera_from_world: Pose<T>) -> Self {
        self.camera_from_world = camera_from_world;
        self
    }

    pub fn validate(&self) -> Result<(), MetricsError> {
        let w = T::from_usize_lossy(self.width);
        let h = T::from_usize_lossy(self.height);
        let ok = self.fx > T::zero()
            && self.fy > T::zero()
            && self.width > 0
            && self.height > 0
            && self.cx >= T::zero()
            && self.cx <= w
            && self.cy >= T::zero()
            && self.cy <= h;
        if ok {
            Ok(())
        } else {
            Err(MetricsError::InvalidCamera)
        }
    }

    /// Pixel hit by a world point and its camera depth; `None` behind the
    /// camera or outside the image.
    pub fn project(&self, p: &Vec3<T>) -> Option<(usize, usize, T)> {
        let c = self.camera_from_world.transform_point(p);
        if !(c.z > T::zero()) {
            return None;
        }
        let u = (self.fx * c.x / c.z + self.cx).floor();
        let v = (self.fy * c.y / c.z + self.cy).floor();
        if u < T::zero() || v < T::zero() {
            return None;
        }
        let (col, row) = (u.to_usize()?, v.to_usize()?);
        (col < self.width && row < self.height).then_some((col, row, c.z))
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }
}

/// Observed depth in meters (0 = invalid) and the object's visible mask,
/// both row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthFrame<T: Real> {
    pub width: usize,
    pub height: usize,
    pub depth: Vec<T>,
    pub visible_mask: Vec<bool>,
}

impl<T: Real> DepthFrame<T> {
    pub fn new(width: usize, height: usize, depth: Vec<T>, visible_mask: Vec<bool>) -> Result<Self, MetricsError> {
        let n = width * height;
        if depth.len() != n || visible_mask.len() != n {
            return Err(MetricsError::DimensionMismatch);
        }
        if depth.iter().any(|d| !(*d >= T::zero())) {
            return Err(MetricsError::NegativeDepth);
        }
        Ok(Self {
            width,
            height,
            depth,
            visible_mask,
        })
    }
}

/// Row-major binary image.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryMask {
    pub width: usize,
    pub height: usize,
    pub data: Vec<bool>,
}

impl BinaryMask {
    pub fn empty(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![false; width * height],
        }
    }

    pub fn new(width: usize, height: usize, data: Vec<bool>) -> Result<Self, MetricsError> {
        if data.len() != width * height {
            return Err(MetricsError::DimensionMismatch);
        }
        Ok(Self { width, height, data })
    }

    pub fn get(&self, col: usize, row: usize) -> bool {
        self.data[row * self.width + col]
    }

    pub fn set(&mut self, col: usize, row: usize) {
        self.data[row * self.width + col] = true;
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|b| **b).count()
    }

    /// Intersection over union; two empty masks score 1.
    pub fn iou(&self, other: &Self) -> Result<f64, MetricsError> {
        if self.width != other.width || self.height != other.height {
            return Err(MetricsError::DimensionMismatch);
        }
        let (mut inter, mut union) = (0usize, 0usize);
        for (a, b) in self.data.iter().zip(&other.data) {
            inter += usize::from(*a && *b);
            union += usize::from(*a || *b);
        }
        Ok(if union == 0 { 1.0 } else { inter as f64 / union as f64 })
    }
}

/// Vertex z-buffer: nearest splatted depth per pixel.
pub fn render_depth<T: Real>(mesh: &TriMesh<T>, pose: &Pose<T>, cam: &CameraModel<T>) -> Vec<Option<T>> {
    let mut zbuf: Vec<Option<T>> = vec![None; cam.pixel_count()];
    for v in mesh.transformed_vertices(pose) {
        if let Some((col, row, z)) = cam.project(&v) {
            let slot = &mut zbuf[row * cam.width + col];
            if slot.map_or(true, |cur| z < cur) {
                *slot = Some(z);
            }
        }
    }
    zbuf
}

/// Projected vertices, each widened by its 4-neighbourhood.
pub fn render_silhouette<T: Real>(mesh: &TriMesh<T>, pose: &Pose<T>, cam: &CameraModel<T>) -> BinaryMask {
    let mut mask = BinaryMask::empty(cam.width, cam.height);
    for v in mesh.transformed_vertices(pose) {
        if let Some((col, row, _)) = cam.project(&v) {
            mask.set(col, row);
            if col > 0 {
                mask.set(col - 1, row);
            }
            if col + 1 < cam.width {
                mask.set(col + 1, row);
            }
            if row > 0 {
                mask.set(col, row - 1);
            }
            if row + 1 < cam.height {
                mask.set(col, row + 1);
            }
        }
    }
    mask
}
