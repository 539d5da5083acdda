//! Triangle meshes and the procedural primitives used by the synthetic
//! scenarios.

use serde::{Deserialize, Serialize};

use super::{GeomError, Pose};
use crate::linalg::Vec3;
use crate::scalar::Real;

/// Triangle mesh in the object frame, meters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriMesh<T: Real> {
    vertices: Vec<Vec3<T>>,
    faces: Vec<[usize; 3]>,
    #[serde(skip)]
    normals: Vec<Vec3<T>>,
}

impl<T: Real> TriMesh<T> {
    /// Validates face indices and drops zero-area faces.
    pub fn new(vertices: Vec<Vec3<T>>, faces: Vec<[usize; 3]>) -> Result<Self, GeomError> {
        if vertices.is_empty() {
            return Err(GeomError::EmptyMesh);
        }
        let nv = vertices.len();
        for (fi, f) in faces.iter().enumerate() {
            if let Some(&bad) = f.iter().find(|&&i| i >= nv) {
                return Err(GeomError::FaceIndexOutOfRange {
                    face: fi,
                    index: bad,
                    vertex_count: nv,
                });
            }
        }
        let scale = bounding_extent(&vertices);
        let min_area2 = (T::epsilon() * scale * scale).max(T::min_positive_value());
        let faces: Vec<[usize; 3]> = faces
            .into_iter()
            .filter(|f| face_cross(&vertices, f).norm() > min_area2)
            .collect();
        let normals = vertex_normals(&vertices, &faces);
        Ok(Self {
            vertices,
            faces,
            normals,
        })
    }

    pub fn vertices(&self) -> &[Vec3<T>] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    /// Area-weighted outward vertex normals. Vertices without faces get the
    /// direction away from the vertex centroid.
    pub fn normals(&self) -> &[Vec3<T>] {
        &self.normals
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn transformed_vertices(&self, pose: &Pose<T>) -> Vec<Vec3<T>> {
        self.vertices.iter().map(|v| pose.transform_point(v)).collect()
    }

    pub fn aabb(&self) -> (Vec3<T>, Vec3<T>) {
        aabb_of(&self.vertices)
    }

    /// Signed enclosed volume (positive for outward-oriented closed meshes).
    pub fn volume(&self) -> T {
        let six = T::lit(6.0);
        self.faces
            .iter()
            .map(|f| {
                let (a, b, c) = (self.vertices[f[0]], self.vertices[f[1]], self.vertices[f[2]]);
                a.dot(&b.cross(&c)) / six
            })
            .sum()
    }

    /// Center of mass for uniform density via signed tetrahedra; falls back
    /// to the vertex centroid for open or flat meshes.
    pub fn center_of_mass(&self) -> Vec3<T> {
        let mut vol = T::zero();
        let mut acc = Vec3::zero();
        for f in &self.faces {
            let (a, b, c) = (self.vertices[f[0]], self.vertices[f[1]], self.vertices[f[2]]);
            let v = a.dot(&b.cross(&c)) / T::lit(6.0);
            vol += v;
            acc += (a + b + c) * (v / T::lit(4.0));
        }
        let ext = bounding_extent(&self.vertices);
        if vol.abs() <= T::lit(1e-9) * ext * ext * ext || !vol.is_finite() {
            log::warn!("mesh encloses no volume; using vertex centroid as center of mass");
            return Vec3::centroid(&self.vertices);
        }
        acc / vol
    }

    /// Same mesh with vertex order permuted by `perm` (`new[i] = old[perm[i]]`).
    pub fn permuted(&self, perm: &[usize]) -> Result<Self, GeomError> {
        let mut inverse = vec![0usize; perm.len()];
        for (new_i, &old_i) in perm.iter().enumerate() {
            inverse[old_i] = new_i;
        }
        let vertices = perm.iter().map(|&i| self.vertices[i]).collect();
        let faces = self
            .faces
            .iter()
            .map(|f| [inverse[f[0]], inverse[f[1]], inverse[f[2]]])
            .collect();
        Self::new(vertices, faces)
    }

    /// Axis-aligned box centered at the origin, each face split into
    /// `subdivisions x subdivisions` quads.
    pub fn cuboid(size: Vec3<T>, subdivisions: usize) -> Self {
        let n = subdivisions.max(1);
        let h = size * T::half();
        let mut b = MeshBuilder::default();
        // (normal, u, v) with u x v = normal
        let axes = [
            (Vec3::unit_x(), Vec3::unit_y(), Vec3::unit_z()),
            (-Vec3::unit_x(), Vec3::unit_z(), Vec3::unit_y()),
            (Vec3::unit_y(), Vec3::unit_z(), Vec3::unit_x()),
            (-Vec3::unit_y(), Vec3::unit_x(), Vec3::unit_z()),
            (Vec3::unit_z(), Vec3::unit_x(), Vec3::unit_y()),
            (-Vec3::unit_z(), Vec3::unit_y(), Vec3::unit_x()),
        ];
        for (nrm, u, v) in axes {
            let c = mul(&nrm, &h);
            let hu = mul(&u, &h);
            let hv = mul(&v, &h);
            b.grid(n, n, |i, j| {
                let s = T::from_usize_lossy(i) / T::from_usize_lossy(n) * T::two() - T::one();
                let t = T::from_usize_lossy(j) / T::from_usize_lossy(n) * T::two() - T::one();
                c + hu * s + hv * t
            });
        }
        b.build()
    }

    pub fn cube(side: T, subdivisions: usize) -> Self {
        Self::cuboid(Vec3::new(side, side, side), subdivisions)
    }

    /// Closed cylinder along `z`, centered at the origin.
    pub fn cylinder(radius: T, height: T, segments: usize, rings: usize) -> Self {
        let seg = segments.max(3);
        let rings = rings.max(1);
        let hz = height * T::half();
        let mut b = MeshBuilder::default();
        let ang = |i: usize| T::TAU() * T::from_usize_lossy(i % seg) / T::from_usize_lossy(seg);
        // side: u around, v up (outward winding)
        b.grid(seg, rings, |i, j| {
            let a = ang(i);
            let z = -hz + height * T::from_usize_lossy(j) / T::from_usize_lossy(rings);
            Vec3::new(radius * a.cos(), radius * a.sin(), z)
        });
        let cap_rings = (rings / 2).max(1);
        b.disk(seg, cap_rings, |i, k| {
            let r = radius * T::from_usize_lossy(k) / T::from_usize_lossy(cap_rings);
            let a = ang(i);
            Vec3::new(r * a.cos(), r * a.sin(), hz)
        }, false);
        b.disk(seg, cap_rings, |i, k| {
            let r = radius * T::from_usize_lossy(k) / T::from_usize_lossy(cap_rings);
            let a = ang(i);
            Vec3::new(r * a.cos(), r * a.sin(), -hz)
        }, true);
        b.build()
    }

    /// UV sphere centered at the origin.
    pub fn sphere(radius: T, stacks: usize, slices: usize) -> Self {
        let stacks = stacks.max(2);
        let slices = slices.max(3);
        let mut b = MeshBuilder::default();
        b.grid(slices, stacks, |i, j| {
            let phi = T::TAU() * T::from_usize_lossy(i % slices) / T::from_usize_lossy(slices);
            let theta = -T::FRAC_PI_2() + T::PI() * T::from_usize_lossy(j) / T::from_usize_lossy(stacks);
            Vec3::new(radius * theta.cos() * phi.cos(), radius * theta.cos() * phi.sin(), radius * theta.sin())
        });
        b.build()
    }

    /// Regular tetrahedron with circumradius `radius`, centroid at the
    /// origin, one face on `z = -radius/3`.
    pub fn tetrahedron(radius: T, subdivisions: usize) -> Self {
        let third = T::one() / T::lit(3.0);
        let base_r = radius * (T::lit(8.0) / T::lit(9.0)).sqrt();
        let zb = -radius * third;
        let pts: Vec<Vec3<T>> = (0..3)
            .map(|i| {
                let a = T::TAU() * T::from_usize_lossy(i) / T::lit(3.0);
                Vec3::new(base_r * a.cos(), base_r * a.sin(), zb)
            })
            .collect();
        let apex = Vec3::new(T::zero(), T::zero(), radius);
        let mut b = MeshBuilder::default();
        let n = subdivisions.max(1);
        b.triangle(pts[0], pts[2], pts[1], n);
        b.triangle(pts[0], pts[1], apex, n);
        b.triangle(pts[1], pts[2], apex, n);
        b.triangle(pts[2], pts[0], apex, n);
        b.build()
    }

    /// Single-sided square in the `z = 0` plane facing `-z`, centered at the
    /// origin.
    pub fn plane_grid(side: T, subdivisions: usize) -> Self {
        let n = subdivisions.max(1);
        let mut b = MeshBuilder::default();
        b.grid(n, n, |i, j| {
            let s = T::from_usize_lossy(i) / T::from_usize_lossy(n) - T::half();
            let t = T::from_usize_lossy(j) / T::from_usize_lossy(n) - T::half();
            Vec3::new(t * side, s * side, T::zero())
        });
        b.build()
    }
}

fn mul<T: Real>(a: &Vec3<T>, b: &Vec3<T>) -> Vec3<T> {
    Vec3::new(a.x * b.x, a.y * b.y, a.z * b.z)
}

fn face_cross<T: Real>(v: &[Vec3<T>], f: &[usize; 3]) -> Vec3<T> {
    (v[f[1]] - v[f[0]]).cross(&(v[f[2]] - v[f[0]]))
}

pub(crate) fn aabb_of<T: Real>(pts: &[Vec3<T>]) -> (Vec3<T>, Vec3<T>) {
    let first = pts.first().copied().unwrap_or_else(Vec3::zero);
    pts.iter()
        .fold((first, first), |(lo, hi), p| (lo.component_min(p), hi.component_max(p)))
}

fn bounding_extent<T: Real>(pts: &[Vec3<T>]) -> T {
    let (lo, hi) = aabb_of(pts);
    (hi - lo).norm().max(T::min_positive_value())
}

fn vertex_normals<T: Real>(vertices: &[Vec3<T>], faces: &[[usize; 3]]) -> Vec<Vec3<T>> {
    let mut acc = vec![Vec3::zero(); vertices.len()];
    for f in faces {
        let c = face_cross(vertices, f);
        for &i in f {
            acc[i] += c;
        }
    }
    let centroid = Vec3::centroid(vertices);
    acc.iter()
        .zip(vertices)
        .map(|(n, v)| {
            n.try_normalize(T::min_positive_value())
                .or_else(|| (*v - centroid).try_normalize(T::min_positive_value()))
                .unwrap_or_else(Vec3::unit_z)
        })
        .collect()
}

#[derive(Default)]
struct MeshBuilder<T: Real> {
    vertices: Vec<Vec3<T>>,
    faces: Vec<[usize; 3]>,
}

impl<T: Real> MeshBuilder<T> {
    /// `(nu + 1) x (nv + 1)` lattice from `f(i, j)`, triangulated with
    /// counter-clockwise winding in the (u, v) orientation.
    fn grid(&mut self, nu: usize, nv: usize, f: impl Fn(usize, usize) -> Vec3<T>) {
        let base = self.vertices.len();
        for j in 0..=nv {
            for i in 0..=nu {
                self.vertices.push(f(i, j));
            }
        }
        let idx = |i: usize, j: usize| base + j * (nu + 1) + i;
        for j in 0..nv {
            for i in 0..nu {
                self.faces.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
                self.faces.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
            }
        }
    }

    /// Disk from concentric rings `f(angle_index, ring)`, ring 0 the center.
    fn disk(&mut self, seg: usize, rings: usize, f: impl Fn(usize, usize) -> Vec3<T>, flip: bool) {
        let center = self.vertices.len();
        self.vertices.push(f(0, 0));
        let ring_start = self.vertices.len();
        for k in 1..=rings {
            for i in 0..seg {
                self.vertices.push(f(i, k));
            }
        }
        let at = |k: usize, i: usize| ring_start + (k - 1) * seg + (i % seg);
        let mut push = |a: usize, b: usize, c: usize| {
            if flip {
                self.faces.push([a, c, b]);
            } else {
                self.faces.push([a, b, c]);
            }
        };
        for i in 0..seg {
            push(center, at(1, i), at(1, i + 1));
        }
        for k in 1..rings {
            for i in 0..seg {
                push(at(k, i), at(k + 1, i), at(k + 1, i + 1));
                push(at(k, i), at(k + 1, i + 1), at(k, i + 1));
            }
        }
    }

    /// Triangle `abc` (counter-clockwise seen from outside) split into `n^2`
    /// sub-triangles.
    fn triangle(&mut self, a: Vec3<T>, b: Vec3<T>, c: Vec3<T>, n: usize) {
        let nf = T::from_usize_lossy(n);
        let mut row_start = Vec::with_capacity(n + 1);
        for j in 0..=n {
            row_start.push(self.vertices.len());
            for i in 0..=(n - j) {
                let u = T::from_usize_lossy(i) / nf;
                let v = T::from_usize_lossy(j) / nf;
                self.vertices.push(a + (b - a) * u + (c - a) * v);
            }
        }
        for j in 0..n {
            for i in 0..(n - j) {
                let p = row_start[j] + i;
                let q = row_start[j + 1] + i;
                self.faces.push([p, p + 1, q]);
                if i + 1 < n - j {
                    self.faces.push([p + 1, q + 1, q]);
                }
            }
        }
    }

    fn build(self) -> TriMesh<T> {
        TriMesh::new(self.vertices, self.faces).expect("procedural mesh is valid")
    }
}
