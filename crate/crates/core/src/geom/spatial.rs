//! Static kd-tree for exact nearest-neighbour queries.

use crate::linalg::Vec3;
use crate::scalar::Real;

const LEAF_SIZE: usize = 8;

enum Node<T: Real> {
    Leaf { start: usize, end: usize },
    Split { axis: usize, value: T, left: usize, right: usize },
}

pub struct KdTree<T: Real> {
    points: Vec<Vec3<T>>,
    /// Permutation into `points`; leaves own contiguous ranges.
    order: Vec<usize>,
    nodes: Vec<Node<T>>,
}

impl<T: Real> KdTree<T> {
    pub fn new(points: Vec<Vec3<T>>) -> Self {
        let mut order: Vec<usize> = (0..points.len()).collect();
        let mut nodes = Vec::new();
        if !points.is_empty() {
            let n = order.len();
            build(&points, &mut order, 0, n, &mut nodes);
        }
        Self { points, order, nodes }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec3<T>] {
        &self.points
    }

    /// Index and Euclidean distance of the nearest stored point. Ties
    /// resolve to the lowest index.
    pub fn nearest(&self, q: &Vec3<T>) -> Option<(usize, T)> {
        if self.nodes.is_empty() {
            return None;
        }
        let mut best = (usize::MAX, T::infinity());
        self.search(0, q, &mut best);
        Some((best.0, (*q - self.points[best.0]).norm()))
    }

    fn search(&self, node: usize, q: &Vec3<T>, best: &mut (usize, T)) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &i in &self.order[start..end] {
                    let d2 = (*q - self.points[i]).norm_squared();
                    if d2 < best.1 || (d2 == best.1 && i < best.0) {
                        *best = (i, d2);
                    }
                }
            }
            Node::Split { axis, value, left, right } => {
                let diff = q[axis] - value;
                let (near, far) = if diff <= T::zero() { (left, right) } else { (right, left) };
                self.search(near, q, best);
                if diff * diff <= best.1 {
                    self.search(far, q, best);
                }
            }
        }
    }
}

fn build<T: Real>(
    points: &[Vec3<T>],
    order: &mut [usize],
    start: usize,
    end: usize,
    nodes: &mut Vec<Node<T>>,
) -> usize {
    let id = nodes.len();
    if end - start <= LEAF_SIZE {
        nodes.push(Node::Leaf { start, end });
        return id;
    }
    let slice = &order[start..end];
    let mut lo = points[slice[0]];
    let mut hi = lo;
    for &i in slice {
        lo = lo.component_min(&points[i]);
        hi = hi.component_max(&points[i]);
    }
    let ext = hi - lo;
    let axis = if ext.x >= ext.y && ext.x >= ext.z {
        0
    } else if ext.y >= ext.z {
        1
    } else {
        2
    };
    let mid = (end - start) / 2;
    order[start..end].select_nth_unstable_by(mid, |&a, &b| {
        points[a][axis]
            .partial_cmp(&points[b][axis])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let value = points[order[start + mid]][axis];
    // placeholder, patched after children exist
    nodes.push(Node::Leaf { start, end });
    let left = build(points, order, start, start + mid, nodes);
    let right = build(points, order, start + mid, end, nodes);
    nodes[id] = Node::Split { axis, value, left, right };
    id
}
