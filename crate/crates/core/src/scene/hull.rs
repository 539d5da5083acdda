//! Planar convex hull and point-in-support queries for the settler.

use crate::scalar::Real;

pub type P2<T> = [T; 2];

fn cross<T: Real>(o: P2<T>, a: P2<T>, b: P2<T>) -> T {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn sub<T: Real>(a: P2<T>, b: P2<T>) -> P2<T> {
    [a[0] - b[0], a[1] - b[1]]
}

fn dist<T: Real>(a: P2<T>, b: P2<T>) -> T {
    let d = sub(a, b);
    (d[0] * d[0] + d[1] * d[1]).sqrt()
}

/// Monotone-chain hull, counter-clockwise, collinear points dropped.
/// Degenerate inputs give one point or a two-point segment.
pub fn convex_hull<T: Real>(points: &[P2<T>]) -> Vec<P2<T>> {
    let mut pts: Vec<P2<T>> = points.to_vec();
    pts.sort_by(|a, b| {
        a[0].partial_cmp(&b[0])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a[1].partial_cmp(&b[1]).unwrap_or(std::cmp::Ordering::Equal))
    });
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<P2<T>> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= T::zero() {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<P2<T>> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= T::zero() {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 2 {
        // all points identical after sort
        lower.truncate(1);
    }
    lower
}

fn closest_on_segment<T: Real>(p: P2<T>, a: P2<T>, b: P2<T>) -> P2<T> {
    let ab = sub(b, a);
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    if len2 == T::zero() {
        return a;
    }
    let ap = sub(p, a);
    let t = ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).max(T::zero()).min(T::one());
    [a[0] + ab[0] * t, a[1] + ab[1] * t]
}

/// `None` when `p` lies within `tol` of the (closed) hull, otherwise the
/// nearest point on the hull boundary.
pub fn support_query<T: Real>(hull: &[P2<T>], p: P2<T>, tol: T) -> Option<P2<T>> {
    match hull.len() {
        0 => None,
        1 => (dist(hull[0], p) > tol).then_some(hull[0]),
        2 => {
            let q = closest_on_segment(p, hull[0], hull[1]);
            (dist(q, p) > tol).then_some(q)
        }
        n => {
            let inside = (0..n).all(|i| {
                let a = hull[i];
                let b = hull[(i + 1) % n];
                cross(a, b, p) >= -tol * dist(a, b)
            });
            if inside {
                return None;
            }
            let mut best = hull[0];
            let mut best_d = T::infinity();
            for i in 0..n {
                let q = closest_on_segment(p, hull[i], hull[(i + 1) % n]);
                let d = dist(q, p);
                if d < best_d {
                    best_d = d;
                    best = q;
                }
            }
            (best_d > tol).then_some(best)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_with_interior_and_collinear_points() {
        let pts = [
            [0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5], [0.5, 0.0], [1.0, 0.5],
        ];
        let h = convex_hull(&pts);
        assert_eq!(h.len(), 4);
        assert!(support_query(&h, [0.5, 0.5], 1e-12).is_none());
        assert!(support_query(&h, [1.0, 0.5], 1e-12).is_none());
        assert_eq!(support_query(&h, [2.0, 0.5], 1e-12), Some([1.0, 0.5]));
    }

    #[test]
    fn degenerate_hulls() {
        let seg = convex_hull(&[[0.0, 0.0], [1.0, 0.0], [0.5, 0.0], [0.5, 0.0]]);
        assert_eq!(seg, vec![[0.0, 0.0], [1.0, 0.0]]);
        assert!(support_query(&seg, [0.3, 0.0], 1e-9).is_none());
        assert_eq!(support_query(&seg, [0.3, 0.2], 1e-9), Some([0.3, 0.0]));
        let pt = convex_hull(&[[2.0, 2.0], [2.0, 2.0]]);
        assert_eq!(pt.len(), 1);
        assert_eq!(support_query(&pt, [2.0, 3.0], 1e-9), Some([2.0, 2.0]));
    }
}
