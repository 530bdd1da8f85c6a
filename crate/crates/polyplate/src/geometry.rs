//! Convex polygon primitives shared by the mesh, basis and element modules.

use nalgebra::{Point2, Vector2};

pub type Point = Point2<f64>;
pub type Vector = Vector2<f64>;

/// 2D cross product of `a` and `b`.
#[inline]
pub fn cross(a: Vector, b: Vector) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Signed area of a polygon loop; positive for counter-clockwise orientation.
pub fn signed_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    let mut acc = 0.0;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        acc += a.x * b.y - b.x * a.y;
    }
    0.5 * acc
}

/// Signed area of the triangle (a, b, c).
#[inline]
pub fn triangle_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * cross(b - a, c - a)
}

/// Area centroid of a simple polygon.
pub fn centroid(poly: &[Point]) -> Point {
    let n = poly.len();
    let mut cx = 0.0;
    let mut cy = 0.0;
    let mut area = 0.0;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let w = a.x * b.y - b.x * a.y;
        area += w;
        cx += (a.x + b.x) * w;
        cy += (a.y + b.y) * w;
    }
    area *= 0.5;
    if area.abs() < f64::MIN_POSITIVE {
        // Degenerate loop; fall back to the vertex average.
        let mut p = Vector::zeros();
        for v in poly {
            p += v.coords;
        }
        return Point::from(p / n as f64);
    }
    Point::new(cx / (6.0 * area), cy / (6.0 * area))
}

/// Longest distance between two vertices of the polygon.
pub fn diameter(poly: &[Point]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..poly.len() {
        for j in i + 1..poly.len() {
            d = d.max((poly[i] - poly[j]).norm());
        }
    }
    d
}

/// Checks counter-clockwise convexity: every cross product of consecutive
/// edge vectors must exceed `-tol` (`tol` in squared-length units).
pub fn is_convex_ccw(poly: &[Point], tol: f64) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let c = poly[(i + 2) % n];
        if cross(b - a, c - b) <= -tol {
            return false;
        }
    }
    signed_area(poly) > 0.0
}

/// Minimum inward signed distance from `p` to the polygon's edge lines.
/// Positive strictly inside a convex CCW polygon, negative outside.
pub fn inward_distance(poly: &[Point], p: Point) -> f64 {
    let n = poly.len();
    let mut dmin = f64::INFINITY;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let e = b - a;
        let len = e.norm();
        if len == 0.0 {
            continue;
        }
        dmin = dmin.min(cross(e, p - a) / len);
    }
    dmin
}

/// Clips a convex polygon against the half-plane `{ x : n·x <= c }`.
/// Returns an empty vector when nothing survives.
pub fn clip_halfplane(poly: &[Point], normal: Vector, offset: f64) -> Vec<Point> {
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let da = normal.dot(&a.coords) - offset;
        let db = normal.dot(&b.coords) - offset;
        if da <= 0.0 {
            out.push(a);
        }
        if (da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0) {
            let t = da / (da - db);
            out.push(a + t * (b - a));
        }
    }
    out
}

/// Axis-aligned bounding box as (min, max) corners.
pub fn bounding_box(points: &[Point]) -> (Point, Point) {
    let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in points {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_square() -> Vec<Point> {
        vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ]
    }

    #[test]
    fn square_area_and_centroid() {
        let sq = unit_square();
        assert_relative_eq!(signed_area(&sq), 1.0);
        let c = centroid(&sq);
        assert_relative_eq!(c.x, 0.5);
        assert_relative_eq!(c.y, 0.5);
    }

    #[test]
    fn convexity_and_orientation() {
        let sq = unit_square();
        assert!(is_convex_ccw(&sq, 1e-12));
        let mut cw = sq.clone();
        cw.reverse();
        assert!(!is_convex_ccw(&cw, 1e-12));
    }

    #[test]
    fn inward_distance_signs() {
        let sq = unit_square();
        assert_relative_eq!(inward_distance(&sq, Point::new(0.5, 0.5)), 0.5);
        assert!(inward_distance(&sq, Point::new(1.5, 0.5)) < 0.0);
        assert_relative_eq!(inward_distance(&sq, Point::new(0.0, 0.5)), 0.0);
    }

    #[test]
    fn halfplane_clip_square() {
        let sq = unit_square();
        // Keep x <= 0.5.
        let out = clip_halfplane(&sq, Vector::new(1.0, 0.0), 0.5);
        assert_relative_eq!(signed_area(&out), 0.5, epsilon = 1e-14);
    }
}
