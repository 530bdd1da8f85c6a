//! Numerical integration on convex polygons.
//!
//! Polygons are fanned into triangles about the centroid and each triangle
//! carries a collapsed-coordinate Gauss product rule of the requested
//! polynomial exactness. All weights are positive and the points are strictly
//! interior, which matters because the rational basis functions blow up on
//! the polygon boundary.

use crate::geometry::{centroid, signed_area, triangle_area, Point};
use crate::{Error, Result};
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

/// Quadrature points and weights on a convex polygon.
#[derive(Debug, Clone)]
pub struct PolygonQuadrature {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
}

impl PolygonQuadrature {
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Point, f64)> + '_ {
        self.points.iter().copied().zip(self.weights.iter().copied())
    }
}

/// Gauss-Legendre nodes and weights on [0, 1], cached per point count.
pub fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    static CACHE: OnceLock<Mutex<HashMap<usize, (Vec<f64>, Vec<f64>)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry(n)
        .or_insert_with(|| {
            let (x, w) = gauss_legendre(n);
            // Map [-1, 1] -> [0, 1].
            let xs = x.iter().map(|&t| 0.5 * (t + 1.0)).collect();
            let ws = w.iter().map(|&t| 0.5 * t).collect();
            (xs, ws)
        })
        .clone()
}

/// Gauss-Legendre rule on [-1, 1] via Newton iteration on P_n.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Chebyshev-like initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n(x) and P'_n(x).
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (pm1 - x * p) / (1.0 - x * x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Extra Gauss points per direction beyond the requested polynomial
/// exactness. The element integrands are rational (Wachspress adjoint in the
/// denominator), so the minimal rule converges far too slowly; the boost
/// brings well-conditioned polygons to ~1e-9 relative stiffness accuracy
/// while keeping the advertised degree a strict lower bound on exactness.
const GAUSS_BOOST: usize = 13;

/// Rule on the triangle (a, b, c) exact for bivariate polynomials of total
/// degree `degree`, built from the Duffy-type collapse
/// `T(u, v) = a + u (b - a) + v (1 - u)(c - a)` with Jacobian `2A (1 - u)`.
fn triangle_rule(a: Point, b: Point, c: Point, degree: usize) -> (Vec<Point>, Vec<f64>) {
    let area2 = 2.0 * triangle_area(a, b, c);
    // A monomial of total degree d is degree <= d in u and in v separately;
    // the Jacobian adds one degree in u.
    let nu = (degree + 2).div_ceil(2) + GAUSS_BOOST;
    let nv = (degree + 1).div_ceil(2) + GAUSS_BOOST;
    let (xu, wu) = gauss_legendre_unit(nu);
    let (xv, wv) = gauss_legendre_unit(nv);
    let mut points = Vec::with_capacity(nu * nv);
    let mut weights = Vec::with_capacity(nu * nv);
    for (iu, &u) in xu.iter().enumerate() {
        for (iv, &v) in xv.iter().enumerate() {
            let p = a + u * (b - a) + v * (1.0 - u) * (c - a);
            points.push(p);
            weights.push(wu[iu] * wv[iv] * (1.0 - u) * area2);
        }
    }
    (points, weights)
}

/// Quadrature on a convex CCW polygon: centroid fan triangulation with a
/// per-triangle rule of the requested exactness degree.
pub fn polygon_quadrature(polygon: &[Point], degree: usize) -> Result<PolygonQuadrature> {
    if degree < 1 {
        return Err(Error::invalid_argument("quadrature degree must be >= 1"));
    }
    if polygon.len() < 3 {
        return Err(Error::invalid_argument(
            "polygon must have at least 3 vertices",
        ));
    }
    let area = signed_area(polygon);
    let scale = crate::geometry::diameter(polygon);
    if area <= 1e-14 * scale * scale {
        return Err(Error::invalid_argument(format!(
            "degenerate polygon: area {area:.3e}"
        )));
    }
    let c = centroid(polygon);
    let n = polygon.len();
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for i in 0..n {
        let (p, w) = triangle_rule(c, polygon[i], polygon[(i + 1) % n], degree);
        points.extend(p);
        weights.extend(w);
    }
    Ok(PolygonQuadrature { points, weights })
}
