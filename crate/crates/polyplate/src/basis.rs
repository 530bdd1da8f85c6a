//! Wachspress barycentric coordinates and quadratic serendipity functions on
//! convex polygons, with analytic gradients.
//!
//! The Wachspress weight for vertex `i` is
//! `w_i(x) = A(v_{i-1}, v_i, v_{i+1}) / (A(x, v_{i-1}, v_i) A(x, v_i, v_{i+1}))`
//! with signed triangle areas, normalized to `lambda_i = w_i / sum w_j`. The
//! functions are linear on edges, vanish on non-incident edges, and their
//! denominators vanish on the boundary, so evaluation is contracted for
//! strictly interior points only.
//!
//! The serendipity set is built in two stages from the n(n+1)/2 pairwise
//! products `mu_ab = lambda_a lambda_b`. First a linear reduction to 2n
//! intermediate functions indexed over vertices and edge midpoints: the
//! retained functions are `mu_ii` and the adjacent products `mu_k,k+1`,
//! while every distant product (an interior bubble that vanishes on all
//! edges) is distributed over the retained set with coefficients chosen so
//! that the exact polarization identity
//! `q(x) = sum_ab mu_ab B_q(v_a, v_b)` (B_q the polar form of a quadratic q)
//! is preserved - this keeps full quadratic precision in the interior.
//! Second, a collocation transform enforces the Lagrange property at the n
//! vertices and n edge midpoints. The mid-edge members `psi_k` restrict to
//! the quadratic bubble `4 s (1 - s)` in edge arc length.

use crate::geometry::{self, cross, diameter, inward_distance, Point, Vector};
use crate::{Error, Result};
use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Basis values and gradients at a single interior point.
///
/// `lambda` are the Wachspress coordinates; `psi` the mid-edge serendipity
/// functions (edge `k` joins vertices `k` and `k+1`); `vertex` the
/// serendipity vertex functions. The serendipity fields are empty when only
/// the Wachspress evaluation was requested.
#[derive(Debug, Clone)]
pub struct BasisEval {
    pub lambda: Vec<f64>,
    pub grad_lambda: Vec<Vector>,
    pub psi: Vec<f64>,
    pub grad_psi: Vec<Vector>,
    pub vertex: Vec<f64>,
    pub grad_vertex: Vec<Vector>,
}

/// Per-polygon basis context: validates the polygon once and caches the
/// serendipity collocation transform.
#[derive(Debug, Clone)]
pub struct PolygonBasis {
    polygon: Vec<Point>,
    /// Triangle areas A(v_{i-1}, v_i, v_{i+1}), the Wachspress numerators.
    corner_areas: Vec<f64>,
    /// Inverse of the 2n x 2n nodal collocation matrix of the intermediate
    /// functions; column r holds the expansion of Lagrange function r.
    seren_coef: DMatrix<f64>,
    /// Distant pairs (a, b) with their distribution coefficients over the
    /// 2n retained intermediate functions.
    distant: Vec<(usize, usize, nalgebra::DVector<f64>)>,
    diameter: f64,
}

/// Polar form of the quadratic monomial basis: `B_q(u, v) = 2 q((u+v)/2) -
/// (q(u) + q(v)) / 2`, bi-affine in (u, v), with `B_q(x, x) = q(x)`.
fn polar_values(u: Point, v: Point) -> [f64; 6] {
    let quad = |p: Point| [1.0, p.x, p.y, p.x * p.x, p.x * p.y, p.y * p.y];
    let m = Point::from(0.5 * (u.coords + v.coords));
    let (qm, qu, qv) = (quad(m), quad(u), quad(v));
    std::array::from_fn(|i| 2.0 * qm[i] - 0.5 * (qu[i] + qv[i]))
}

impl PolygonBasis {
    pub fn new(polygon: &[Point]) -> Result<Self> {
        let n = polygon.len();
        if n < 3 {
            return Err(Error::invalid_argument(
                "polygon must have at least 3 vertices",
            ));
        }
        let diam = diameter(polygon);
        if !geometry::is_convex_ccw(polygon, 1e-12 * diam * diam) {
            return Err(Error::invalid_argument(
                "polygon must be convex and counter-clockwise",
            ));
        }
        let corner_areas: Vec<f64> = (0..n)
            .map(|i| {
                geometry::triangle_area(polygon[(i + n - 1) % n], polygon[i], polygon[(i + 1) % n])
            })
            .collect();

        // Distribution of the distant products mu_ab over the retained
        // functions: for every quadratic q the polarization identity must be
        // preserved, i.e. 2 B_q(v_a, v_b) = sum_i c_i q(v_i) +
        // sum_k c_{n+k} 2 B_q(v_k, v_{k+1}) for the 6 monomials. Solved in
        // centered/scaled coordinates (the quadratic space is affine
        // invariant) with the minimum-norm solution.
        let m = 2 * n;
        let c = geometry::centroid(polygon);
        let local = |v: Point| Point::from((v - c) / diam);
        let mut moment = DMatrix::<f64>::zeros(6, m);
        for i in 0..n {
            let q = polar_values(local(polygon[i]), local(polygon[i]));
            for row in 0..6 {
                moment[(row, i)] = q[row];
            }
        }
        for k in 0..n {
            let b = polar_values(local(polygon[k]), local(polygon[(k + 1) % n]));
            for row in 0..6 {
                moment[(row, n + k)] = 2.0 * b[row];
            }
        }
        // The moment matrix has full row rank for every convex polygon (a
        // quadratic vanishing at all vertices and edge midpoints vanishes on
        // n >= 3 distinct lines, hence is zero), so the minimum-norm solution
        // is A^T (A A^T)^{-1} rhs via the 6x6 Gram matrix.
        let gram_lu = (&moment * moment.transpose()).lu();
        let mut distant = Vec::new();
        for a in 0..n {
            for b in a + 2..n {
                if a == 0 && b == n - 1 {
                    continue; // adjacent through the wrap-around edge
                }
                let target = polar_values(local(polygon[a]), local(polygon[b]));
                let rhs = nalgebra::DVector::from_iterator(6, target.iter().map(|&t| 2.0 * t));
                let coeffs = gram_lu
                    .solve(&rhs)
                    .map(|y| moment.transpose() * y)
                    .ok_or_else(|| {
                        Error::BasisEvaluation("serendipity reduction failed: singular Gram".into())
                    })?;
                if ((&moment * &coeffs) - &rhs).norm() > 1e-9 * rhs.norm().max(1.0) {
                    return Err(Error::BasisEvaluation(
                        "serendipity reduction cannot preserve quadratic precision \
                         (degenerate vertex configuration)"
                            .into(),
                    ));
                }
                distant.push((a, b, coeffs));
            }
        }

        // Collocation matrix of the 2n intermediate functions at the 2n nodes
        // (n vertices, then n edge midpoints). The nodal values follow from
        // lambda being linear on edges and vanishing on non-incident edges
        // (distant products vanish on the whole boundary), so the matrix is
        // exact; no boundary evaluation is needed.
        let mut colloc = DMatrix::<f64>::zeros(m, m);
        for i in 0..n {
            colloc[(i, i)] = 1.0; // lambda_i^2 at vertex i
        }
        for k in 0..n {
            let j = (k + 1) % n;
            colloc[(n + k, k)] = 0.25; // lambda_k^2 at midpoint of edge k
            colloc[(n + k, j)] = 0.25;
            colloc[(n + k, n + k)] = 0.25; // lambda_k lambda_{k+1} at its midpoint
        }
        let seren_coef = colloc.try_inverse().ok_or_else(|| {
            Error::BasisEvaluation(
                "serendipity collocation matrix is singular (bug: convex polygon expected)".into(),
            )
        })?;

        Ok(Self {
            polygon: polygon.to_vec(),
            corner_areas,
            seren_coef,
            distant,
            diameter: diam,
        })
    }

    pub fn polygon(&self) -> &[Point] {
        &self.polygon
    }

    pub fn num_vertices(&self) -> usize {
        self.polygon.len()
    }

    fn check_interior(&self, p: Point) -> Result<()> {
        if inward_distance(&self.polygon, p) <= 1e-12 * self.diameter {
            return Err(Error::BasisEvaluation(format!(
                "point ({:.6}, {:.6}) is on or outside the polygon boundary",
                p.x, p.y
            )));
        }
        Ok(())
    }

    /// Wachspress coordinates and gradients at a strictly interior point.
    pub fn wachspress(&self, p: Point) -> Result<BasisEval> {
        self.check_interior(p)?;
        let n = self.polygon.len();
        let mut w = vec![0.0; n];
        // Logarithmic gradients grad(w_i)/w_i.
        let mut r = vec![Vector::zeros(); n];
        for i in 0..n {
            let prev = self.polygon[(i + n - 1) % n];
            let cur = self.polygon[i];
            let next = self.polygon[(i + 1) % n];
            let a_prev = geometry::triangle_area(p, prev, cur);
            let a_next = geometry::triangle_area(p, cur, next);
            w[i] = self.corner_areas[i] / (a_prev * a_next);
            // grad_x A(x, a, b) = 0.5 (a_y - b_y, b_x - a_x).
            let g_prev = 0.5 * Vector::new(prev.y - cur.y, cur.x - prev.x);
            let g_next = 0.5 * Vector::new(cur.y - next.y, next.x - cur.x);
            r[i] = -(g_prev / a_prev + g_next / a_next);
        }
        let wsum: f64 = w.iter().sum();
        let lambda: Vec<f64> = w.iter().map(|&wi| wi / wsum).collect();
        let rbar: Vector = lambda
            .iter()
            .zip(&r)
            .map(|(&l, ri)| l * ri)
            .fold(Vector::zeros(), |acc, v| acc + v);
        let grad_lambda: Vec<Vector> = lambda
            .iter()
            .zip(&r)
            .map(|(&l, ri)| l * (ri - rbar))
            .collect();
        Ok(BasisEval {
            lambda,
            grad_lambda,
            psi: Vec::new(),
            grad_psi: Vec::new(),
            vertex: Vec::new(),
            grad_vertex: Vec::new(),
        })
    }

    /// Full serendipity evaluation: vertex functions and mid-edge bubbles,
    /// with gradients, at a strictly interior point.
    pub fn eval(&self, p: Point) -> Result<BasisEval> {
        let mut out = self.wachspress(p)?;
        let n = self.polygon.len();
        let m = 2 * n;

        // Intermediate functions and their gradients.
        let mut xi = vec![0.0; m];
        let mut grad_xi = vec![Vector::zeros(); m];
        for i in 0..n {
            xi[i] = out.lambda[i] * out.lambda[i];
            grad_xi[i] = 2.0 * out.lambda[i] * out.grad_lambda[i];
        }
        for k in 0..n {
            let j = (k + 1) % n;
            xi[n + k] = out.lambda[k] * out.lambda[j];
            grad_xi[n + k] =
                out.lambda[k] * out.grad_lambda[j] + out.lambda[j] * out.grad_lambda[k];
        }
        for (a, b, coeffs) in &self.distant {
            let w = out.lambda[*a] * out.lambda[*b];
            let gw = out.lambda[*a] * out.grad_lambda[*b] + out.lambda[*b] * out.grad_lambda[*a];
            for r in 0..m {
                let c = coeffs[r];
                if c != 0.0 {
                    xi[r] += c * w;
                    grad_xi[r] += c * gw;
                }
            }
        }

        let mut vertex = vec![0.0; n];
        let mut grad_vertex = vec![Vector::zeros(); n];
        let mut psi = vec![0.0; n];
        let mut grad_psi = vec![Vector::zeros(); n];
        for r in 0..m {
            let (val, grad) = {
                let mut v = 0.0;
                let mut g = Vector::zeros();
                for c in 0..m {
                    let coef = self.seren_coef[(c, r)];
                    if coef != 0.0 {
                        v += coef * xi[c];
                        g += coef * grad_xi[c];
                    }
                }
                (v, g)
            };
            if r < n {
                vertex[r] = val;
                grad_vertex[r] = grad;
            } else {
                psi[r - n] = val;
                grad_psi[r - n] = grad;
            }
        }
        out.vertex = vertex;
        out.grad_vertex = grad_vertex;
        out.psi = psi;
        out.grad_psi = grad_psi;
        Ok(out)
    }
}

/// Wachspress coordinates at a single point (one-shot convenience form).
pub fn wachspress(polygon: &[Point], point: Point) -> Result<BasisEval> {
    PolygonBasis::new(polygon)?.wachspress(point)
}

/// Serendipity basis at a single point (one-shot convenience form).
pub fn serendipity(polygon: &[Point], point: Point) -> Result<BasisEval> {
    PolygonBasis::new(polygon)?.eval(point)
}

/// Draws `count` random points with inward distance at least `margin`,
/// deterministic in `seed`.
pub fn random_interior_points(
    polygon: &[Point],
    count: usize,
    margin: f64,
    seed: u64,
) -> Vec<Point> {
    let (lo, hi) = geometry::bounding_box(polygon);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = Vec::with_capacity(count);
    while pts.len() < count {
        let p = Point::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y));
        if inward_distance(polygon, p) > margin {
            pts.push(p);
        }
    }
    pts
}

/// Compares analytic gradients of a basis-like function set against central
/// finite differences at random interior points; returns the maximum
/// relative deviation. The deviation at a point is normalized by the largest
/// gradient magnitude among the functions there.
pub fn gradient_check<F>(basis_fn: F, polygon: &[Point], npoints: usize) -> Result<f64>
where
    F: Fn(Point) -> Result<(Vec<f64>, Vec<Vector>)>,
{
    if npoints < 1 {
        return Err(Error::invalid_argument("npoints must be >= 1"));
    }
    let diam = diameter(polygon);
    let step = 1e-6 * diam;
    // Keep the finite-difference stencil interior.
    let margin = 10.0 * step + 1e-3 * diam;
    let points = random_interior_points(polygon, npoints, margin, 0x9d5f_c0de);
    let mut worst: f64 = 0.0;
    for p in points {
        let (_, grads) = basis_fn(p)?;
        let (vxp, _) = basis_fn(Point::new(p.x + step, p.y))?;
        let (vxm, _) = basis_fn(Point::new(p.x - step, p.y))?;
        let (vyp, _) = basis_fn(Point::new(p.x, p.y + step))?;
        let (vym, _) = basis_fn(Point::new(p.x, p.y - step))?;
        let scale = grads
            .iter()
            .map(|g| g.norm())
            .fold(0.0_f64, f64::max)
            .max(1e-12 / diam);
        for (i, g) in grads.iter().enumerate() {
            let fd = Vector::new(
                (vxp[i] - vxm[i]) / (2.0 * step),
                (vyp[i] - vym[i]) / (2.0 * step),
            );
            worst = worst.max((fd - g).norm() / scale);
        }
    }
    Ok(worst)
}

/// Convenience: FD check of the Wachspress gradients.
pub fn wachspress_gradient_check(polygon: &[Point], npoints: usize) -> Result<f64> {
    let basis = PolygonBasis::new(polygon)?;
    gradient_check(
        |p| basis.wachspress(p).map(|e| (e.lambda, e.grad_lambda)),
        polygon,
        npoints,
    )
}

/// Convenience: FD check of the full serendipity set (vertex + mid-edge).
pub fn serendipity_gradient_check(polygon: &[Point], npoints: usize) -> Result<f64> {
    let basis = PolygonBasis::new(polygon)?;
    gradient_check(
        |p| {
            basis.eval(p).map(|e| {
                let mut vals = e.vertex;
                vals.extend(e.psi);
                let mut grads = e.grad_vertex;
                grads.extend(e.grad_psi);
                (vals, grads)
            })
        },
        polygon,
        npoints,
    )
}

/// Generates a random convex CCW polygon with `n` vertices, unit scale,
/// deterministic in `seed`. Vertices are drawn as points on a randomly
/// perturbed circle sorted by angle, rejecting shapes with nearly straight
/// corners so element geometry stays well conditioned.
pub fn random_convex_polygon(n: usize, seed: u64) -> Vec<Point> {
    assert!(n >= 3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = 2.0 * std::f64::consts::PI / n as f64;
    loop {
        let angles: Vec<f64> = (0..n)
            .map(|i| base * (i as f64 + rng.gen_range(-0.25..0.25)))
            .collect();
        let poly: Vec<Point> = angles
            .iter()
            .map(|&t| {
                let r = rng.gen_range(0.9..1.0);
                Point::new(r * t.cos(), r * t.sin())
            })
            .collect();
        let diam = diameter(&poly);
        // Flat corners put zeros of the Wachspress adjoint right next to the
        // boundary, which ruins quadrature convergence; keep them bounded.
        if geometry::is_convex_ccw(&poly, 1e-12)
            && min_corner_sine(&poly) > 0.4
            && min_edge_length(&poly) > 0.1 * diam
        {
            return poly;
        }
    }
}

fn min_edge_length(poly: &[Point]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| (poly[(i + 1) % n] - poly[i]).norm())
        .fold(f64::INFINITY, f64::min)
}

fn min_corner_sine(poly: &[Point]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| {
            let e0 = (poly[i] - poly[(i + n - 1) % n]).normalize();
            let e1 = (poly[(i + 1) % n] - poly[i]).normalize();
            cross(e0, e1).abs()
        })
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn unit_square() -> Vec<Point> {
        vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ]
    }

    fn regular_ngon(n: usize) -> Vec<Point> {
        (0..n)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                Point::new(t.cos(), t.sin())
            })
            .collect()
    }

    #[test]
    fn square_center_is_symmetric() {
        let e = wachspress(&unit_square(), Point::new(0.5, 0.5)).unwrap();
        for l in &e.lambda {
            assert_relative_eq!(*l, 0.25, epsilon = 1e-14);
        }
    }

    #[test]
    fn square_recovers_bilinear() {
        // On squares the Wachspress coordinates reduce to the bilinear maps.
        let sq = unit_square();
        let basis = PolygonBasis::new(&sq).unwrap();
        let pts = random_interior_points(&sq, 20, 1e-3, 7);
        for p in pts {
            let e = basis.wachspress(p).unwrap();
            let (x, y) = (p.x, p.y);
            let exact = [(1.0 - x) * (1.0 - y), x * (1.0 - y), x * y, (1.0 - x) * y];
            for (l, ex) in e.lambda.iter().zip(exact) {
                assert_relative_eq!(*l, ex, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn pentagon_centroid_symmetry() {
        let pent = regular_ngon(5);
        let e = wachspress(&pent, Point::new(0.0, 0.0)).unwrap();
        for l in &e.lambda {
            assert_relative_eq!(*l, 0.2, epsilon = 1e-13);
        }
    }

    #[test]
    fn partition_of_unity_and_linear_completeness() {
        for n in 3..=10 {
            let poly = random_convex_polygon(n, 100 + n as u64);
            let basis = PolygonBasis::new(&poly).unwrap();
            for p in random_interior_points(&poly, 10, 1e-6, n as u64) {
                let e = basis.wachspress(p).unwrap();
                let sum: f64 = e.lambda.iter().sum();
                assert_relative_eq!(sum, 1.0, epsilon = 1e-12);
                let mut rec = Vector::zeros();
                let mut gsum = Vector::zeros();
                for (i, &l) in e.lambda.iter().enumerate() {
                    assert!(l >= 0.0);
                    rec += l * poly[i].coords;
                    gsum += e.grad_lambda[i];
                }
                let diam = diameter(&poly);
                assert!((rec - p.coords).norm() < 1e-12 * diam);
                assert!(gsum.norm() < 1e-10 / (0.1 * diam));
            }
        }
    }

    #[test]
    fn edge_trace_is_linear() {
        // lambda restricted to an edge is linear in arc length.
        let poly = random_convex_polygon(6, 11);
        let basis = PolygonBasis::new(&poly).unwrap();
        let diam = diameter(&poly);
        let c = geometry::centroid(&poly);
        for k in 0..poly.len() {
            let a = poly[k];
            let b = poly[(k + 1) % poly.len()];
            for &t in &[0.2, 0.37, 0.5, 0.81] {
                let edge_pt = a + t * (b - a);
                // Offset inward; the trace limit is approached smoothly.
                let p = edge_pt + 1e-9 * diam * (c - edge_pt).normalize();
                let e = basis.wachspress(p).unwrap();
                for (i, &l) in e.lambda.iter().enumerate() {
                    let expected = if i == k {
                        1.0 - t
                    } else if i == (k + 1) % poly.len() {
                        t
                    } else {
                        0.0
                    };
                    assert!(
                        (l - expected).abs() < 1e-6,
                        "edge {k} t {t} fn {i}: {l} vs {expected}"
                    );
                }
            }
        }
    }

    #[test]
    fn serendipity_lagrange_property() {
        let hex = regular_ngon(6);
        let basis = PolygonBasis::new(&hex).unwrap();
        let diam = diameter(&hex);
        let c = Point::new(0.0, 0.0);
        let n = hex.len();
        // Near-vertex and near-midpoint probes (exact nodes are on the
        // boundary where the rational functions are singular).
        for j in 0..n {
            let node = hex[j];
            let p = node + 1e-9 * diam * (c - node).normalize();
            let e = basis.eval(p).unwrap();
            for k in 0..n {
                assert!(e.psi[k].abs() < 1e-6, "psi_{k} at vertex {j}: {}", e.psi[k]);
                let expect = if k == j { 1.0 } else { 0.0 };
                assert!((e.vertex[k] - expect).abs() < 1e-6);
            }
        }
        for k in 0..n {
            let mid = Point::from(0.5 * (hex[k].coords + hex[(k + 1) % n].coords));
            let p = mid + 1e-9 * diam * (c - mid).normalize();
            let e = basis.eval(p).unwrap();
            for m in 0..n {
                let expect = if m == k { 1.0 } else { 0.0 };
                assert!((e.psi[m] - expect).abs() < 1e-6);
                assert!(e.vertex[m].abs() < 1e-6);
            }
        }
    }

    #[test]
    fn serendipity_square_bubble_trace() {
        // On the unit square, psi_k along its own edge is the 1D quadratic
        // bubble 4 s (1 - s) and vanishes on the opposite edge.
        let sq = unit_square();
        let basis = PolygonBasis::new(&sq).unwrap();
        for &t in &[0.1, 0.25, 0.5, 0.75, 0.9] {
            let p = Point::new(t, 1e-9);
            let e = basis.eval(p).unwrap();
            assert!((e.psi[0] - 4.0 * t * (1.0 - t)).abs() < 1e-6);
            let p_opp = Point::new(t, 1.0 - 1e-9);
            let e_opp = basis.eval(p_opp).unwrap();
            assert!(e_opp.psi[0].abs() < 1e-6);
        }
    }

    #[test]
    fn serendipity_interior_quadratic_reproduction() {
        // The full set reproduces an arbitrary quadratic everywhere inside,
        // not just on edge traces: values and gradients.
        let q = |p: Point| 1.0 + 2.0 * p.x - p.y + 0.5 * p.x * p.x - 1.5 * p.x * p.y + p.y * p.y;
        let gq = |p: Point| Vector::new(2.0 + p.x - 1.5 * p.y, -1.0 - 1.5 * p.x + 2.0 * p.y);
        for n in [3usize, 4, 5, 6, 8] {
            let poly = random_convex_polygon(n, 70 + n as u64);
            let basis = PolygonBasis::new(&poly).unwrap();
            let diam = diameter(&poly);
            for p in random_interior_points(&poly, 8, 1e-3, 77 + n as u64) {
                let e = basis.eval(p).unwrap();
                let mut val = 0.0;
                let mut grad = Vector::zeros();
                for i in 0..n {
                    val += e.vertex[i] * q(poly[i]);
                    grad += e.grad_vertex[i] * q(poly[i]);
                }
                for k in 0..n {
                    let mid = Point::from(0.5 * (poly[k].coords + poly[(k + 1) % n].coords));
                    val += e.psi[k] * q(mid);
                    grad += e.grad_psi[k] * q(mid);
                }
                assert!(
                    (val - q(p)).abs() < 1e-9 * q(p).abs().max(1.0),
                    "n {n} at {p:?}: {val} vs {}",
                    q(p)
                );
                assert!(
                    (grad - gq(p)).norm() < 1e-8 * gq(p).norm().max(1.0 / diam),
                    "n {n} gradient at {p:?}: {grad:?} vs {:?}",
                    gq(p)
                );
            }
        }
    }

    #[test]
    fn serendipity_edge_quadratic_reproduction() {
        // The full set reproduces 1 + 2s + 3s^2 along each edge.
        for n in [4usize, 5, 7] {
            let poly = random_convex_polygon(n, 40 + n as u64);
            let basis = PolygonBasis::new(&poly).unwrap();
            let c = geometry::centroid(&poly);
            let diam = diameter(&poly);
            for k in 0..n {
                let a = poly[k];
                let b = poly[(k + 1) % n];
                let len = (b - a).norm();
                let q = |s: f64| 1.0 + 2.0 * s + 3.0 * s * s;
                // Nodal values of the target in arc length along edge k; the
                // function is extended to all nodes by taking arc length
                // along edge k's line (only edge-k nodes matter on the
                // trace, the rest vanish there).
                let sval = |p: Point| (p - a).dot(&(b - a)) / len;
                for &t in &[0.15, 0.4, 0.65, 0.9] {
                    let edge_pt = a + t * (b - a);
                    let p = edge_pt + 2e-9 * diam * (c - edge_pt).normalize();
                    let e = basis.eval(p).unwrap();
                    let mut val = 0.0;
                    for i in 0..n {
                        val += e.vertex[i] * q(sval(poly[i]));
                    }
                    for m in 0..n {
                        let mid = Point::from(
                            0.5 * (poly[m].coords + poly[(m + 1) % n].coords),
                        );
                        val += e.psi[m] * q(sval(mid));
                    }
                    let exact = q(t * len);
                    assert!(
                        (val - exact).abs() < 1e-6 * exact.abs().max(1.0),
                        "n {n} edge {k} t {t}: {val} vs {exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn gradient_checks_pass() {
        assert!(wachspress_gradient_check(&unit_square(), 20).unwrap() < 1e-6);
        let hex = random_convex_polygon(6, 3);
        assert!(serendipity_gradient_check(&hex, 20).unwrap() < 1e-6);
    }

    #[test]
    fn partition_gradient_sum_is_exactly_zero_fn() {
        // The gradients of a partition of unity must sum to (numerical) zero.
        let poly = random_convex_polygon(5, 9);
        let basis = PolygonBasis::new(&poly).unwrap();
        for p in random_interior_points(&poly, 10, 0.05, 3) {
            let e = basis.wachspress(p).unwrap();
            let g = e
                .grad_lambda
                .iter()
                .fold(Vector::zeros(), |acc, v| acc + v);
            assert!(g.norm() < 1e-11, "gradient sum {g:?}");
        }
    }

    #[test]
    fn rejects_boundary_and_nonconvex() {
        let sq = unit_square();
        assert!(wachspress(&sq, Point::new(0.0, 0.5)).is_err());
        assert!(wachspress(&sq, Point::new(2.0, 0.5)).is_err());
        let nonconvex = vec![
            Point::new(0.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(0.1, 0.1),
            Point::new(0.0, 2.0),
        ];
        assert!(PolygonBasis::new(&nonconvex).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn pou_and_completeness_random(n in 3usize..9, seed in 0u64..1000) {
            let poly = random_convex_polygon(n, seed);
            let basis = PolygonBasis::new(&poly).unwrap();
            let p = random_interior_points(&poly, 1, 1e-6, seed ^ 0xabcd)[0];
            let e = basis.wachspress(p).unwrap();
            let sum: f64 = e.lambda.iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-12);
            let mut rec = Vector::zeros();
            for (i, &l) in e.lambda.iter().enumerate() {
                rec += l * poly[i].coords;
            }
            prop_assert!((rec - p.coords).norm() < 1e-11 * diameter(&poly));
        }
    }
}
