//! The n-sided Reissner-Mindlin plate element.
//!
//! Kinematics per node: transverse deflection `w` and rotations `beta_x`,
//! `beta_y` (shear strain convention `gamma = beta + grad w`). Rotations are
//! interpolated with Wachspress coordinates plus a hierarchical tangential
//! mid-edge rotation `dbeta_k` on every edge; an assumed constant tangential
//! shear strain per edge ties `dbeta_k` back to the nodal unknowns through a
//! discrete Mindlin constraint. The elimination keeps the element at
//! 3 dofs/node, locking-free in the thin limit and of proper rank.

use crate::basis::{BasisEval, PolygonBasis};
use crate::geometry::{Point, Vector};
use crate::quadrature::polygon_quadrature;
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector, Matrix2, Matrix3};

/// Primal field sample: deflection, rotations and their first derivatives.
#[derive(Debug, Clone, Copy)]
pub struct FieldSample {
    pub w: f64,
    pub beta: Vector,
    pub grad_w: Vector,
    /// Rows are the gradients of `beta_x` and `beta_y`.
    pub grad_beta: Matrix2<f64>,
}

/// Unknowns per mesh node: `(w, beta_x, beta_y)`.
pub const DOFS_PER_NODE: usize = 3;

/// Quadrature exactness used for element stiffness and load integration.
pub const DEFAULT_QUADRATURE_DEGREE: usize = 4;

/// Homogeneous isotropic plate material.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateMaterial {
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
    pub thickness: f64,
    pub shear_correction: f64,
}

impl PlateMaterial {
    /// Material with the conventional shear correction factor 5/6.
    pub fn new(youngs_modulus: f64, poisson_ratio: f64, thickness: f64) -> Result<Self> {
        let m = Self {
            youngs_modulus,
            poisson_ratio,
            thickness,
            shear_correction: 5.0 / 6.0,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.youngs_modulus > 0.0) {
            return Err(Error::invalid_argument("Young's modulus must be positive"));
        }
        if !(self.poisson_ratio > -1.0 && self.poisson_ratio < 0.5) {
            return Err(Error::invalid_argument(
                "Poisson ratio must lie in (-1, 0.5)",
            ));
        }
        if !(self.thickness > 0.0) {
            return Err(Error::invalid_argument("thickness must be positive"));
        }
        if !(self.shear_correction > 0.0) {
            return Err(Error::invalid_argument(
                "shear correction factor must be positive",
            ));
        }
        Ok(())
    }

    /// Flexural rigidity `D_b = E h^3 / (12 (1 - nu^2))`.
    pub fn bending_rigidity(&self) -> f64 {
        self.youngs_modulus * self.thickness.powi(3) / (12.0 * (1.0 - self.poisson_ratio.powi(2)))
    }

    /// Shear rigidity `D_s = kappa G h` with `G = E / (2 (1 + nu))`.
    pub fn shear_rigidity(&self) -> f64 {
        let g = self.youngs_modulus / (2.0 * (1.0 + self.poisson_ratio));
        self.shear_correction * g * self.thickness
    }

    /// Moment-curvature matrix relating `(k_xx, k_yy, k_xy)` to moments.
    pub fn bending_moduli(&self) -> Matrix3<f64> {
        let nu = self.poisson_ratio;
        self.bending_rigidity()
            * Matrix3::new(1.0, nu, 0.0, nu, 1.0, 0.0, 0.0, 0.0, 0.5 * (1.0 - nu))
    }

    /// Shear force-strain matrix (isotropic).
    pub fn shear_moduli(&self) -> Matrix2<f64> {
        Matrix2::identity() * self.shear_rigidity()
    }
}

/// Directed edge data for one polygon; edge `k` joins vertices `k` and
/// `(k + 1) % n`.
#[derive(Debug, Clone)]
pub struct EdgeGeometry {
    pub length: Vec<f64>,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
    /// Shear influence number `alpha_k = 12 D_b / (D_s l_k^2)`; vanishes in
    /// the thin limit, which recovers the discrete Kirchhoff constraint.
    pub alpha: Vec<f64>,
}

/// Edge lengths, direction cosines and shear influence numbers.
pub fn edge_geometry(polygon: &[Point], material: &PlateMaterial) -> Result<EdgeGeometry> {
    let n = polygon.len();
    let ratio = 12.0 * material.bending_rigidity() / material.shear_rigidity();
    let mut length = Vec::with_capacity(n);
    let mut cos = Vec::with_capacity(n);
    let mut sin = Vec::with_capacity(n);
    let mut alpha = Vec::with_capacity(n);
    for k in 0..n {
        let e = polygon[(k + 1) % n] - polygon[k];
        let l = e.norm();
        if l <= 0.0 {
            return Err(Error::invalid_argument(format!(
                "edge {k} has zero length"
            )));
        }
        length.push(l);
        cos.push(e.x / l);
        sin.push(e.y / l);
        alpha.push(ratio / (l * l));
    }
    Ok(EdgeGeometry {
        length,
        cos,
        sin,
        alpha,
    })
}

/// Per-element context: basis, edge data and the edge-variable elimination
/// operator. Geometry and material are fixed at construction.
#[derive(Debug, Clone)]
pub struct ElementContext {
    basis: PolygonBasis,
    edges: EdgeGeometry,
    /// Corner sines `delta_i = C_k S_m - S_k C_m` with `k` the edge leaving
    /// node `i` and `m` the edge arriving at it.
    corner_delta: Vec<f64>,
    /// `n x 3n` operator expressing the mid-edge rotations from nodal dofs.
    an: DMatrix<f64>,
}

impl ElementContext {
    pub fn new(polygon: &[Point], material: &PlateMaterial) -> Result<Self> {
        material.validate()?;
        let basis = PolygonBasis::new(polygon)?;
        let edges = edge_geometry(polygon, material)?;
        let n = polygon.len();

        let mut corner_delta = Vec::with_capacity(n);
        for i in 0..n {
            let k = i;
            let m = (i + n - 1) % n;
            let d = edges.cos[k] * edges.sin[m] - edges.sin[k] * edges.cos[m];
            if d.abs() < 1e-10 {
                return Err(Error::invalid_argument(format!(
                    "corner {i} is degenerate (adjacent edges nearly collinear)"
                )));
            }
            corner_delta.push(d);
        }

        let an = constraint_operator(&edges);
        Ok(Self {
            basis,
            edges,
            corner_delta,
            an,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.basis.num_vertices()
    }

    pub fn polygon(&self) -> &[Point] {
        self.basis.polygon()
    }

    pub fn basis(&self) -> &PolygonBasis {
        &self.basis
    }

    pub fn edges(&self) -> &EdgeGeometry {
        &self.edges
    }

    /// The `n x 3n` elimination operator `A_n` with `dbeta = A_n u`.
    pub fn constraint_operator(&self) -> &DMatrix<f64> {
        &self.an
    }

    /// Curvature operator from the nodal rotations alone (`3 x 3n`).
    fn bending_b_beta(&self, eval: &BasisEval) -> DMatrix<f64> {
        let n = self.num_nodes();
        let mut b = DMatrix::zeros(3, DOFS_PER_NODE * n);
        for i in 0..n {
            let g = eval.grad_lambda[i];
            let c = DOFS_PER_NODE * i;
            b[(0, c + 1)] = g.x;
            b[(1, c + 2)] = g.y;
            b[(2, c + 1)] = g.y;
            b[(2, c + 2)] = g.x;
        }
        b
    }

    /// Curvature operator from the mid-edge rotations (`3 x n`).
    fn bending_b_dbeta(&self, eval: &BasisEval) -> DMatrix<f64> {
        let n = self.num_nodes();
        let mut b = DMatrix::zeros(3, n);
        for k in 0..n {
            let g = eval.grad_psi[k];
            let (c, s) = (self.edges.cos[k], self.edges.sin[k]);
            b[(0, k)] = c * g.x;
            b[(1, k)] = s * g.y;
            b[(2, k)] = c * g.y + s * g.x;
        }
        b
    }

    /// Shear operator from the mid-edge rotations (`2 x n`): edge strains
    /// `gamma_k = -(2/3) alpha_k dbeta_k` mapped to nodal shear vectors and
    /// interpolated with the Wachspress coordinates.
    pub fn shear_b_dbeta(&self, eval: &BasisEval) -> DMatrix<f64> {
        let n = self.num_nodes();
        let mut b = DMatrix::zeros(2, n);
        for i in 0..n {
            let k = i; // edge leaving node i
            let m = (i + n - 1) % n; // edge arriving at node i
            let li = eval.lambda[i] / self.corner_delta[i];
            let (ck, sk) = (self.edges.cos[k], self.edges.sin[k]);
            let (cm, sm) = (self.edges.cos[m], self.edges.sin[m]);
            let (fk, fm) = (
                -(2.0 / 3.0) * self.edges.alpha[k],
                -(2.0 / 3.0) * self.edges.alpha[m],
            );
            // [gx; gy]_i = 1/delta_i [sm, -sk; -cm, ck] [gamma_k; gamma_m]
            b[(0, k)] += li * sm * fk;
            b[(1, k)] += li * (-cm) * fk;
            b[(0, m)] += li * (-sk) * fm;
            b[(1, m)] += li * ck * fm;
        }
        b
    }

    /// Full curvature-displacement matrix (`3 x 3n`).
    pub fn bending_b(&self, eval: &BasisEval) -> DMatrix<f64> {
        self.bending_b_beta(eval) + self.bending_b_dbeta(eval) * &self.an
    }

    /// Full shear strain-displacement matrix (`2 x 3n`).
    pub fn shear_b(&self, eval: &BasisEval) -> DMatrix<f64> {
        self.shear_b_dbeta(eval) * &self.an
    }

    /// Element stiffness `K = int B_b' D_b B_b + B_s' D_s B_s dA`.
    pub fn stiffness(&self, material: &PlateMaterial, degree: usize) -> Result<DMatrix<f64>> {
        let n = self.num_nodes();
        let db = material.bending_moduli();
        let ds = material.shear_moduli();
        let quad = polygon_quadrature(self.polygon(), degree)?;
        let mut k = DMatrix::zeros(DOFS_PER_NODE * n, DOFS_PER_NODE * n);
        for (p, w) in quad.iter() {
            let eval = self.basis.eval(p)?;
            let bb = self.bending_b(&eval);
            let bs = self.shear_b(&eval);
            k += w * (bb.transpose() * db * bb + bs.transpose() * ds * bs);
        }
        Ok(k)
    }

    /// Consistent load vector for a transverse pressure `q(x, y)`; only the
    /// `w` dofs are loaded.
    pub fn load(&self, q: &dyn Fn(Point) -> f64, degree: usize) -> Result<DVector<f64>> {
        let n = self.num_nodes();
        let quad = polygon_quadrature(self.polygon(), degree)?;
        let mut f = DVector::zeros(DOFS_PER_NODE * n);
        for (p, w) in quad.iter() {
            let eval = self.basis.wachspress(p)?;
            let qw = w * q(p);
            for i in 0..n {
                f[DOFS_PER_NODE * i] += qw * eval.lambda[i];
            }
        }
        Ok(f)
    }

    /// Mid-edge rotations recovered from the element dof vector.
    pub fn delta_beta(&self, u: &DVector<f64>) -> DVector<f64> {
        &self.an * u
    }

    /// Deflection and rotations at an interior point, including the
    /// eliminated mid-edge rotation field.
    pub fn displacement(&self, p: Point, u: &DVector<f64>) -> Result<(f64, Vector)> {
        let n = self.num_nodes();
        let eval = self.basis.eval(p)?;
        let dbeta = self.delta_beta(u);
        let mut w = 0.0;
        let mut beta = Vector::zeros();
        for i in 0..n {
            let c = DOFS_PER_NODE * i;
            w += eval.lambda[i] * u[c];
            beta += eval.lambda[i] * Vector::new(u[c + 1], u[c + 2]);
        }
        for k in 0..n {
            let tau = Vector::new(self.edges.cos[k], self.edges.sin[k]);
            beta += eval.psi[k] * dbeta[k] * tau;
        }
        Ok((w, beta))
    }

    /// Deflection gradient at an interior point (Wachspress part only).
    pub fn deflection_gradient(&self, p: Point, u: &DVector<f64>) -> Result<Vector> {
        let n = self.num_nodes();
        let eval = self.basis.wachspress(p)?;
        let mut g = Vector::zeros();
        for i in 0..n {
            g += eval.grad_lambda[i] * u[DOFS_PER_NODE * i];
        }
        Ok(g)
    }

    /// Deflection, rotations and their first derivatives at a basis
    /// evaluation point, reusing a precomputed mid-edge rotation vector.
    pub fn field_sample(
        &self,
        eval: &BasisEval,
        u: &DVector<f64>,
        dbeta: &DVector<f64>,
    ) -> FieldSample {
        let n = self.num_nodes();
        let mut s = FieldSample {
            w: 0.0,
            beta: Vector::zeros(),
            grad_w: Vector::zeros(),
            grad_beta: Matrix2::zeros(),
        };
        for i in 0..n {
            let c = DOFS_PER_NODE * i;
            s.w += eval.lambda[i] * u[c];
            s.grad_w += eval.grad_lambda[i] * u[c];
            let b = Vector::new(u[c + 1], u[c + 2]);
            s.beta += eval.lambda[i] * b;
            for (row, comp) in [b.x, b.y].into_iter().enumerate() {
                s.grad_beta[(row, 0)] += eval.grad_lambda[i].x * comp;
                s.grad_beta[(row, 1)] += eval.grad_lambda[i].y * comp;
            }
        }
        for k in 0..n {
            let tau = Vector::new(self.edges.cos[k], self.edges.sin[k]);
            s.beta += eval.psi[k] * dbeta[k] * tau;
            for (row, comp) in [tau.x, tau.y].into_iter().enumerate() {
                s.grad_beta[(row, 0)] += eval.grad_psi[k].x * dbeta[k] * comp;
                s.grad_beta[(row, 1)] += eval.grad_psi[k].y * dbeta[k] * comp;
            }
        }
        s
    }

    /// Curvatures `(k_xx, k_yy, k_xy)` and shear strains `(g_x, g_y)` at an
    /// interior point.
    pub fn strains(&self, p: Point, u: &DVector<f64>) -> Result<(nalgebra::Vector3<f64>, Vector)> {
        let eval = self.basis.eval(p)?;
        let kappa = self.bending_b(&eval) * u;
        let gamma = self.shear_b(&eval) * u;
        Ok((
            nalgebra::Vector3::new(kappa[0], kappa[1], kappa[2]),
            Vector::new(gamma[0], gamma[1]),
        ))
    }
}

/// The discrete Mindlin constraint operator `A_n` (`n x 3n`): each edge's
/// mid-edge rotation expressed from the nodal dofs of its end points,
///
/// `dbeta_k = -[w_j - w_i + (l_k/2)(beta_si + beta_sj)] / ((2/3) l_k (1 + alpha_k))`.
pub fn constraint_operator(edges: &EdgeGeometry) -> DMatrix<f64> {
    let n = edges.length.len();
    let mut an = DMatrix::zeros(n, DOFS_PER_NODE * n);
    for k in 0..n {
        let i = k;
        let j = (k + 1) % n;
        let l = edges.length[k];
        let (c, s) = (edges.cos[k], edges.sin[k]);
        let d = (2.0 / 3.0) * l * (1.0 + edges.alpha[k]);
        an[(k, DOFS_PER_NODE * i)] = 1.0 / d;
        an[(k, DOFS_PER_NODE * j)] = -1.0 / d;
        let r = -0.5 * l / d;
        an[(k, DOFS_PER_NODE * i + 1)] = r * c;
        an[(k, DOFS_PER_NODE * i + 2)] = r * s;
        an[(k, DOFS_PER_NODE * j + 1)] = r * c;
        an[(k, DOFS_PER_NODE * j + 2)] = r * s;
    }
    an
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{random_convex_polygon, random_interior_points};
    use approx::assert_relative_eq;

    fn material(h: f64) -> PlateMaterial {
        PlateMaterial::new(10.92e6, 0.3, h).unwrap()
    }

    fn unit_square() -> Vec<Point> {
        vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ]
    }

    #[test]
    fn rigidity_values() {
        let m = material(0.1);
        assert_relative_eq!(
            m.bending_rigidity(),
            10.92e6 * 1e-3 / (12.0 * 0.91),
            max_relative = 1e-12
        );
        assert_relative_eq!(
            m.shear_rigidity(),
            (5.0 / 6.0) * 10.92e6 / 2.6 * 0.1,
            max_relative = 1e-12
        );
    }

    /// Closed-form shear operator for quadrilaterals and pentagons: nodal
    /// shear vectors from the two incident edge strains, written out entry by
    /// entry with explicit direction cosines.
    fn reference_shear_b_dbeta(ctx: &ElementContext, eval: &BasisEval) -> DMatrix<f64> {
        let n = ctx.num_nodes();
        let e = ctx.edges();
        let mut b = DMatrix::zeros(2, n);
        for k in 0..n {
            // Edge k meets node i = k (where it is the outgoing edge, paired
            // with incoming edge m) and node j = k + 1 (where it is the
            // incoming edge, paired with outgoing edge o).
            let i = k;
            let j = (k + 1) % n;
            let m = (i + n - 1) % n;
            let o = j;
            let ai = e.cos[i] * e.sin[m] - e.sin[i] * e.cos[m];
            let aj = e.cos[o] * e.sin[k] - e.sin[o] * e.cos[k];
            let col_x = e.sin[m] / ai * eval.lambda[i] - e.sin[o] / aj * eval.lambda[j];
            let col_y = -e.cos[m] / ai * eval.lambda[i] + e.cos[o] / aj * eval.lambda[j];
            b[(0, k)] = -(2.0 / 3.0) * e.alpha[k] * col_x;
            b[(1, k)] = -(2.0 / 3.0) * e.alpha[k] * col_y;
        }
        b
    }

    #[test]
    fn shear_operator_matches_closed_form() {
        for seed in 0..20u64 {
            let n = if seed % 2 == 0 { 4 } else { 5 };
            let poly = random_convex_polygon(n, 100 + seed);
            let ctx = ElementContext::new(&poly, &material(0.12)).unwrap();
            for p in random_interior_points(&poly, 5, 0.05, seed) {
                let eval = ctx.basis().wachspress(p).unwrap();
                let got = ctx.shear_b_dbeta(&eval);
                let want = reference_shear_b_dbeta(&ctx, &eval);
                let denom = want.norm().max(1e-30);
                assert!(
                    (got - &want).norm() / denom < 1e-10,
                    "seed {seed}: shear operator mismatch"
                );
            }
        }
    }

    #[test]
    fn stiffness_is_symmetric() {
        let poly = random_convex_polygon(6, 3);
        let m = material(0.05);
        let ctx = ElementContext::new(&poly, &m).unwrap();
        let k = ctx.stiffness(&m, DEFAULT_QUADRATURE_DEGREE).unwrap();
        assert!((&k - k.transpose()).norm() / k.norm() < 1e-13);
    }

    /// Rigid movements `w = c - bx x - by y`, `beta = (bx, by)` carry no
    /// strain energy.
    #[test]
    fn rigid_modes_are_stress_free() {
        let poly = random_convex_polygon(5, 11);
        let m = material(0.1);
        let ctx = ElementContext::new(&poly, &m).unwrap();
        let k = ctx.stiffness(&m, DEFAULT_QUADRATURE_DEGREE).unwrap();
        let scale = k.norm();
        for (c, bx, by) in [(1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.3, -0.7, 0.4)] {
            let mut u = DVector::zeros(3 * poly.len());
            for (i, v) in poly.iter().enumerate() {
                u[3 * i] = c - bx * v.x - by * v.y;
                u[3 * i + 1] = bx;
                u[3 * i + 2] = by;
            }
            assert!((&k * &u).norm() < 1e-12 * scale * u.norm().max(1.0));
        }
    }

    #[test]
    fn rank_is_3n_minus_3() {
        for (n, seed) in [(3usize, 1u64), (4, 2), (5, 3), (6, 4), (8, 5)] {
            for h in [0.2, 0.01, 1e-5] {
                let poly = random_convex_polygon(n, seed);
                let m = material(h);
                let ctx = ElementContext::new(&poly, &m).unwrap();
                let k = ctx.stiffness(&m, DEFAULT_QUADRATURE_DEGREE).unwrap();
                let eig = k.symmetric_eigenvalues();
                let max = eig.iter().cloned().fold(0.0_f64, f64::max);
                let zero = eig.iter().filter(|&&e| e.abs() < 1e-10 * max).count();
                assert_eq!(zero, 3, "n={n} h={h}: expected exactly 3 zero modes");
            }
        }
    }

    /// A pure-bending (Kirchhoff) field with constant curvature is carried
    /// exactly: mid-edge rotations vanish, curvatures are exact and the shear
    /// strain is zero.
    #[test]
    fn constant_curvature_is_exact() {
        let poly = random_convex_polygon(7, 21);
        let m = material(0.07);
        let ctx = ElementContext::new(&poly, &m).unwrap();
        // w = (x^2 + x y + y^2)/2, beta = -grad w.
        let mut u = DVector::zeros(3 * poly.len());
        for (i, v) in poly.iter().enumerate() {
            u[3 * i] = 0.5 * (v.x * v.x + v.x * v.y + v.y * v.y);
            u[3 * i + 1] = -(v.x + 0.5 * v.y);
            u[3 * i + 2] = -(v.y + 0.5 * v.x);
        }
        assert!(ctx.delta_beta(&u).norm() < 1e-12);
        for p in random_interior_points(&poly, 6, 0.05, 9) {
            let (kappa, gamma) = ctx.strains(p, &u).unwrap();
            assert_relative_eq!(kappa[0], -1.0, epsilon = 1e-10);
            assert_relative_eq!(kappa[1], -1.0, epsilon = 1e-10);
            assert_relative_eq!(kappa[2], -1.0, epsilon = 1e-10);
            assert!(gamma.norm() < 1e-12);
        }
    }

    /// With a fixed deformation the shear energy fraction must vanish as the
    /// thickness goes to zero (no shear locking at the element level).
    #[test]
    fn shear_energy_vanishes_in_thin_limit() {
        let poly = random_convex_polygon(5, 33);
        let mut u = DVector::zeros(3 * poly.len());
        for (i, v) in poly.iter().enumerate() {
            u[3 * i] = v.x * v.y + 0.3 * v.x;
            u[3 * i + 1] = 0.2 - v.y;
            u[3 * i + 2] = 0.7 * v.x;
        }
        let mut prev = f64::INFINITY;
        for h in [0.1, 0.01, 0.001] {
            let m = material(h);
            let ctx = ElementContext::new(&poly, &m).unwrap();
            let quad = polygon_quadrature(&poly, 6).unwrap();
            let (mut eb, mut es) = (0.0, 0.0);
            let db = m.bending_moduli();
            let ds = m.shear_moduli();
            for (p, w) in quad.iter() {
                let eval = ctx.basis().eval(p).unwrap();
                let kb = &ctx.bending_b(&eval) * &u;
                let ks = &ctx.shear_b(&eval) * &u;
                eb += w * (kb.transpose() * db * &kb)[0];
                es += w * (ks.transpose() * ds * &ks)[0];
            }
            let frac = es / (eb + es);
            assert!(frac < prev, "shear fraction must decrease with h");
            prev = frac;
        }
        assert!(prev < 1e-4, "thin-limit shear fraction {prev}");
    }

    #[test]
    fn stiffness_quadrature_is_converged() {
        for seed in [2u64, 14, 27] {
            let n = 3 + (seed % 5) as usize;
            let poly = random_convex_polygon(n, seed);
            let m = material(0.03);
            let ctx = ElementContext::new(&poly, &m).unwrap();
            let k4 = ctx.stiffness(&m, DEFAULT_QUADRATURE_DEGREE).unwrap();
            let k8 = ctx.stiffness(&m, 8).unwrap();
            assert!((&k4 - &k8).norm() / k8.norm() < 1e-8, "seed {seed}");
        }
    }

    #[test]
    fn uniform_load_preserves_resultant() {
        let poly = unit_square();
        let m = material(0.1);
        let ctx = ElementContext::new(&poly, &m).unwrap();
        let f = ctx.load(&|_| 3.0, 2).unwrap();
        let total: f64 = (0..poly.len()).map(|i| f[3 * i]).sum();
        assert_relative_eq!(total, 3.0, epsilon = 1e-12);
        for i in 0..poly.len() {
            assert_eq!(f[3 * i + 1], 0.0);
            assert_eq!(f[3 * i + 2], 0.0);
        }
    }

    #[test]
    fn rejects_bad_material() {
        assert!(PlateMaterial::new(-1.0, 0.3, 0.1).is_err());
        assert!(PlateMaterial::new(1.0, 0.5, 0.1).is_err());
        assert!(PlateMaterial::new(1.0, 0.3, 0.0).is_err());
    }
}
