//! Global assembly, boundary conditions and the sparse solve.
//!
//! Dofs are ordered `(w, beta_x, beta_y)` per node. Hard simply supported
//! boundaries constrain the rotation component along the boundary tangent,
//! which is handled by rotating the nodal rotation dofs into
//! tangential/normal components before elimination. All Dirichlet data is
//! enforced by elimination (reduced free system), never by penalties.

use crate::element::{ElementContext, PlateMaterial, DEFAULT_QUADRATURE_DEGREE, DOFS_PER_NODE};
use crate::geometry::{Point, Vector};
use crate::mesh::PolyMesh;
use crate::{Error, Result};
use nalgebra::{DVector, Matrix2, Vector3};
use sprs::{CsMat, TriMat};
use std::collections::BTreeMap;

/// Dirichlet condition applied to a set of tagged boundary edges.
pub enum BoundaryCondition {
    /// `w = beta_x = beta_y = 0`.
    Clamped,
    /// `w = 0` and tangential rotation `beta_s = 0` (SS2); the normal
    /// rotation stays free. At corners where two non-parallel boundary
    /// tangents meet, both rotation components are constrained.
    HardSimplySupported,
    /// All three fields prescribed from the given function of position.
    PrescribedField(Box<dyn Fn(Point) -> [f64; 3] + Send + Sync>),
}

/// Boundary conditions keyed by boundary edge tag.
pub struct BoundaryConditions {
    by_tag: BTreeMap<String, BoundaryCondition>,
}

impl BoundaryConditions {
    pub fn new() -> Self {
        Self {
            by_tag: BTreeMap::new(),
        }
    }

    pub fn set(mut self, tag: &str, bc: BoundaryCondition) -> Self {
        self.by_tag.insert(tag.to_string(), bc);
        self
    }

    /// The same condition on every tagged boundary edge of the mesh.
    pub fn uniform(mesh: &PolyMesh, bc: BoundaryCondition) -> Self {
        let mut by_tag: BTreeMap<String, BoundaryCondition> = BTreeMap::new();
        for edge in mesh.boundary_edges() {
            if !by_tag.contains_key(&edge.tag) {
                by_tag.insert(
                    edge.tag.clone(),
                    match &bc {
                        BoundaryCondition::Clamped => BoundaryCondition::Clamped,
                        BoundaryCondition::HardSimplySupported => {
                            BoundaryCondition::HardSimplySupported
                        }
                        BoundaryCondition::PrescribedField(_) => unreachable!(),
                    },
                );
            }
        }
        Self { by_tag }
    }

    /// Prescribes the given field on the entire boundary.
    pub fn prescribed_everywhere(
        mesh: &PolyMesh,
        field: impl Fn(Point) -> [f64; 3] + Send + Sync + Clone + 'static,
    ) -> Self {
        let mut by_tag: BTreeMap<String, BoundaryCondition> = BTreeMap::new();
        for edge in mesh.boundary_edges() {
            by_tag
                .entry(edge.tag.clone())
                .or_insert_with(|| BoundaryCondition::PrescribedField(Box::new(field.clone())));
        }
        Self { by_tag }
    }
}

impl Default for BoundaryConditions {
    fn default() -> Self {
        Self::new()
    }
}

/// Per-dof constraint state in the (possibly rotated) nodal frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DofStatus {
    /// Free dof with its index in the reduced system.
    Free(usize),
    /// Eliminated dof with its prescribed value.
    Fixed(f64),
}

/// Mapping from mesh nodes to global/reduced dof indices, including the
/// nodal rotation frames used for hard simply supported boundaries.
#[derive(Debug, Clone)]
pub struct DofMap {
    status: Vec<DofStatus>,
    /// Per-node rotation of the `(beta_x, beta_y)` pair into the local
    /// `(beta_s, beta_n)` frame: `beta_phys = R * beta_local`.
    rotations: Vec<Option<Matrix2<f64>>>,
    num_free: usize,
}

impl DofMap {
    pub fn num_nodes(&self) -> usize {
        self.status.len() / DOFS_PER_NODE
    }

    pub fn num_dofs(&self) -> usize {
        self.status.len()
    }

    pub fn num_free(&self) -> usize {
        self.num_free
    }

    pub fn status(&self, node: usize, comp: usize) -> DofStatus {
        self.status[DOFS_PER_NODE * node + comp]
    }

    pub fn rotation(&self, node: usize) -> Option<&Matrix2<f64>> {
        self.rotations[node].as_ref()
    }

    /// Converts a solution vector in nodal local frames to physical
    /// `(w, beta_x, beta_y)` components.
    pub fn to_physical(&self, u_local: &DVector<f64>) -> DVector<f64> {
        let mut u = u_local.clone();
        for (node, rot) in self.rotations.iter().enumerate() {
            if let Some(r) = rot {
                let c = DOFS_PER_NODE * node;
                let b = r * Vector::new(u_local[c + 1], u_local[c + 2]);
                u[c + 1] = b.x;
                u[c + 2] = b.y;
            }
        }
        u
    }
}

/// Assembled (transformed, un-reduced) system plus constraint data.
pub struct AssembledSystem {
    pub mesh: PolyMesh,
    pub material: PlateMaterial,
    pub stiffness: CsMat<f64>,
    pub load: DVector<f64>,
    pub dof_map: DofMap,
    pub contexts: Vec<ElementContext>,
    pub warnings: Vec<String>,
}

/// Assembles stiffness, load and constraints for a transverse pressure `q`.
pub fn assemble(
    mesh: &PolyMesh,
    material: &PlateMaterial,
    q: &(dyn Fn(Point) -> f64 + Sync),
    bcs: &BoundaryConditions,
    degree: usize,
) -> Result<AssembledSystem> {
    material.validate()?;
    if degree < DEFAULT_QUADRATURE_DEGREE {
        return Err(Error::invalid_argument(
            "assembly quadrature degree must be at least 4",
        ));
    }

    let nn = mesh.num_nodes();
    let dof_map = build_dof_map(mesh, bcs)?;
    let mut warnings = Vec::new();
    if dof_map.num_free == dof_map.num_dofs() {
        warnings.push(
            "no Dirichlet constraints: the free system is singular (rigid modes)".to_string(),
        );
    }

    let mut contexts = Vec::with_capacity(mesh.num_elements());
    for e in 0..mesh.num_elements() {
        contexts.push(ElementContext::new(&mesh.element_polygon(e), material)?);
    }

    let mut tri = TriMat::new((DOFS_PER_NODE * nn, DOFS_PER_NODE * nn));
    let mut load = DVector::zeros(DOFS_PER_NODE * nn);
    for (e, ctx) in contexts.iter().enumerate() {
        let nodes = &mesh.elements()[e];
        let ke = ctx.stiffness(material, degree)?;
        let fe = ctx.load(q, degree)?;
        // Rotate element blocks into the nodal local frames.
        let en = nodes.len();
        for a in 0..en {
            let ga = nodes[a];
            let fa = rotate_in(
                dof_map.rotations[ga].as_ref(),
                Vector3::new(
                    fe[DOFS_PER_NODE * a],
                    fe[DOFS_PER_NODE * a + 1],
                    fe[DOFS_PER_NODE * a + 2],
                ),
            );
            for c in 0..DOFS_PER_NODE {
                load[DOFS_PER_NODE * ga + c] += fa[c];
            }
            for b in 0..en {
                let gb = nodes[b];
                let mut block = nalgebra::Matrix3::zeros();
                for i in 0..DOFS_PER_NODE {
                    for j in 0..DOFS_PER_NODE {
                        block[(i, j)] = ke[(DOFS_PER_NODE * a + i, DOFS_PER_NODE * b + j)];
                    }
                }
                let block = rotate_block(
                    dof_map.rotations[ga].as_ref(),
                    dof_map.rotations[gb].as_ref(),
                    block,
                );
                for i in 0..DOFS_PER_NODE {
                    for j in 0..DOFS_PER_NODE {
                        if block[(i, j)] != 0.0 {
                            tri.add_triplet(
                                DOFS_PER_NODE * ga + i,
                                DOFS_PER_NODE * gb + j,
                                block[(i, j)],
                            );
                        }
                    }
                }
            }
        }
    }

    Ok(AssembledSystem {
        mesh: mesh.clone(),
        material: *material,
        stiffness: tri.to_csr(),
        load,
        dof_map,
        contexts,
        warnings,
    })
}

fn rotate_in(rot: Option<&Matrix2<f64>>, v: Vector3<f64>) -> Vector3<f64> {
    match rot {
        None => v,
        // Local components are R^T * physical.
        Some(r) => {
            let b = r.transpose() * Vector::new(v[1], v[2]);
            Vector3::new(v[0], b.x, b.y)
        }
    }
}

fn rotate_block(
    ra: Option<&Matrix2<f64>>,
    rb: Option<&Matrix2<f64>>,
    block: nalgebra::Matrix3<f64>,
) -> nalgebra::Matrix3<f64> {
    let mut out = block;
    if let Some(r) = ra {
        let t = expand(r).transpose();
        out = t * out;
    }
    if let Some(r) = rb {
        out *= expand(r);
    }
    out
}

fn expand(r: &Matrix2<f64>) -> nalgebra::Matrix3<f64> {
    nalgebra::Matrix3::new(
        1.0,
        0.0,
        0.0,
        0.0,
        r[(0, 0)],
        r[(0, 1)],
        0.0,
        r[(1, 0)],
        r[(1, 1)],
    )
}

fn build_dof_map(mesh: &PolyMesh, bcs: &BoundaryConditions) -> Result<DofMap> {
    let nn = mesh.num_nodes();
    // Per-node gathered boundary information.
    let mut clamped = vec![false; nn];
    let mut prescribed: Vec<Option<[f64; 3]>> = vec![None; nn];
    let mut ss_tangents: Vec<Vec<Vector>> = vec![Vec::new(); nn];

    for edge in mesh.boundary_edges() {
        let Some(bc) = bcs.by_tag.get(&edge.tag) else {
            continue;
        };
        let (i, j) = mesh.boundary_edge_nodes(edge);
        match bc {
            BoundaryCondition::Clamped => {
                clamped[i] = true;
                clamped[j] = true;
            }
            BoundaryCondition::PrescribedField(f) => {
                prescribed[i] = Some(f(mesh.vertices()[i]));
                prescribed[j] = Some(f(mesh.vertices()[j]));
            }
            BoundaryCondition::HardSimplySupported => {
                let t = (mesh.vertices()[j] - mesh.vertices()[i]).normalize();
                ss_tangents[i].push(t);
                ss_tangents[j].push(t);
            }
        }
    }

    let mut status = vec![DofStatus::Free(0); DOFS_PER_NODE * nn];
    let mut rotations: Vec<Option<Matrix2<f64>>> = vec![None; nn];
    for node in 0..nn {
        let c = DOFS_PER_NODE * node;
        if clamped[node] {
            status[c] = DofStatus::Fixed(0.0);
            status[c + 1] = DofStatus::Fixed(0.0);
            status[c + 2] = DofStatus::Fixed(0.0);
        } else if let Some(vals) = prescribed[node] {
            status[c] = DofStatus::Fixed(vals[0]);
            status[c + 1] = DofStatus::Fixed(vals[1]);
            status[c + 2] = DofStatus::Fixed(vals[2]);
        } else if !ss_tangents[node].is_empty() {
            status[c] = DofStatus::Fixed(0.0);
            let ts = &ss_tangents[node];
            let corner = ts
                .iter()
                .any(|t| crate::geometry::cross(ts[0], *t).abs() > 1e-8);
            if corner {
                // Two independent tangential directions force both rotation
                // components to zero.
                status[c + 1] = DofStatus::Fixed(0.0);
                status[c + 2] = DofStatus::Fixed(0.0);
            } else {
                // Average tangent (edges may point in opposite directions).
                let mut t = ts[0];
                for other in &ts[1..] {
                    t += if t.dot(other) >= 0.0 { *other } else { -*other };
                }
                let t = t.normalize();
                rotations[node] = Some(Matrix2::new(t.x, -t.y, t.y, t.x));
                status[c + 1] = DofStatus::Fixed(0.0); // beta_s
                status[c + 2] = DofStatus::Free(0); // beta_n
            }
        }
    }

    let mut num_free = 0;
    for s in status.iter_mut() {
        if let DofStatus::Free(_) = s {
            *s = DofStatus::Free(num_free);
            num_free += 1;
        }
    }
    Ok(DofMap {
        status,
        rotations,
        num_free,
    })
}

/// Solution fields over the mesh with per-element evaluation.
pub struct PlateSolution {
    mesh: PolyMesh,
    /// Physical nodal dofs `(w, beta_x, beta_y)`.
    u: DVector<f64>,
    /// Residual `K u - f` in the transformed frame (reaction forces at
    /// constrained dofs, numerical zero elsewhere).
    reactions: DVector<f64>,
    dof_map: DofMap,
    contexts: Vec<ElementContext>,
}

/// Reduces the assembled system, factorizes and solves it.
pub fn solve(system: &AssembledSystem) -> Result<PlateSolution> {
    let n = system.dof_map.num_dofs();
    let map = &system.dof_map;

    // Start vector with prescribed values filled in.
    let mut u_local = DVector::zeros(n);
    for (d, s) in (0..n).zip(map.status.iter()) {
        if let DofStatus::Fixed(v) = s {
            u_local[d] = *v;
        }
    }

    let nf = map.num_free;
    if nf > 0 {
        // rhs_f = (f - K u_fixed) restricted to free dofs.
        let ku0 = mul_csr(&system.stiffness, &u_local);
        let mut rhs = vec![0.0; nf];
        let mut free_of = vec![usize::MAX; n];
        for d in 0..n {
            if let DofStatus::Free(idx) = map.status[d] {
                free_of[d] = idx;
                rhs[idx] = system.load[d] - ku0[d];
            }
        }

        // Free-free submatrix.
        let mut tri = TriMat::new((nf, nf));
        for (row, vec) in system.stiffness.outer_iterator().enumerate() {
            let fi = free_of[row];
            if fi == usize::MAX {
                continue;
            }
            for (col, &v) in vec.iter() {
                let fj = free_of[col];
                if fj != usize::MAX {
                    tri.add_triplet(fi, fj, v);
                }
            }
        }
        let kff: CsMat<f64> = tri.to_csr();

        // Symmetric Jacobi equilibration: deflection and rotation dofs carry
        // stiffnesses differing by ~D_s/D_b ~ 1/h^2, which degrades the
        // factorization. Factor S K S with S = diag(K)^(-1/2) instead.
        let mut scale = vec![1.0; nf];
        for (row, vec) in kff.outer_iterator().enumerate() {
            for (col, &v) in vec.iter() {
                if col == row && v > 0.0 {
                    scale[row] = 1.0 / v.sqrt();
                }
            }
        }
        let mut tri_s = TriMat::new((nf, nf));
        for (row, vec) in kff.outer_iterator().enumerate() {
            for (col, &v) in vec.iter() {
                tri_s.add_triplet(row, col, v * scale[row] * scale[col]);
            }
        }
        let kss: CsMat<f64> = tri_s.to_csr();

        let ldl = sprs_ldl::Ldl::new()
            .check_symmetry(sprs::SymmetryCheck::DontCheckSymmetry)
            .fill_in_reduction(sprs::FillInReduction::ReverseCuthillMcKee)
            .numeric(kss.view())
            .map_err(|e| Error::Solver(format!("LDL factorization failed: {e}")))?;

        // The equilibrated matrix is positive definite for any constrained
        // plate; nonpositive or collapsing pivots mean a singular system
        // (e.g. unconstrained rigid modes) that the residual metric alone
        // cannot flag reliably.
        let pivots = ldl.d();
        let pivot_max = pivots.iter().copied().fold(0.0_f64, f64::max);
        let pivot_min = pivots.iter().copied().fold(f64::INFINITY, f64::min);
        if !(pivot_min > 1e-12 * pivot_max) {
            return Err(Error::Solver(format!(
                "non-positive-definite factorization (pivot range {pivot_min:.3e}..{pivot_max:.3e}): \
                 singular or unconstrained system"
            )));
        }

        // K x = b  <=>  (S K S) y = S b with x = S y.
        let solve_scaled = |b: &[f64]| {
            let bs: Vec<f64> = b.iter().zip(&scale).map(|(v, s)| v * s).collect();
            let mut y = ldl.solve(&bs);
            for (v, s) in y.iter_mut().zip(&scale) {
                *v *= s;
            }
            DVector::from_vec(y)
        };
        let mut x = solve_scaled(&rhs);

        // Iterative refinement with the existing factor tightens the very
        // ill-conditioned thin-plate systems, then the residual check guards
        // against near-singular factorizations. The residual is measured as
        // the normwise backward error ||r|| / (|| |K| |x| || + ||b||): the
        // plain ||r||/||b|| has an f64 floor of eps * || |K| |x| || / ||b||,
        // which exceeds any fixed tolerance once the shear/bending stiffness
        // disparity (~1/h^2) grows with refinement.
        let bnorm = rhs.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
        let residual = |x: &DVector<f64>| {
            let kx = mul_csr(&kff, x);
            let mut r = DVector::zeros(nf);
            for i in 0..nf {
                r[i] = rhs[i] - kx[i];
            }
            r
        };
        let scale_norm = |x: &DVector<f64>| {
            let mut kabsx = DVector::<f64>::zeros(nf);
            for (row, vec) in kff.outer_iterator().enumerate() {
                for (col, &v) in vec.iter() {
                    kabsx[row] += v.abs() * x[col].abs();
                }
            }
            kabsx.norm() + bnorm
        };
        let mut r = residual(&x);
        let mut res = r.norm() / bnorm;
        for _ in 0..3 {
            if res < 1e-13 {
                break;
            }
            let candidate = &x + solve_scaled(r.as_slice());
            let rc = residual(&candidate);
            let resc = rc.norm() / bnorm;
            if !(resc < res) {
                break;
            }
            (x, r, res) = (candidate, rc, resc);
        }
        let backward = r.norm() / scale_norm(&x);
        if !backward.is_finite() || backward > 1e-10 {
            return Err(Error::Solver(format!(
                "solve backward error {backward:.3e} exceeds 1e-10 (singular or \
                 ill-conditioned system)"
            )));
        }

        for d in 0..n {
            if let DofStatus::Free(idx) = map.status[d] {
                u_local[d] = x[idx];
            }
        }
    }

    let reactions = mul_csr(&system.stiffness, &u_local) - &system.load;
    let u = map.to_physical(&u_local);
    Ok(PlateSolution {
        mesh: system.mesh.clone(),
        u,
        reactions,
        dof_map: map.clone(),
        contexts: system.contexts.clone(),
    })
}

fn mul_csr(m: &CsMat<f64>, v: &DVector<f64>) -> DVector<f64> {
    let mut out = DVector::zeros(m.rows());
    for (row, vec) in m.outer_iterator().enumerate() {
        let mut acc = 0.0;
        for (col, &val) in vec.iter() {
            acc += val * v[col];
        }
        out[row] = acc;
    }
    out
}

impl PlateSolution {
    pub fn mesh(&self) -> &PolyMesh {
        &self.mesh
    }

    pub fn dof_map(&self) -> &DofMap {
        &self.dof_map
    }

    /// Physical nodal dof vector `(w, beta_x, beta_y)` per node.
    pub fn dofs(&self) -> &DVector<f64> {
        &self.u
    }

    pub fn node_values(&self, node: usize) -> (f64, Vector) {
        let c = DOFS_PER_NODE * node;
        (self.u[c], Vector::new(self.u[c + 1], self.u[c + 2]))
    }

    /// Element dof vector in physical components.
    pub fn element_dofs(&self, element: usize) -> DVector<f64> {
        let nodes = &self.mesh.elements()[element];
        let mut ue = DVector::zeros(DOFS_PER_NODE * nodes.len());
        for (a, &g) in nodes.iter().enumerate() {
            for c in 0..DOFS_PER_NODE {
                ue[DOFS_PER_NODE * a + c] = self.u[DOFS_PER_NODE * g + c];
            }
        }
        ue
    }

    pub fn context(&self, element: usize) -> &ElementContext {
        &self.contexts[element]
    }

    /// Deflection and rotation at an arbitrary point of the mesh. Points at
    /// nodes return nodal values; other points are evaluated inside the
    /// containing element (nudged off edges by a relative 1e-12).
    pub fn displacement_at(&self, p: Point) -> Result<(f64, Vector)> {
        let scale = self.mesh.mesh_size().max(1e-300);
        // Nodal shortcut (also handles points on element boundaries).
        for (node, v) in self.mesh.vertices().iter().enumerate() {
            if (p - v).norm() < 1e-9 * scale {
                return Ok(self.node_values(node));
            }
        }
        let e = self.mesh.find_element(p).ok_or_else(|| {
            Error::Lookup(format!("point ({}, {}) is outside the mesh", p.x, p.y))
        })?;
        let poly = self.mesh.element_polygon(e);
        let c = crate::geometry::centroid(&poly);
        let d = crate::geometry::inward_distance(&poly, p);
        let diam = crate::geometry::diameter(&poly);
        let p = if d <= 1e-11 * diam {
            p + (c - p) * 1e-9
        } else {
            p
        };
        self.contexts[e].displacement(p, &self.element_dofs(e))
    }

    pub fn deflection_at(&self, p: Point) -> Result<f64> {
        Ok(self.displacement_at(p)?.0)
    }

    /// Sum of reaction forces at constrained `w` dofs (transverse force
    /// balance for Dirichlet problems).
    pub fn total_w_reaction(&self) -> f64 {
        let mut sum = 0.0;
        for node in 0..self.dof_map.num_nodes() {
            if let DofStatus::Fixed(_) = self.dof_map.status(node, 0) {
                sum += self.reactions[DOFS_PER_NODE * node];
            }
        }
        sum
    }

    pub fn reactions(&self) -> &DVector<f64> {
        &self.reactions
    }
}

/// Convenience pipeline: assemble and solve in one call.
pub fn solve_plate(
    mesh: &PolyMesh,
    material: &PlateMaterial,
    q: &(dyn Fn(Point) -> f64 + Sync),
    bcs: &BoundaryConditions,
) -> Result<PlateSolution> {
    let system = assemble(mesh, material, q, bcs, DEFAULT_QUADRATURE_DEGREE)?;
    solve(&system)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate_structured_quad;
    use approx::assert_relative_eq;

    fn material(h: f64) -> PlateMaterial {
        PlateMaterial::new(10.92e6, 0.3, h).unwrap()
    }

    #[test]
    fn clamped_one_element_all_constrained() {
        let mesh = generate_structured_quad(1.0, 1).unwrap();
        let m = material(0.1);
        let bcs = BoundaryConditions::uniform(&mesh, BoundaryCondition::Clamped);
        let sys = assemble(&mesh, &m, &|_| 1.0, &bcs, 4).unwrap();
        assert_eq!(sys.dof_map.num_free(), 0);
        let sol = solve(&sys).unwrap();
        assert_eq!(sol.dofs().norm(), 0.0);
    }

    #[test]
    fn clamped_4x4_free_dof_count() {
        let mesh = generate_structured_quad(1.0, 4).unwrap();
        let m = material(0.1);
        let bcs = BoundaryConditions::uniform(&mesh, BoundaryCondition::Clamped);
        let sys = assemble(&mesh, &m, &|_| 1.0, &bcs, 4).unwrap();
        // 25 nodes, 16 boundary nodes fully constrained.
        assert_eq!(sys.dof_map.num_dofs(), 75);
        assert_eq!(sys.dof_map.num_free(), 27);
    }

    #[test]
    fn stiffness_pattern_matches_connectivity() {
        let mesh = generate_structured_quad(1.0, 3).unwrap();
        let m = material(0.1);
        let bcs = BoundaryConditions::uniform(&mesh, BoundaryCondition::Clamped);
        let sys = assemble(&mesh, &m, &|_| 1.0, &bcs, 4).unwrap();
        // Node adjacency from element connectivity.
        let nn = mesh.num_nodes();
        let mut adj = vec![std::collections::HashSet::new(); nn];
        for elem in mesh.elements() {
            for &a in elem {
                for &b in elem {
                    adj[a].insert(b);
                }
            }
        }
        for (row, vec) in sys.stiffness.outer_iterator().enumerate() {
            for (col, _) in vec.iter() {
                assert!(
                    adj[row / 3].contains(&(col / 3)),
                    "entry ({row},{col}) outside connectivity"
                );
            }
        }
    }

    #[test]
    fn zero_load_zero_solution() {
        let mesh = generate_structured_quad(1.0, 4).unwrap();
        let m = material(0.01);
        let bcs = BoundaryConditions::uniform(&mesh, BoundaryCondition::Clamped);
        let sol = solve_plate(&mesh, &m, &|_| 0.0, &bcs).unwrap();
        assert_eq!(sol.dofs().norm(), 0.0);
    }

    #[test]
    fn clamped_solve_residual_and_equilibrium() {
        let mesh = generate_structured_quad(1.0, 8).unwrap();
        let m = material(0.01);
        let bcs = BoundaryConditions::uniform(&mesh, BoundaryCondition::Clamped);
        let sol = solve_plate(&mesh, &m, &|_| 1.0, &bcs).unwrap();
        // Total upward reaction balances the applied load (area * q).
        assert_relative_eq!(sol.total_w_reaction(), -1.0, max_relative = 1e-8);
        let wc = sol.deflection_at(Point::new(0.5, 0.5)).unwrap();
        assert!(wc > 0.0, "clamped plate deflects toward the load: {wc}");
    }

    #[test]
    fn load_assembly_is_linear() {
        let mesh = generate_structured_quad(1.0, 4).unwrap();
        let m = material(0.1);
        let bcs = BoundaryConditions::uniform(&mesh, BoundaryCondition::Clamped);
        let q1 = |p: Point| 1.0 + p.x;
        let q2 = |p: Point| 2.0 - p.y * p.x;
        let f1 = assemble(&mesh, &m, &q1, &bcs, 4).unwrap().load;
        let f2 = assemble(&mesh, &m, &q2, &bcs, 4).unwrap().load;
        let f12 = assemble(&mesh, &m, &|p| q1(p) + q2(p), &bcs, 4)
            .unwrap()
            .load;
        assert!((f12 - (&f1 + &f2)).norm() <= 1e-13 * (f1.norm() + f2.norm()));
    }

    #[test]
    fn solution_invariant_under_renumbering() {
        let mesh = generate_structured_quad(1.0, 4).unwrap();
        // Reverse the node numbering.
        let nn = mesh.num_nodes();
        let perm: Vec<usize> = (0..nn).rev().collect();
        let verts: Vec<Point> = perm.iter().map(|&o| mesh.vertices()[o]).collect();
        let mut inv = vec![0usize; nn];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let elems: Vec<Vec<usize>> = mesh
            .elements()
            .iter()
            .map(|e| e.iter().map(|&v| inv[v]).collect())
            .collect();
        let mesh2 = PolyMesh::new(verts, elems, mesh.boundary_edges().to_vec()).unwrap();

        let m = material(0.05);
        let bcs1 = BoundaryConditions::uniform(&mesh, BoundaryCondition::Clamped);
        let bcs2 = BoundaryConditions::uniform(&mesh2, BoundaryCondition::Clamped);
        let s1 = solve_plate(&mesh, &m, &|_| 1.0, &bcs1).unwrap();
        let s2 = solve_plate(&mesh2, &m, &|_| 1.0, &bcs2).unwrap();
        let mut worst: f64 = 0.0;
        for node in 0..nn {
            let (w1, b1) = s1.node_values(node);
            let (w2, b2) = s2.node_values(inv[node]);
            worst = worst.max((w1 - w2).abs()).max((b1 - b2).norm());
        }
        assert!(worst < 1e-10, "renumbering deviation {worst}");
    }

    #[test]
    fn free_free_system_warns_and_fails() {
        let mesh = generate_structured_quad(1.0, 2).unwrap();
        let m = material(0.1);
        let bcs = BoundaryConditions::new();
        let sys = assemble(&mesh, &m, &|_| 1.0, &bcs, 4).unwrap();
        assert!(!sys.warnings.is_empty());
        assert!(solve(&sys).is_err());
    }

    #[test]
    fn hard_ss_constrains_tangential_rotation() {
        let mesh = generate_structured_quad(1.0, 2).unwrap();
        let m = material(0.1);
        let bcs = BoundaryConditions::uniform(&mesh, BoundaryCondition::HardSimplySupported);
        let sys = assemble(&mesh, &m, &|_| 1.0, &bcs, 4).unwrap();
        // 9 nodes: 4 corners (3 fixed dofs each), 4 mid-side boundary nodes
        // (w and beta_s fixed, beta_n free), 1 interior node (all free).
        assert_eq!(sys.dof_map.num_free(), 4 + 3);
        let sol = solve(&sys).unwrap();
        // Mid-side node of the bottom edge: tangent is x, so beta_x = 0.
        let bottom_mid = mesh
            .vertices()
            .iter()
            .position(|v| (v.x - 0.5).abs() < 1e-12 && v.y.abs() < 1e-12)
            .unwrap();
        let (w, b) = sol.node_values(bottom_mid);
        assert_eq!(w, 0.0);
        assert!(b.x.abs() < 1e-14, "beta_s on bottom edge: {}", b.x);
    }

    #[test]
    fn prescribed_field_reproduced_on_boundary() {
        let mesh = generate_structured_quad(1.0, 3).unwrap();
        let m = material(0.1);
        let field = |p: Point| [1.0 + p.x + p.y, -1.0, -1.0];
        let bcs = BoundaryConditions::prescribed_everywhere(&mesh, field);
        let sol = solve_plate(&mesh, &m, &|_| 0.0, &bcs).unwrap();
        for &node in mesh.boundary_nodes().iter() {
            let v = mesh.vertices()[node];
            let (w, b) = sol.node_values(node);
            assert_relative_eq!(w, 1.0 + v.x + v.y, epsilon = 1e-14);
            assert_eq!(b.x, -1.0);
            assert_eq!(b.y, -1.0);
        }
    }
}
