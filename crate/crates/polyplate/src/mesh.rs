//! Polygonal mesh data model, deterministic generators for the benchmark
//! geometries, and plain-text mesh file I/O.

use crate::geometry::{self, Point, Vector};
use crate::{Error, Result};
use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

mod cvt;

pub use cvt::{
    generate_cvt_polygonal, generate_cvt_with_node_target, Domain, MeshKind, MeshSpec,
    DEFAULT_LLOYD_ITERS,
};

/// A boundary edge reference: local edge `local_edge` of element `element`
/// (joining local vertices `local_edge` and `local_edge + 1`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub element: usize,
    pub local_edge: usize,
    pub tag: String,
}

/// An immutable conforming mesh of convex CCW polygons.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyMesh {
    vertices: Vec<Point>,
    elements: Vec<Vec<usize>>,
    boundary_edges: Vec<BoundaryEdge>,
}

impl PolyMesh {
    /// Builds a mesh and enforces all structural invariants: convex CCW
    /// elements, at most two elements per edge, exactly one element per
    /// boundary edge, and no duplicate vertices.
    pub fn new(
        vertices: Vec<Point>,
        elements: Vec<Vec<usize>>,
        boundary_edges: Vec<BoundaryEdge>,
    ) -> Result<Self> {
        let mesh = PolyMesh {
            vertices,
            elements,
            boundary_edges,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    fn bbox_scale(&self) -> f64 {
        let (lo, hi) = geometry::bounding_box(&self.vertices);
        (hi - lo).norm().max(f64::MIN_POSITIVE)
    }

    fn validate(&self) -> Result<()> {
        if self.vertices.is_empty() || self.elements.is_empty() {
            return Err(Error::MeshValidation("empty mesh".into()));
        }
        let scale = self.bbox_scale();

        // Element loops: index range, distinct vertices, CCW convex.
        for (e, loop_) in self.elements.iter().enumerate() {
            if loop_.len() < 3 {
                return Err(Error::MeshValidation(format!(
                    "element {e} has fewer than 3 vertices"
                )));
            }
            let mut sorted = loop_.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != loop_.len() {
                return Err(Error::MeshValidation(format!(
                    "element {e} repeats a vertex"
                )));
            }
            for &v in loop_ {
                if v >= self.vertices.len() {
                    return Err(Error::MeshValidation(format!(
                        "element {e} references missing vertex {v}"
                    )));
                }
            }
            let poly = self.element_polygon(e);
            if geometry::signed_area(&poly) <= 0.0 {
                return Err(Error::MeshValidation(format!(
                    "element {e} is not counter-clockwise"
                )));
            }
            if !geometry::is_convex_ccw(&poly, 1e-12 * scale * scale) {
                return Err(Error::MeshValidation(format!("element {e} is not convex")));
            }
        }

        // Edge sharing counts.
        let edge_use = self.edge_usage();
        for ((a, b), users) in &edge_use {
            if users.len() > 2 {
                return Err(Error::MeshValidation(format!(
                    "edge ({a}, {b}) is shared by {} elements",
                    users.len()
                )));
            }
        }
        let mut tagged: HashMap<(usize, usize), usize> = HashMap::new();
        for be in &self.boundary_edges {
            let Some(loop_) = self.elements.get(be.element) else {
                return Err(Error::MeshValidation(format!(
                    "boundary edge references missing element {}",
                    be.element
                )));
            };
            if be.local_edge >= loop_.len() {
                return Err(Error::MeshValidation(format!(
                    "boundary edge references missing local edge {} of element {}",
                    be.local_edge, be.element
                )));
            }
            let key = self.edge_key(be.element, be.local_edge);
            let users = &edge_use[&key];
            if users.len() != 1 {
                return Err(Error::MeshValidation(format!(
                    "boundary edge ({}, {}) is shared by {} elements",
                    key.0,
                    key.1,
                    users.len()
                )));
            }
            *tagged.entry(key).or_insert(0) += 1;
        }
        for ((a, b), users) in &edge_use {
            if users.len() == 1 && !tagged.contains_key(&(*a, *b)) {
                return Err(Error::MeshValidation(format!(
                    "edge ({a}, {b}) lies on the boundary but carries no tag"
                )));
            }
        }

        // Duplicate vertices within tolerance (hash-grid neighborhood scan).
        let tol = 1e-10 * scale;
        let inv = 1.0 / (4.0 * tol);
        let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, p) in self.vertices.iter().enumerate() {
            let key = ((p.x * inv).floor() as i64, (p.y * inv).floor() as i64);
            for dx in -1..=1 {
                for dy in -1..=1 {
                    if let Some(list) = grid.get(&(key.0 + dx, key.1 + dy)) {
                        for &j in list {
                            if (self.vertices[j] - p).norm() < tol {
                                return Err(Error::MeshValidation(format!(
                                    "vertices {j} and {i} coincide within tolerance"
                                )));
                            }
                        }
                    }
                }
            }
            grid.entry(key).or_default().push(i);
        }
        Ok(())
    }

    fn edge_key(&self, element: usize, local_edge: usize) -> (usize, usize) {
        let loop_ = &self.elements[element];
        let a = loop_[local_edge];
        let b = loop_[(local_edge + 1) % loop_.len()];
        (a.min(b), a.max(b))
    }

    fn edge_usage(&self) -> HashMap<(usize, usize), Vec<(usize, usize)>> {
        let mut map: HashMap<(usize, usize), Vec<(usize, usize)>> = HashMap::new();
        for (e, loop_) in self.elements.iter().enumerate() {
            for k in 0..loop_.len() {
                map.entry(self.edge_key(e, k)).or_default().push((e, k));
            }
        }
        map
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn elements(&self) -> &[Vec<usize>] {
        &self.elements
    }

    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.boundary_edges
    }

    pub fn num_nodes(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn element_polygon(&self, e: usize) -> Vec<Point> {
        self.elements[e].iter().map(|&v| self.vertices[v]).collect()
    }

    pub fn element_area(&self, e: usize) -> f64 {
        geometry::signed_area(&self.element_polygon(e))
    }

    pub fn total_area(&self) -> f64 {
        (0..self.num_elements()).map(|e| self.element_area(e)).sum()
    }

    pub fn mean_element_area(&self) -> f64 {
        self.total_area() / self.num_elements() as f64
    }

    /// Representative mesh size: square root of the mean element area.
    pub fn mesh_size(&self) -> f64 {
        self.mean_element_area().sqrt()
    }

    /// Global node ids of the two endpoints of a boundary edge.
    pub fn boundary_edge_nodes(&self, be: &BoundaryEdge) -> (usize, usize) {
        let loop_ = &self.elements[be.element];
        (
            loop_[be.local_edge],
            loop_[(be.local_edge + 1) % loop_.len()],
        )
    }

    /// All node ids that lie on a tagged boundary edge.
    pub fn boundary_nodes(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = self
            .boundary_edges
            .iter()
            .flat_map(|be| {
                let (a, b) = self.boundary_edge_nodes(be);
                [a, b]
            })
            .collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    /// Unit tangents of the boundary edges incident to each boundary node.
    pub fn boundary_node_tangents(&self) -> HashMap<usize, Vec<Vector>> {
        let mut map: HashMap<usize, Vec<Vector>> = HashMap::new();
        for be in &self.boundary_edges {
            let (a, b) = self.boundary_edge_nodes(be);
            let t = (self.vertices[b] - self.vertices[a]).normalize();
            map.entry(a).or_default().push(t);
            map.entry(b).or_default().push(t);
        }
        map
    }

    /// Finds an element containing the point (within a small tolerance of
    /// its boundary). Linear scan; meshes here are desk-scale.
    pub fn find_element(&self, p: Point) -> Option<usize> {
        let tol = -1e-12 * self.bbox_scale();
        let mut best: Option<(usize, f64)> = None;
        for e in 0..self.num_elements() {
            let d = geometry::inward_distance(&self.element_polygon(e), p);
            if d >= tol {
                return Some(e);
            }
            if best.map_or(true, |(_, bd)| d > bd) {
                best = Some((e, d));
            }
        }
        // Accept points marginally outside due to fp (e.g. disk boundary).
        match best {
            Some((e, d)) if d > -1e-9 * self.bbox_scale() => Some(e),
            _ => None,
        }
    }
}

/// Derives boundary edges (edges used by exactly one element), tagging each
/// through `tag_fn` applied to the edge midpoint.
pub fn derive_boundary_edges(
    vertices: &[Point],
    elements: &[Vec<usize>],
    tag_fn: impl Fn(Point) -> String,
) -> Vec<BoundaryEdge> {
    let mut map: HashMap<(usize, usize), Vec<(usize, usize)>> = HashMap::new();
    for (e, loop_) in elements.iter().enumerate() {
        for k in 0..loop_.len() {
            let a = loop_[k];
            let b = loop_[(k + 1) % loop_.len()];
            map.entry((a.min(b), a.max(b))).or_default().push((e, k));
        }
    }
    let mut out = Vec::new();
    for ((a, b), users) in map {
        if users.len() == 1 {
            let mid = Point::from(0.5 * (vertices[a].coords + vertices[b].coords));
            out.push(BoundaryEdge {
                element: users[0].0,
                local_edge: users[0].1,
                tag: tag_fn(mid),
            });
        }
    }
    out.sort_by_key(|be| (be.element, be.local_edge));
    out
}

fn square_side_tag(a: f64) -> impl Fn(Point) -> String {
    move |mid: Point| {
        let tol = 1e-9 * a;
        if mid.y.abs() < tol {
            "bottom".into()
        } else if (mid.x - a).abs() < tol {
            "right".into()
        } else if (mid.y - a).abs() < tol {
            "top".into()
        } else if mid.x.abs() < tol {
            "left".into()
        } else {
            "boundary".into()
        }
    }
}

/// `n x n` axis-aligned square elements tiling `[0, a]^2`.
pub fn generate_structured_quad(a: f64, n: usize) -> Result<PolyMesh> {
    if n < 1 || !(a > 0.0) {
        return Err(Error::invalid_argument(format!(
            "structured mesh requires n >= 1 and a > 0 (got n = {n}, a = {a})"
        )));
    }
    grid_quad_mesh(a, n, |_, _| 0.0)
}

/// `n x n` trapezoids: interior grid vertices offset by `±skew·(a/n)` in y
/// with alternating sign, keeping all cells convex.
pub fn generate_trapezoidal(a: f64, n: usize, skew: f64) -> Result<PolyMesh> {
    if n < 1 || !(a > 0.0) {
        return Err(Error::invalid_argument(format!(
            "trapezoidal mesh requires n >= 1 and a > 0 (got n = {n}, a = {a})"
        )));
    }
    if !(0.0..0.5).contains(&skew) {
        return Err(Error::invalid_argument(format!(
            "skew must lie in [0, 0.5) (got {skew})"
        )));
    }
    let d = a / n as f64;
    grid_quad_mesh(a, n, move |i, j| {
        if i == 0 || i == n || j == 0 || j == n {
            0.0
        } else if (i + j) % 2 == 0 {
            skew * d
        } else {
            -skew * d
        }
    })
    .map_err(|e| match e {
        Error::MeshValidation(msg) => {
            Error::invalid_argument(format!("skew {skew} produces invalid cells: {msg}"))
        }
        other => other,
    })
}

fn grid_quad_mesh(a: f64, n: usize, dy: impl Fn(usize, usize) -> f64) -> Result<PolyMesh> {
    let d = a / n as f64;
    let idx = |i: usize, j: usize| j * (n + 1) + i;
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            vertices.push(Point::new(i as f64 * d, j as f64 * d + dy(i, j)));
        }
    }
    let mut elements = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            elements.push(vec![idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    let boundary = derive_boundary_edges(&vertices, &elements, square_side_tag(a));
    PolyMesh::new(vertices, elements, boundary)
}

const MESH_HEADER: &str = "polyplate-mesh v1";

/// Serializes a mesh in the `polyplate-mesh v1` text format. Coordinates are
/// written with 17 significant digits so the round trip is bit-exact.
pub fn mesh_to_string(mesh: &PolyMesh) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{MESH_HEADER}");
    let _ = writeln!(s, "vertices {}", mesh.vertices.len());
    for v in &mesh.vertices {
        let _ = writeln!(s, "{:.16e} {:.16e}", v.x, v.y);
    }
    let _ = writeln!(s, "elements {}", mesh.elements.len());
    for loop_ in &mesh.elements {
        let _ = write!(s, "{}", loop_.len());
        for v in loop_ {
            let _ = write!(s, " {v}");
        }
        let _ = writeln!(s);
    }
    let _ = writeln!(s, "boundary_edges {}", mesh.boundary_edges.len());
    for be in &mesh.boundary_edges {
        let _ = writeln!(s, "{} {} {}", be.element, be.local_edge, be.tag);
    }
    s
}

pub fn write_mesh(mesh: &PolyMesh, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, mesh_to_string(mesh))?;
    Ok(())
}

/// Parses the `polyplate-mesh v1` text format, validating all invariants.
pub fn mesh_from_str(text: &str) -> Result<PolyMesh> {
    let mut lines = text.lines().enumerate();
    let perr = |line: usize, message: String| Error::Parse {
        line: line + 1,
        message,
    };
    let mut next_line = |expect: &str| -> Result<(usize, &str)> {
        lines
            .next()
            .map(|(i, l)| (i, l.trim()))
            .ok_or_else(|| perr(usize::MAX - 1, format!("unexpected end of file, expected {expect}")))
    };

    let (i, header) = next_line("header")?;
    if header != MESH_HEADER {
        return Err(perr(i, format!("expected header '{MESH_HEADER}'")));
    }

    fn section_count(line: &str, lineno: usize, name: &str) -> Result<usize> {
        let mut it = line.split_whitespace();
        match (it.next(), it.next(), it.next()) {
            (Some(word), Some(count), None) if word == name => {
                count.parse::<usize>().map_err(|_| Error::Parse {
                    line: lineno + 1,
                    message: format!("invalid {name} count '{count}'"),
                })
            }
            _ => Err(Error::Parse {
                line: lineno + 1,
                message: format!("expected '{name} <count>'"),
            }),
        }
    }

    let (i, line) = next_line("vertices")?;
    let nv = section_count(line, i, "vertices")?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (i, line) = next_line("vertex coordinates")?;
        let mut it = line.split_whitespace();
        let parse = |tok: Option<&str>, i: usize| -> Result<f64> {
            tok.ok_or_else(|| perr(i, "missing coordinate".into()))?
                .parse::<f64>()
                .map_err(|_| perr(i, "invalid coordinate".into()))
        };
        let x = parse(it.next(), i)?;
        let y = parse(it.next(), i)?;
        if it.next().is_some() {
            return Err(perr(i, "trailing tokens after coordinates".into()));
        }
        vertices.push(Point::new(x, y));
    }

    let (i, line) = next_line("elements")?;
    let ne = section_count(line, i, "elements")?;
    let mut elements = Vec::with_capacity(ne);
    for _ in 0..ne {
        let (i, line) = next_line("element loop")?;
        let mut it = line.split_whitespace();
        let k: usize = it
            .next()
            .ok_or_else(|| perr(i, "missing vertex count".into()))?
            .parse()
            .map_err(|_| perr(i, "invalid vertex count".into()))?;
        let mut loop_ = Vec::with_capacity(k);
        for _ in 0..k {
            let v: usize = it
                .next()
                .ok_or_else(|| perr(i, "missing vertex index".into()))?
                .parse()
                .map_err(|_| perr(i, "invalid vertex index".into()))?;
            loop_.push(v);
        }
        if it.next().is_some() {
            return Err(perr(i, "trailing tokens after element loop".into()));
        }
        elements.push(loop_);
    }

    let (i, line) = next_line("boundary_edges")?;
    let nb = section_count(line, i, "boundary_edges")?;
    let mut boundary = Vec::with_capacity(nb);
    for _ in 0..nb {
        let (i, line) = next_line("boundary edge")?;
        let mut it = line.split_whitespace();
        let mut parse_idx = || -> Result<usize> {
            it.next()
                .ok_or_else(|| perr(i, "missing boundary edge field".into()))?
                .parse()
                .map_err(|_| perr(i, "invalid boundary edge index".into()))
        };
        let element = parse_idx()?;
        let local_edge = parse_idx()?;
        let tag = it
            .next()
            .ok_or_else(|| perr(i, "missing boundary tag".into()))?
            .to_string();
        boundary.push(BoundaryEdge {
            element,
            local_edge,
            tag,
        });
    }

    PolyMesh::new(vertices, elements, boundary)
}

pub fn read_mesh(path: impl AsRef<Path>) -> Result<PolyMesh> {
    let text = std::fs::read_to_string(path)?;
    mesh_from_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn structured_single_cell() {
        let m = generate_structured_quad(1.0, 1).unwrap();
        assert_eq!(m.num_elements(), 1);
        assert_eq!(m.num_nodes(), 4);
        assert_eq!(m.boundary_edges().len(), 4);
        assert_relative_eq!(m.total_area(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn structured_counts() {
        let m = generate_structured_quad(1.0, 4).unwrap();
        assert_eq!(m.num_elements(), 16);
        assert_eq!(m.num_nodes(), 25);
        let m8 = generate_structured_quad(1.0, 8).unwrap();
        assert_eq!(m8.num_elements(), 64);
        assert_relative_eq!(m8.total_area(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn trapezoidal_zero_skew_matches_structured() {
        let t = generate_trapezoidal(1.0, 4, 0.0).unwrap();
        let s = generate_structured_quad(1.0, 4).unwrap();
        assert_eq!(t, s);
    }

    #[test]
    fn trapezoidal_is_convex_and_covers() {
        for n in [4usize, 8] {
            let m = generate_trapezoidal(1.0, n, 0.2).unwrap();
            assert_eq!(m.num_elements(), n * n);
            assert_relative_eq!(m.total_area(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn trapezoidal_rejects_bad_skew() {
        assert!(generate_trapezoidal(1.0, 4, 0.5).is_err());
        assert!(generate_trapezoidal(1.0, 4, -0.1).is_err());
    }

    #[test]
    fn rejects_invalid_generator_args() {
        assert!(generate_structured_quad(0.0, 4).is_err());
        assert!(generate_structured_quad(1.0, 0).is_err());
    }

    #[test]
    fn roundtrip_structured() {
        let m = generate_structured_quad(1.0, 4).unwrap();
        let text = mesh_to_string(&m);
        let back = mesh_from_str(&text).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn roundtrip_is_bit_exact_for_trapezoidal() {
        let m = generate_trapezoidal(1.0, 5, 0.3).unwrap();
        let back = mesh_from_str(&mesh_to_string(&m)).unwrap();
        for (a, b) in m.vertices().iter().zip(back.vertices()) {
            assert!(a.x.to_bits() == b.x.to_bits() && a.y.to_bits() == b.y.to_bits());
        }
    }

    #[test]
    fn parse_rejects_two_vertex_element() {
        let text = "polyplate-mesh v1\nvertices 2\n0 0\n1 0\nelements 1\n2 0 1\nboundary_edges 0\n";
        let err = mesh_from_str(text).unwrap_err();
        assert!(matches!(err, Error::MeshValidation(_)), "{err}");
    }

    #[test]
    fn parse_reports_line_numbers() {
        let text = "polyplate-mesh v1\nvertices 1\nnot-a-number 0\n";
        match mesh_from_str(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn validation_rejects_nonconvex() {
        let vertices = vec![
            Point::new(0.0, 0.0),
            Point::new(2.0, 0.0),
            Point::new(0.2, 0.2),
            Point::new(0.0, 2.0),
        ];
        let elements = vec![vec![0, 1, 2, 3]];
        let boundary = derive_boundary_edges(&vertices, &elements, |_| "b".into());
        assert!(PolyMesh::new(vertices, elements, boundary).is_err());
    }

    #[test]
    fn validation_rejects_duplicate_vertices() {
        let vertices = vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
            Point::new(1.0 + 1e-14, 1.0),
        ];
        let elements = vec![vec![0, 1, 2, 3]];
        let boundary = derive_boundary_edges(&vertices, &elements, |_| "b".into());
        assert!(PolyMesh::new(vertices, elements, boundary).is_err());
    }

    #[test]
    fn find_element_locates_points() {
        let m = generate_structured_quad(1.0, 4).unwrap();
        let e = m.find_element(Point::new(0.1, 0.1)).unwrap();
        assert_eq!(e, 0);
        assert!(m.find_element(Point::new(2.0, 2.0)).is_none());
    }
}
