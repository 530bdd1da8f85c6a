//! Centroidal Voronoi tessellation meshing.
//!
//! Voronoi cells are computed per seed by half-plane clipping against
//! bisectors of nearby seeds (hash-grid neighbor search with a security
//! radius stop), clipped to the domain, and relaxed with Lloyd iterations.
//! The disk domain is clipped against a 512-segment inscribed polygon and
//! boundary nodes are projected onto the exact circle afterwards. The final
//! cells are welded into a conforming mesh and degenerate short edges are
//! collapsed.

use super::{derive_boundary_edges, PolyMesh};
use crate::geometry::{self, clip_halfplane, Point, Vector};
use crate::{Error, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

/// Segments used for the inscribed polygon that approximates the disk
/// boundary during clipping.
const DISK_SEGMENTS: usize = 512;

/// Default number of Lloyd relaxation sweeps.
pub const DEFAULT_LLOYD_ITERS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    UnitSquare { a: f64 },
    Disk { r: f64 },
}

impl Domain {
    pub fn validate(&self) -> Result<()> {
        match self {
            Domain::UnitSquare { a } if *a > 0.0 => Ok(()),
            Domain::Disk { r } if *r > 0.0 => Ok(()),
            _ => Err(Error::invalid_argument("domain size must be positive")),
        }
    }

    pub fn area(&self) -> f64 {
        match self {
            Domain::UnitSquare { a } => a * a,
            Domain::Disk { r } => std::f64::consts::PI * r * r,
        }
    }

    fn scale(&self) -> f64 {
        match self {
            Domain::UnitSquare { a } => *a,
            Domain::Disk { r } => 2.0 * r,
        }
    }

    /// Clipping polygon for the domain (the square itself, or the inscribed
    /// 512-gon for the disk).
    fn clip_polygon(&self) -> Vec<Point> {
        match self {
            Domain::UnitSquare { a } => vec![
                Point::new(0.0, 0.0),
                Point::new(*a, 0.0),
                Point::new(*a, *a),
                Point::new(0.0, *a),
            ],
            Domain::Disk { r } => (0..DISK_SEGMENTS)
                .map(|i| {
                    let t = 2.0 * std::f64::consts::PI * i as f64 / DISK_SEGMENTS as f64;
                    Point::new(r * t.cos(), r * t.sin())
                })
                .collect(),
        }
    }

    fn sample(&self, rng: &mut impl Rng) -> Point {
        match self {
            Domain::UnitSquare { a } => Point::new(rng.gen_range(0.0..*a), rng.gen_range(0.0..*a)),
            Domain::Disk { r } => loop {
                let p = Point::new(rng.gen_range(-r..*r), rng.gen_range(-r..*r));
                if p.coords.norm() < 0.999 * r {
                    return p;
                }
            },
        }
    }

    /// Lower-left corner of the domain bounding box.
    fn bbox_min(&self) -> Point {
        match self {
            Domain::UnitSquare { .. } => Point::new(0.0, 0.0),
            Domain::Disk { r } => Point::new(-r, -r),
        }
    }

    /// Upper-right corner of the domain bounding box.
    fn bbox_max(&self) -> Point {
        match self {
            Domain::UnitSquare { a } => Point::new(*a, *a),
            Domain::Disk { r } => Point::new(*r, *r),
        }
    }

    /// Signed distance from the domain boundary (positive inside).
    fn boundary_distance(&self, p: Point) -> f64 {
        match self {
            Domain::UnitSquare { a } => p.x.min(p.y).min(a - p.x).min(a - p.y),
            Domain::Disk { r } => r - p.coords.norm(),
        }
    }
}

/// Initial generator layout: a jittered triangular lattice trimmed to
/// exactly `n` seeds. Lloyd relaxation started from a near-hexagonal packing
/// settles into a low-defect centroidal tessellation; purely random starts
/// keep grain boundaries through any number of sweeps, and the resulting
/// cell irregularity measurably degrades the fine-mesh convergence rates of
/// thick plates (the assumed shear field is exact only for constant shear,
/// and its first-order error cancels on point-symmetric cells).
fn initial_seeds(domain: &Domain, n: usize, rng: &mut impl Rng) -> Vec<Point> {
    if n < 8 {
        return (0..n).map(|_| domain.sample(rng)).collect();
    }
    // TEMP experiment knobs
    let jitter_frac: f64 = std::env::var("POLYPLATE_JITTER")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(0.2);
    let mix_frac: f64 = std::env::var("POLYPLATE_MIX")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(0.0);
    if let Domain::Disk { r } = domain {
        // Concentric rings of near-hexagonal spacing: the annular layout
        // matches the circular boundary, so Lloyd settles into a low-defect
        // tessellation without a lattice-orientation mismatch at the rim.
        let d = (2.0 * domain.area() / (3f64.sqrt() * n as f64)).sqrt();
        let rings = ((r / (3f64.sqrt() / 2.0 * d)) - 0.5).round().max(1.0) as usize;
        let dr = r / (rings as f64 + 0.5);
        let radii: Vec<f64> = (0..=rings).map(|j| j as f64 * dr).collect();
        // Ring populations proportional to circumference, scaled to sum n.
        let weights: Vec<f64> = radii
            .iter()
            .map(|rj| if *rj == 0.0 { 1.0 } else { 2.0 * std::f64::consts::PI * rj / d })
            .collect();
        let total: f64 = weights.iter().sum();
        let mut counts: Vec<usize> = weights
            .iter()
            .map(|w| ((w / total) * n as f64).floor() as usize)
            .collect();
        counts[0] = counts[0].max(1);
        let mut assigned: usize = counts.iter().sum();
        // Largest-remainder top-up, inner rings first for determinism.
        let mut j = rings;
        while assigned < n {
            counts[j] += 1;
            assigned += 1;
            j = if j <= 1 { rings } else { j - 1 };
        }
        while assigned > n {
            let k = counts.iter().rposition(|&c| c > 1).unwrap_or(rings);
            counts[k] -= 1;
            assigned -= 1;
        }
        let jitter = jitter_frac * d;
        let mut pts = Vec::with_capacity(n);
        for (j, (&rj, &cj)) in radii.iter().zip(counts.iter()).enumerate() {
            for k in 0..cj {
                let t = 2.0 * std::f64::consts::PI * (k as f64 + 0.5 * (j % 2) as f64)
                    / cj as f64;
                let mut p = Point::new(rj * t.cos(), rj * t.sin());
                let moved =
                    Point::new(p.x + rng.gen_range(-jitter..jitter), p.y + rng.gen_range(-jitter..jitter));
                if domain.boundary_distance(moved) > 0.05 * d {
                    p = moved;
                }
                pts.push(p);
            }
        }
        return pts;
    }
    let lattice = |dx: f64| -> Vec<Point> {
        let dy = dx * 3f64.sqrt() / 2.0;
        let (lo, hi) = (domain.bbox_min(), domain.bbox_max());
        let margin = 0.3 * dx;
        let mut pts = Vec::new();
        let mut row = 0usize;
        let mut y = lo.y + 0.5 * dy;
        while y < hi.y {
            let mut x = lo.x + if row % 2 == 0 { 0.25 * dx } else { 0.75 * dx };
            while x < hi.x {
                let p = Point::new(x, y);
                if domain.boundary_distance(p) > margin {
                    pts.push(p);
                }
                x += dx;
            }
            row += 1;
            y += dy;
        }
        pts
    };
    // Hexagonal packing density: n cells of spacing dx cover n * sqrt(3)/2 * dx^2.
    let nominal = (2.0 * domain.area() / (3f64.sqrt() * n as f64)).sqrt();
    // Bisect the spacing to the coarsest lattice still holding >= n points.
    let (mut lo_dx, mut hi_dx) = (0.5 * nominal, 2.0 * nominal);
    for _ in 0..50 {
        let mid = 0.5 * (lo_dx + hi_dx);
        if lattice(mid).len() >= n {
            lo_dx = mid;
        } else {
            hi_dx = mid;
        }
    }
    let mut pts = lattice(lo_dx);
    // Trim the surplus near the boundary; Lloyd evens out the larger cells.
    pts.sort_by(|a, b| {
        domain
            .boundary_distance(*b)
            .partial_cmp(&domain.boundary_distance(*a))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    pts.truncate(n);
    let jitter = jitter_frac * lo_dx;
    for p in pts.iter_mut() {
        let moved = Point::new(
            p.x + rng.gen_range(-jitter..jitter),
            p.y + rng.gen_range(-jitter..jitter),
        );
        if domain.boundary_distance(moved) > 0.05 * lo_dx {
            *p = moved;
        }
    }
    pts
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshKind {
    StructuredQuad,
    Trapezoidal,
    CvtPolygonal,
}

/// Parameters for the mesh generators.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshSpec {
    pub domain: Domain,
    pub kind: MeshKind,
    pub target_elements: usize,
    pub seed: u64,
}

impl MeshSpec {
    pub fn validate(&self) -> Result<()> {
        self.domain.validate()?;
        if self.target_elements < 1 {
            return Err(Error::invalid_argument("target_elements must be >= 1"));
        }
        Ok(())
    }
}

/// Generates a Lloyd-relaxed Voronoi mesh of `spec.target_elements` convex
/// cells; deterministic for a fixed seed.
pub fn generate_cvt_polygonal(spec: &MeshSpec, lloyd_iters: usize) -> Result<PolyMesh> {
    spec.validate()?;
    let n = spec.target_elements;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut seeds = initial_seeds(&spec.domain, n, &mut rng);

    let domain_poly = spec.domain.clip_polygon();
    let mut cells = Vec::new();
    for iter in 0..=lloyd_iters {
        cells = voronoi_cells(&seeds, &spec.domain, &domain_poly)?;
        if iter < lloyd_iters {
            for (s, cell) in seeds.iter_mut().zip(&cells) {
                *s = geometry::centroid(cell);
            }
        }
    }
    build_conforming_mesh(cells, &spec.domain)
}

/// Generates a square or disk CVT mesh targeting an approximate node count
/// (node counts cannot be hit exactly; seeds are adjusted iteratively).
pub fn generate_cvt_with_node_target(
    domain: Domain,
    target_nodes: usize,
    lloyd_iters: usize,
    seed: u64,
) -> Result<PolyMesh> {
    let mut elements = (target_nodes / 2).max(1);
    let mut best: Option<(usize, PolyMesh)> = None;
    for _ in 0..5 {
        let spec = MeshSpec {
            domain,
            kind: MeshKind::CvtPolygonal,
            target_elements: elements,
            seed,
        };
        let mesh = generate_cvt_polygonal(&spec, lloyd_iters)?;
        let nodes = mesh.num_nodes();
        let gap = nodes.abs_diff(target_nodes);
        if best.as_ref().map_or(true, |(g, _)| gap < *g) {
            best = Some((gap, mesh));
        }
        if gap * 50 <= target_nodes {
            break;
        }
        let scaled = (elements as f64 * target_nodes as f64 / nodes as f64).round() as usize;
        if scaled == elements {
            break;
        }
        elements = scaled.max(1);
    }
    Ok(best.unwrap().1)
}

/// Voronoi cells of all seeds, clipped to the domain.
fn voronoi_cells(seeds: &[Point], domain: &Domain, domain_poly: &[Point]) -> Result<Vec<Vec<Point>>> {
    let n = seeds.len();
    let scale = domain.scale();
    let coincide_tol = 1e-12 * scale;

    // Hash grid sized to the expected seed spacing.
    let cell = (domain.area() / n as f64).sqrt().max(1e-12 * scale);
    let key = |p: Point| ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64);
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, s) in seeds.iter().enumerate() {
        grid.entry(key(*s)).or_default().push(i);
    }
    let max_ring = (2.5 * scale / cell).ceil() as i64 + 2;

    // Disk cells start from a circumscribed octagon so bisector clipping
    // works on a small polygon; the fine 512-gon clip runs afterwards.
    let start_poly: Vec<Point> = match domain {
        Domain::UnitSquare { .. } => domain_poly.to_vec(),
        Domain::Disk { r } => {
            let rc = r / (std::f64::consts::PI / 8.0).cos();
            (0..8)
                .map(|i| {
                    let t = 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / 8.0;
                    Point::new(rc * t.cos(), rc * t.sin())
                })
                .collect()
        }
    };

    let mut cells = Vec::with_capacity(n);
    for (i, &si) in seeds.iter().enumerate() {
        let mut poly = start_poly.clone();
        let (ci, cj) = key(si);
        let mut ring: i64 = 0;
        loop {
            // Seeds in the square ring at Chebyshev distance `ring`.
            let mut any = false;
            for dx in -ring..=ring {
                for dy in -ring..=ring {
                    if dx.abs().max(dy.abs()) != ring {
                        continue;
                    }
                    let Some(list) = grid.get(&(ci + dx, cj + dy)) else {
                        continue;
                    };
                    any = true;
                    for &j in list {
                        if j == i {
                            continue;
                        }
                        let sj = seeds[j];
                        let d = sj - si;
                        let dist = d.norm();
                        if dist < coincide_tol {
                            return Err(Error::MeshGeneration(format!(
                                "seeds {i} and {j} coincide at ({:.6}, {:.6})",
                                si.x, si.y
                            )));
                        }
                        let offset = 0.5 * (sj.coords.norm_squared() - si.coords.norm_squared());
                        poly = clip_halfplane(&poly, d, offset);
                        if poly.len() < 3 {
                            return Err(Error::MeshGeneration(format!(
                                "Voronoi cell of seed {i} degenerated"
                            )));
                        }
                    }
                }
            }
            let _ = any;
            // Security radius: a seed farther than twice the cell's farthest
            // vertex cannot cut the cell any more.
            let r_max = poly
                .iter()
                .map(|v| (v - si).norm())
                .fold(0.0_f64, f64::max);
            if ring as f64 * cell >= 2.0 * r_max || ring > max_ring {
                break;
            }
            ring += 1;
        }
        if let Domain::Disk { r } = domain {
            poly = clip_to_disk_polygon(poly, domain_poly, *r)?;
        }
        cells.push(poly);
    }
    Ok(cells)
}

/// Clips a convex cell to the inscribed 512-gon, restricting to the angular
/// window covered by the cell whenever possible.
fn clip_to_disk_polygon(poly: Vec<Point>, disk_poly: &[Point], r: f64) -> Result<Vec<Point>> {
    let m = disk_poly.len();
    let apothem = r * (std::f64::consts::PI / m as f64).cos();
    let max_r = poly.iter().map(|v| v.coords.norm()).fold(0.0, f64::max);
    if max_r <= apothem {
        return Ok(poly);
    }

    let seg = |k: usize| {
        let a = disk_poly[k % m];
        let b = disk_poly[(k + 1) % m];
        // Inward half-plane of the chord.
        let e = b - a;
        let normal = Vector::new(e.y, -e.x);
        let offset = normal.dot(&a.coords);
        (normal, offset)
    };

    // Angular window of the cell around its mean direction.
    let c = geometry::centroid(&poly);
    let a0 = c.y.atan2(c.x);
    let mut spread: f64 = 0.0;
    for v in &poly {
        let da = angle_diff(v.y.atan2(v.x), a0);
        spread = spread.max(da.abs());
    }

    let mut out = poly;
    if spread > 1.2 {
        for k in 0..m {
            let (normal, offset) = seg(k);
            out = clip_halfplane(&out, normal, offset);
            if out.len() < 3 {
                return Err(Error::MeshGeneration("cell vanished in disk clip".into()));
            }
        }
    } else {
        let step = 2.0 * std::f64::consts::PI / m as f64;
        let k0 = ((a0 - spread) / step).floor() as i64 - 2;
        let k1 = ((a0 + spread) / step).ceil() as i64 + 2;
        for k in k0..=k1 {
            let (normal, offset) = seg(k.rem_euclid(m as i64) as usize);
            out = clip_halfplane(&out, normal, offset);
            if out.len() < 3 {
                return Err(Error::MeshGeneration("cell vanished in disk clip".into()));
            }
        }
    }
    Ok(out)
}

fn angle_diff(a: f64, b: f64) -> f64 {
    let mut d = a - b;
    while d > std::f64::consts::PI {
        d -= 2.0 * std::f64::consts::PI;
    }
    while d < -std::f64::consts::PI {
        d += 2.0 * std::f64::consts::PI;
    }
    d
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VertexClass {
    Interior,
    Boundary,
    Corner,
}

fn classify(p: Point, domain: &Domain, tol: f64) -> VertexClass {
    match domain {
        Domain::UnitSquare { a } => {
            let on = [
                p.x.abs() < tol,
                (p.x - a).abs() < tol,
                p.y.abs() < tol,
                (p.y - a).abs() < tol,
            ];
            match on.iter().filter(|&&b| b).count() {
                0 => VertexClass::Interior,
                1 => VertexClass::Boundary,
                _ => VertexClass::Corner,
            }
        }
        Domain::Disk { r } => {
            // Boundary vertices lie on (or will be projected to) the circle.
            let apothem = r * (std::f64::consts::PI / DISK_SEGMENTS as f64).cos();
            if p.coords.norm() >= apothem - tol {
                VertexClass::Boundary
            } else {
                VertexClass::Interior
            }
        }
    }
}

/// Welds cell vertices, collapses degenerate short edges, projects disk
/// boundary nodes onto the circle, and assembles a validated mesh.
fn build_conforming_mesh(cells: Vec<Vec<Point>>, domain: &Domain) -> Result<PolyMesh> {
    let scale = domain.scale();
    let weld_tol = 1e-9 * scale;

    // Weld coincident vertices with a hash-grid neighborhood lookup.
    let inv = 1.0 / (4.0 * weld_tol);
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    let mut vertices: Vec<Point> = Vec::new();
    let mut loops: Vec<Vec<usize>> = Vec::with_capacity(cells.len());
    for cell in &cells {
        let mut loop_ = Vec::with_capacity(cell.len());
        for &p in cell {
            let key = ((p.x * inv).floor() as i64, (p.y * inv).floor() as i64);
            let mut found = None;
            'search: for dx in -1..=1 {
                for dy in -1..=1 {
                    if let Some(list) = grid.get(&(key.0 + dx, key.1 + dy)) {
                        for &id in list {
                            if (vertices[id] - p).norm() < weld_tol {
                                found = Some(id);
                                break 'search;
                            }
                        }
                    }
                }
            }
            let id = found.unwrap_or_else(|| {
                vertices.push(p);
                grid.entry(key).or_default().push(vertices.len() - 1);
                vertices.len() - 1
            });
            loop_.push(id);
        }
        dedup_loop(&mut loop_);
        if loop_.len() < 3 {
            return Err(Error::MeshGeneration("welded cell degenerated".into()));
        }
        loops.push(loop_);
    }

    // Project disk boundary vertices onto the exact circle before edge
    // collapse so geometric checks see final coordinates.
    let class_tol = 1e-7 * scale;
    if let Domain::Disk { r } = domain {
        for v in vertices.iter_mut() {
            if classify(*v, domain, class_tol) == VertexClass::Boundary {
                let norm = v.coords.norm();
                if norm > 0.0 {
                    *v = Point::from(v.coords * (*r / norm));
                }
            }
        }
    }

    collapse_short_edges(&mut vertices, &mut loops, domain, scale)?;

    // Compact unused vertex ids.
    let mut remap = vec![usize::MAX; vertices.len()];
    let mut packed = Vec::new();
    for loop_ in &loops {
        for &v in loop_ {
            if remap[v] == usize::MAX {
                remap[v] = packed.len();
                packed.push(vertices[v]);
            }
        }
    }
    let loops: Vec<Vec<usize>> = loops
        .into_iter()
        .map(|l| l.into_iter().map(|v| remap[v]).collect())
        .collect();

    let boundary = match domain {
        Domain::UnitSquare { a } => {
            let a = *a;
            derive_boundary_edges(&packed, &loops, super::square_side_tag(a))
        }
        Domain::Disk { .. } => derive_boundary_edges(&packed, &loops, |_| "circle".into()),
    };
    PolyMesh::new(packed, loops, boundary)
}

fn dedup_loop(loop_: &mut Vec<usize>) {
    loop_.dedup();
    while loop_.len() > 1 && loop_.first() == loop_.last() {
        loop_.pop();
    }
}

/// Greedy collapse of edges much shorter than their elements' mean edge
/// length. Each collapse is validated against the affected cells and undone
/// if it would break convexity or orientation.
fn collapse_short_edges(
    vertices: &mut [Point],
    loops: &mut [Vec<usize>],
    domain: &Domain,
    scale: f64,
) -> Result<()> {
    let class_tol = 1e-7 * scale;
    let conv_tol = 1e-12 * scale * scale;

    let mut vertex_elems: HashMap<usize, Vec<usize>> = HashMap::new();
    for (e, loop_) in loops.iter().enumerate() {
        for &v in loop_ {
            vertex_elems.entry(v).or_default().push(e);
        }
    }

    let mean_edge = |loop_: &[usize], vertices: &[Point]| -> f64 {
        let n = loop_.len();
        (0..n)
            .map(|k| (vertices[loop_[(k + 1) % n]] - vertices[loop_[k]]).norm())
            .sum::<f64>()
            / n as f64
    };

    let mut rejected: std::collections::HashSet<(usize, usize)> = Default::default();
    loop {
        // Shortest candidate edge below the per-element relative threshold.
        let mut candidate: Option<(usize, usize, f64)> = None;
        for loop_ in loops.iter() {
            let n = loop_.len();
            let me = mean_edge(loop_, vertices);
            for k in 0..n {
                let a = loop_[k];
                let b = loop_[(k + 1) % n];
                let kk = (a.min(b), a.max(b));
                if rejected.contains(&kk) {
                    continue;
                }
                let len = (vertices[b] - vertices[a]).norm();
                if len < 0.25 * me && candidate.map_or(true, |(_, _, l)| len < l) {
                    candidate = Some((kk.0, kk.1, len));
                }
            }
        }
        let Some((a, b, _)) = candidate else { break };

        let ca = classify(vertices[a], domain, class_tol);
        let cb = classify(vertices[b], domain, class_tol);
        let new_pos = match (ca, cb) {
            (VertexClass::Corner, VertexClass::Corner) => {
                rejected.insert((a, b));
                continue;
            }
            (VertexClass::Corner, _) => vertices[a],
            (_, VertexClass::Corner) => vertices[b],
            (VertexClass::Boundary, VertexClass::Interior) => vertices[a],
            (VertexClass::Interior, VertexClass::Boundary) => vertices[b],
            (VertexClass::Boundary, VertexClass::Boundary) => {
                let mid = Point::from(0.5 * (vertices[a].coords + vertices[b].coords));
                match domain {
                    Domain::Disk { r } => Point::from(mid.coords * (*r / mid.coords.norm())),
                    Domain::UnitSquare { .. } => {
                        if classify(mid, domain, class_tol) == VertexClass::Boundary {
                            mid
                        } else {
                            // Endpoints on different sides; leave alone.
                            rejected.insert((a, b));
                            continue;
                        }
                    }
                }
            }
            (VertexClass::Interior, VertexClass::Interior) => {
                Point::from(0.5 * (vertices[a].coords + vertices[b].coords))
            }
        };

        // Tentative merged loops for every affected element.
        let mut affected: Vec<usize> = Vec::new();
        for &e in vertex_elems.get(&a).into_iter().flatten() {
            affected.push(e);
        }
        for &e in vertex_elems.get(&b).into_iter().flatten() {
            if !affected.contains(&e) {
                affected.push(e);
            }
        }
        let old_pos_a = vertices[a];
        vertices[a] = new_pos;
        let mut new_loops: Vec<(usize, Vec<usize>)> = Vec::new();
        let mut ok = true;
        for &e in &affected {
            let mut l: Vec<usize> = loops[e]
                .iter()
                .map(|&v| if v == b { a } else { v })
                .collect();
            dedup_loop(&mut l);
            let mut sorted = l.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if l.len() < 3 || sorted.len() != l.len() {
                ok = false;
                break;
            }
            let poly: Vec<Point> = l.iter().map(|&v| vertices[v]).collect();
            if !geometry::is_convex_ccw(&poly, conv_tol) || corner_min_sine(&poly) < 1e-8 {
                ok = false;
                break;
            }
            new_loops.push((e, l));
        }
        if !ok {
            vertices[a] = old_pos_a;
            rejected.insert((a, b));
            continue;
        }
        for (e, l) in new_loops {
            loops[e] = l;
        }
        let merged: Vec<usize> = vertex_elems.remove(&b).unwrap_or_default();
        let list = vertex_elems.entry(a).or_default();
        for e in merged {
            if !list.contains(&e) {
                list.push(e);
            }
        }
    }
    Ok(())
}

fn corner_min_sine(poly: &[Point]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| {
            let e0 = (poly[i] - poly[(i + n - 1) % n]).normalize();
            let e1 = (poly[(i + 1) % n] - poly[i]).normalize();
            geometry::cross(e0, e1).abs()
        })
        .fold(f64::INFINITY, f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn square_spec(target: usize, seed: u64) -> MeshSpec {
        MeshSpec {
            domain: Domain::UnitSquare { a: 1.0 },
            kind: MeshKind::CvtPolygonal,
            target_elements: target,
            seed,
        }
    }

    #[test]
    fn raw_voronoi_covers_square() {
        let mesh = generate_cvt_polygonal(&square_spec(16, 42), 0).unwrap();
        assert_eq!(mesh.num_elements(), 16);
        assert_relative_eq!(mesh.total_area(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn single_seed_gives_the_square() {
        let mesh = generate_cvt_polygonal(&square_spec(1, 3), 0).unwrap();
        assert_eq!(mesh.num_elements(), 1);
        assert_eq!(mesh.num_nodes(), 4);
        assert_relative_eq!(mesh.total_area(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn lloyd_relaxation_is_deterministic() {
        let a = generate_cvt_polygonal(&square_spec(32, 7), 20).unwrap();
        let b = generate_cvt_polygonal(&square_spec(32, 7), 20).unwrap();
        assert_eq!(a, b);
        let c = generate_cvt_polygonal(&square_spec(32, 8), 20).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn relaxed_square_meshes_validate() {
        for (target, seed) in [(16usize, 42u64), (64, 1), (200, 5)] {
            let mesh = generate_cvt_polygonal(&square_spec(target, seed), 50).unwrap();
            assert_eq!(mesh.num_elements(), target);
            assert_relative_eq!(mesh.total_area(), 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn disk_area_matches_circle() {
        // The boundary polyline resolves the circle at the resolution of the
        // 512-gon used for clipping, so the area deficit is bounded by the
        // 512-gon sagitta (about 2.5e-5 relative) independent of the target.
        let exact = std::f64::consts::PI;
        for target in [50usize, 200] {
            let spec = MeshSpec {
                domain: Domain::Disk { r: 1.0 },
                kind: MeshKind::CvtPolygonal,
                target_elements: target,
                seed: 7,
            };
            let mesh = generate_cvt_polygonal(&spec, 60).unwrap();
            let err = (mesh.total_area() - exact).abs() / exact;
            assert!(err < 1e-4, "disk area error {err}");
        }
    }

    #[test]
    fn disk_boundary_nodes_on_circle() {
        let spec = MeshSpec {
            domain: Domain::Disk { r: 1.0 },
            kind: MeshKind::CvtPolygonal,
            target_elements: 100,
            seed: 11,
        };
        let mesh = generate_cvt_polygonal(&spec, 50).unwrap();
        for &v in mesh.boundary_nodes().iter() {
            let r = mesh.vertices()[v].coords.norm();
            assert!((r - 1.0).abs() < 1e-12, "boundary node radius {r}");
        }
    }

    #[test]
    fn coincident_seeds_are_reported() {
        // Two seeds forced onto the same point via a degenerate domain is
        // hard to construct through the public API; drive voronoi_cells
        // directly instead.
        let seeds = vec![Point::new(0.3, 0.3), Point::new(0.3, 0.3)];
        let domain = Domain::UnitSquare { a: 1.0 };
        let poly = domain.clip_polygon();
        let err = voronoi_cells(&seeds, &domain, &poly).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("seeds 0 and 1") || msg.contains("seeds 1 and 0"), "{msg}");
    }

    #[test]
    fn node_target_is_approximate() {
        let mesh = generate_cvt_with_node_target(Domain::UnitSquare { a: 1.0 }, 200, 30, 2).unwrap();
        let nodes = mesh.num_nodes();
        assert!(
            (140..=260).contains(&nodes),
            "node count {nodes} too far from 200"
        );
    }

    #[test]
    fn roundtrip_cvt_mesh() {
        let mesh = generate_cvt_polygonal(&square_spec(40, 9), 30).unwrap();
        let back = super::super::mesh_from_str(&super::super::mesh_to_string(&mesh)).unwrap();
        assert_eq!(mesh, back);
    }
}
