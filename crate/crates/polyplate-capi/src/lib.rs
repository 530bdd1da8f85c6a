//! C ABI for the `polyplate` plate element library.
//!
//! Conventions:
//! - Every fallible function returns a [`PpStatus`]; `PP_STATUS_OK` (0)
//!   means success. On failure a thread-local message is available through
//!   [`pp_last_error_message`].
//! - Meshes and solutions are opaque handles created and destroyed by this
//!   library; passing a handle after freeing it is undefined behavior.
//! - All output parameters are written only on success.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;

use polyplate::element::PlateMaterial;
use polyplate::mesh::{
    generate_cvt_polygonal, generate_structured_quad, generate_trapezoidal, read_mesh, write_mesh,
    Domain, MeshKind, MeshSpec, PolyMesh, DEFAULT_LLOYD_ITERS,
};
use polyplate::system::{solve_plate, BoundaryCondition, BoundaryConditions, PlateSolution};
use polyplate::Error;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum PpStatus {
    Ok = 0,
    /// A pointer argument was null.
    NullPointer = 1,
    /// An argument was out of range or otherwise invalid.
    InvalidArgument = 2,
    /// A mesh file or polygon description failed to parse or validate.
    ParseError = 3,
    /// Factorization or solve failed (singular or ill-conditioned system).
    SolverError = 4,
    /// File input/output failed.
    IoError = 5,
    /// Any other internal error.
    InternalError = 6,
}

/// Boundary condition applied on the whole boundary.
#[repr(C)]
#[derive(Clone, Copy)]
pub enum PpBc {
    Clamped = 0,
    HardSimplySupported = 1,
}

/// Opaque polygonal mesh handle.
pub struct PpMesh(PolyMesh);

/// Opaque plate solution handle.
pub struct PpSolution(PlateSolution);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn status_of(err: &Error) -> PpStatus {
    match err {
        Error::InvalidArgument(_) | Error::Config(_) => PpStatus::InvalidArgument,
        Error::Parse { .. } | Error::MeshValidation(_) => PpStatus::ParseError,
        Error::Solver(_) => PpStatus::SolverError,
        Error::Io(_) => PpStatus::IoError,
        _ => PpStatus::InternalError,
    }
}

fn fail(err: Error) -> PpStatus {
    let status = status_of(&err);
    set_error(&err.to_string());
    status
}

fn null_pointer(what: &str) -> PpStatus {
    set_error(&format!("{what} must not be null"));
    PpStatus::NullPointer
}

/// # Safety
/// `path` must be a valid NUL-terminated string.
unsafe fn path_arg(path: *const c_char, what: &str) -> Result<PathBuf, PpStatus> {
    if path.is_null() {
        return Err(null_pointer(what));
    }
    match CStr::from_ptr(path).to_str() {
        Ok(s) => Ok(PathBuf::from(s)),
        Err(_) => {
            set_error(&format!("{what} is not valid UTF-8"));
            Err(PpStatus::InvalidArgument)
        }
    }
}

/// Returns the message of the most recent error on this thread, or an empty
/// string. The pointer stays valid until the next failing call on the same
/// thread; do not free it.
#[no_mangle]
pub extern "C" fn pp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Returns the library version as a static string; do not free it.
#[no_mangle]
pub extern "C" fn pp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Creates a structured n-by-n quadrilateral mesh of the square [0, a]^2.
///
/// # Safety
/// `out` must point to a writable `PpMesh*` slot.
#[no_mangle]
pub unsafe extern "C" fn pp_mesh_structured(
    a: f64,
    n: usize,
    out: *mut *mut PpMesh,
) -> PpStatus {
    if out.is_null() {
        return null_pointer("out");
    }
    match generate_structured_quad(a, n) {
        Ok(mesh) => {
            *out = Box::into_raw(Box::new(PpMesh(mesh)));
            PpStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Creates a trapezoidal n-by-n mesh of the square [0, a]^2 with the given
/// skew in (-1, 1).
///
/// # Safety
/// `out` must point to a writable `PpMesh*` slot.
#[no_mangle]
pub unsafe extern "C" fn pp_mesh_trapezoidal(
    a: f64,
    n: usize,
    skew: f64,
    out: *mut *mut PpMesh,
) -> PpStatus {
    if out.is_null() {
        return null_pointer("out");
    }
    match generate_trapezoidal(a, n, skew) {
        Ok(mesh) => {
            *out = Box::into_raw(Box::new(PpMesh(mesh)));
            PpStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Creates a centroidal-Voronoi polygonal mesh. `disk` selects the unit
/// domain shape: square of side `size` when false, disk of radius `size`
/// when true. Deterministic for a fixed `seed`.
///
/// # Safety
/// `out` must point to a writable `PpMesh*` slot.
#[no_mangle]
pub unsafe extern "C" fn pp_mesh_cvt(
    disk: bool,
    size: f64,
    target_elements: usize,
    seed: u64,
    out: *mut *mut PpMesh,
) -> PpStatus {
    if out.is_null() {
        return null_pointer("out");
    }
    let domain = if disk {
        Domain::Disk { r: size }
    } else {
        Domain::UnitSquare { a: size }
    };
    let spec = MeshSpec {
        domain,
        kind: MeshKind::CvtPolygonal,
        target_elements,
        seed,
    };
    match generate_cvt_polygonal(&spec, DEFAULT_LLOYD_ITERS) {
        Ok(mesh) => {
            *out = Box::into_raw(Box::new(PpMesh(mesh)));
            PpStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Reads a mesh from a `polyplate-mesh v1` text file.
///
/// # Safety
/// `path` must be a valid NUL-terminated string and `out` a writable
/// `PpMesh*` slot.
#[no_mangle]
pub unsafe extern "C" fn pp_mesh_read(path: *const c_char, out: *mut *mut PpMesh) -> PpStatus {
    if out.is_null() {
        return null_pointer("out");
    }
    let path = match path_arg(path, "path") {
        Ok(p) => p,
        Err(s) => return s,
    };
    match read_mesh(&path) {
        Ok(mesh) => {
            *out = Box::into_raw(Box::new(PpMesh(mesh)));
            PpStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Writes a mesh to a `polyplate-mesh v1` text file.
///
/// # Safety
/// `mesh` must be a live handle and `path` a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn pp_mesh_write(mesh: *const PpMesh, path: *const c_char) -> PpStatus {
    let Some(mesh) = mesh.as_ref() else {
        return null_pointer("mesh");
    };
    let path = match path_arg(path, "path") {
        Ok(p) => p,
        Err(s) => return s,
    };
    match write_mesh(&mesh.0, &path) {
        Ok(()) => PpStatus::Ok,
        Err(e) => fail(e),
    }
}

/// Number of nodes of a mesh; zero for a null handle.
///
/// # Safety
/// `mesh` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pp_mesh_num_nodes(mesh: *const PpMesh) -> usize {
    mesh.as_ref().map_or(0, |m| m.0.num_nodes())
}

/// Number of elements of a mesh; zero for a null handle.
///
/// # Safety
/// `mesh` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pp_mesh_num_elements(mesh: *const PpMesh) -> usize {
    mesh.as_ref().map_or(0, |m| m.0.num_elements())
}

/// Total mesh area; zero for a null handle.
///
/// # Safety
/// `mesh` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pp_mesh_total_area(mesh: *const PpMesh) -> f64 {
    mesh.as_ref().map_or(0.0, |m| m.0.total_area())
}

/// Frees a mesh handle; null is a no-op.
///
/// # Safety
/// `mesh` must be null or a live handle, and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn pp_mesh_free(mesh: *mut PpMesh) {
    if !mesh.is_null() {
        drop(Box::from_raw(mesh));
    }
}

/// Solves the plate problem on `mesh` under uniform transverse pressure `q`
/// with the boundary condition applied on the whole boundary.
///
/// `youngs_modulus`, `poisson_ratio` and `thickness` define the isotropic
/// Reissner-Mindlin material (shear correction factor 5/6).
///
/// # Safety
/// `mesh` must be a live handle and `out` a writable `PpSolution*` slot.
#[no_mangle]
pub unsafe extern "C" fn pp_solve(
    mesh: *const PpMesh,
    youngs_modulus: f64,
    poisson_ratio: f64,
    thickness: f64,
    q: f64,
    bc: PpBc,
    out: *mut *mut PpSolution,
) -> PpStatus {
    let Some(mesh) = mesh.as_ref() else {
        return null_pointer("mesh");
    };
    if out.is_null() {
        return null_pointer("out");
    }
    let material = match PlateMaterial::new(youngs_modulus, poisson_ratio, thickness) {
        Ok(m) => m,
        Err(e) => return fail(e),
    };
    let condition = match bc {
        PpBc::Clamped => BoundaryCondition::Clamped,
        PpBc::HardSimplySupported => BoundaryCondition::HardSimplySupported,
    };
    let bcs = BoundaryConditions::uniform(&mesh.0, condition);
    match solve_plate(&mesh.0, &material, &|_| q, &bcs) {
        Ok(solution) => {
            *out = Box::into_raw(Box::new(PpSolution(solution)));
            PpStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Reads the nodal solution (deflection `w` and rotations `beta_x`,
/// `beta_y`) at a node index.
///
/// # Safety
/// `solution` must be a live handle; `w`, `beta_x` and `beta_y` must be
/// writable `double` slots.
#[no_mangle]
pub unsafe extern "C" fn pp_solution_node_values(
    solution: *const PpSolution,
    node: usize,
    w: *mut f64,
    beta_x: *mut f64,
    beta_y: *mut f64,
) -> PpStatus {
    let Some(solution) = solution.as_ref() else {
        return null_pointer("solution");
    };
    if w.is_null() || beta_x.is_null() || beta_y.is_null() {
        return null_pointer("output slot");
    }
    if node >= solution.0.mesh().num_nodes() {
        set_error("node index out of range");
        return PpStatus::InvalidArgument;
    }
    let (wv, beta) = solution.0.node_values(node);
    *w = wv;
    *beta_x = beta.x;
    *beta_y = beta.y;
    PpStatus::Ok
}

/// Interpolated deflection at an interior point (x, y).
///
/// # Safety
/// `solution` must be a live handle and `w` a writable `double` slot.
#[no_mangle]
pub unsafe extern "C" fn pp_solution_deflection_at(
    solution: *const PpSolution,
    x: f64,
    y: f64,
    w: *mut f64,
) -> PpStatus {
    let Some(solution) = solution.as_ref() else {
        return null_pointer("solution");
    };
    if w.is_null() {
        return null_pointer("w");
    }
    match solution.0.deflection_at(polyplate::geometry::Point::new(x, y)) {
        Ok(v) => {
            *w = v;
            PpStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Sum of the transverse reaction forces on constrained nodes (balances the
/// negative of the total applied load); zero for a null handle.
///
/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pp_solution_total_w_reaction(solution: *const PpSolution) -> f64 {
    solution.as_ref().map_or(0.0, |s| s.0.total_w_reaction())
}

/// Frees a solution handle; null is a no-op.
///
/// # Safety
/// `solution` must be null or a live handle, and must not be used
/// afterwards.
#[no_mangle]
pub unsafe extern "C" fn pp_solution_free(solution: *mut PpSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    fn cstr(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    #[test]
    fn solve_round_trip_through_the_c_abi() {
        unsafe {
            let mut mesh: *mut PpMesh = ptr::null_mut();
            assert!(pp_mesh_structured(1.0, 8, &mut mesh) == PpStatus::Ok);
            assert_eq!(pp_mesh_num_nodes(mesh), 81);
            assert_eq!(pp_mesh_num_elements(mesh), 64);
            assert!((pp_mesh_total_area(mesh) - 1.0).abs() < 1e-12);

            let mut solution: *mut PpSolution = ptr::null_mut();
            let status = pp_solve(
                mesh,
                10.92e6,
                0.3,
                0.01,
                1.0,
                PpBc::Clamped,
                &mut solution,
            );
            assert!(status == PpStatus::Ok);

            // Load balance: total reaction equals minus the applied load.
            let reaction = pp_solution_total_w_reaction(solution);
            assert!((reaction + 1.0).abs() < 1e-8, "reaction {reaction}");

            // Center deflection matches the direct library call.
            let mut w = 0.0;
            let status = pp_solution_deflection_at(solution, 0.5, 0.5, &mut w);
            assert!(status == PpStatus::Ok);
            assert!(w > 0.0);

            let (mut wn, mut bx, mut by) = (0.0, 0.0, 0.0);
            let center_node = 40; // node (4, 4) of the 9x9 grid
            let status =
                pp_solution_node_values(solution, center_node, &mut wn, &mut bx, &mut by);
            assert!(status == PpStatus::Ok);
            assert!((wn - w).abs() < 1e-12 * w.abs());

            pp_solution_free(solution);
            pp_mesh_free(mesh);
        }
    }

    #[test]
    fn mesh_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = cstr(dir.path().join("m.txt").to_str().unwrap());
        unsafe {
            let mut mesh: *mut PpMesh = ptr::null_mut();
            assert!(pp_mesh_cvt(false, 1.0, 32, 7, &mut mesh) == PpStatus::Ok);
            assert!(pp_mesh_write(mesh, path.as_ptr()) == PpStatus::Ok);

            let mut back: *mut PpMesh = ptr::null_mut();
            assert!(pp_mesh_read(path.as_ptr(), &mut back) == PpStatus::Ok);
            assert_eq!(pp_mesh_num_nodes(back), pp_mesh_num_nodes(mesh));
            assert_eq!(pp_mesh_num_elements(back), pp_mesh_num_elements(mesh));

            pp_mesh_free(back);
            pp_mesh_free(mesh);
        }
    }

    #[test]
    fn errors_set_status_and_message() {
        unsafe {
            // Null output slot.
            assert!(pp_mesh_structured(1.0, 4, ptr::null_mut()) == PpStatus::NullPointer);

            // Invalid mesh size.
            let mut mesh: *mut PpMesh = ptr::null_mut();
            assert!(pp_mesh_structured(-1.0, 4, &mut mesh) == PpStatus::InvalidArgument);
            let msg = CStr::from_ptr(pp_last_error_message());
            assert!(!msg.to_str().unwrap().is_empty());

            // Unreadable mesh file.
            let path = cstr("/nonexistent/mesh.txt");
            let status = pp_mesh_read(path.as_ptr(), &mut mesh);
            assert!(status == PpStatus::IoError || status == PpStatus::ParseError);

            // Invalid material on a valid mesh.
            assert!(pp_mesh_structured(1.0, 4, &mut mesh) == PpStatus::Ok);
            let mut solution: *mut PpSolution = ptr::null_mut();
            let status = pp_solve(mesh, 1e6, 0.3, -0.1, 1.0, PpBc::Clamped, &mut solution);
            assert!(status == PpStatus::InvalidArgument);
            pp_mesh_free(mesh);
        }
    }

    #[test]
    fn generated_header_exists_and_exports_the_api() {
        let header = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("include")
            .join("polyplate.h");
        let text = std::fs::read_to_string(&header).expect("build.rs generates the header");
        for symbol in [
            "pp_mesh_structured",
            "pp_mesh_cvt",
            "pp_solve",
            "pp_solution_deflection_at",
            "pp_last_error_message",
            "PpStatus",
        ] {
            assert!(text.contains(symbol), "header is missing {symbol}");
        }
    }
}
