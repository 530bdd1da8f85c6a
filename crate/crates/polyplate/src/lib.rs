//! Polygonal plate bending elements for thin and thick plates.
//!
//! `polyplate` implements an n-sided Reissner-Mindlin plate element built on
//! Wachspress barycentric coordinates and quadratic serendipity mid-edge
//! functions. Transverse shear is handled with an assumed edge shear field
//! tied to the kinematic variables through per-edge discrete constraints,
//! which keeps the element free of shear locking down to thickness ratios of
//! 1e-5 while retaining proper rank.
//!
//! The crate is organized around the analysis pipeline:
//!
//! - [`mesh`]: polygonal mesh data model, deterministic generators
//!   (structured, trapezoidal, Lloyd-relaxed centroidal Voronoi) and a
//!   plain-text mesh format.
//! - [`basis`]: Wachspress coordinates, serendipity functions and their
//!   analytic gradients, plus quadrature on convex polygons.
//! - [`element`]: the plate element proper - strain-displacement matrices,
//!   the edge-variable elimination operator and element stiffness/load.
//! - [`system`]: dof management, assembly, boundary conditions and the
//!   sparse symmetric solve.
//! - [`verify`]: analytical solutions, error norms and the benchmark
//!   drivers (patch tests, deflection tables, convergence studies).
//! - [`acceptance`]: the scripted verification suite used by both
//!   `polyplate verify-all` and the integration tests.

pub mod acceptance;
pub mod basis;
pub mod config;
pub mod element;
mod error;
pub mod geometry;
pub mod mesh;
pub mod quadrature;
pub mod report;
pub mod system;
pub mod verify;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;
