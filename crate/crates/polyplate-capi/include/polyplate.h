/* C interface for the polyplate polygonal plate element library. */

#ifndef POLYPLATE_H
#define POLYPLATE_H

/* Generated with cbindgen:0.27.0 */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Boundary condition applied on the whole boundary.
typedef enum PpBc {
  PP_BC_CLAMPED = 0,
  PP_BC_HARD_SIMPLY_SUPPORTED = 1,
} PpBc;

// Status codes returned by every fallible function.
typedef enum PpStatus {
  PP_STATUS_OK = 0,
  // A pointer argument was null.
  PP_STATUS_NULL_POINTER = 1,
  // An argument was out of range or otherwise invalid.
  PP_STATUS_INVALID_ARGUMENT = 2,
  // A mesh file or polygon description failed to parse or validate.
  PP_STATUS_PARSE_ERROR = 3,
  // Factorization or solve failed (singular or ill-conditioned system).
  PP_STATUS_SOLVER_ERROR = 4,
  // File input/output failed.
  PP_STATUS_IO_ERROR = 5,
  // Any other internal error.
  PP_STATUS_INTERNAL_ERROR = 6,
} PpStatus;

// Opaque polygonal mesh handle.
typedef struct PpMesh PpMesh;

// Opaque plate solution handle.
typedef struct PpSolution PpSolution;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Returns the message of the most recent error on this thread, or an empty
// string. The pointer stays valid until the next failing call on the same
// thread; do not free it.
const char *pp_last_error_message(void);

// Returns the library version as a static string; do not free it.
const char *pp_version(void);

// Creates a structured n-by-n quadrilateral mesh of the square [0, a]^2.
//
// # Safety
// `out` must point to a writable `PpMesh*` slot.
enum PpStatus pp_mesh_structured(double a, uintptr_t n, struct PpMesh **out);

// Creates a trapezoidal n-by-n mesh of the square [0, a]^2 with the given
// skew in (-1, 1).
//
// # Safety
// `out` must point to a writable `PpMesh*` slot.
enum PpStatus pp_mesh_trapezoidal(double a, uintptr_t n, double skew, struct PpMesh **out);

// Creates a centroidal-Voronoi polygonal mesh. `disk` selects the unit
// domain shape: square of side `size` when false, disk of radius `size`
// when true. Deterministic for a fixed `seed`.
//
// # Safety
// `out` must point to a writable `PpMesh*` slot.
enum PpStatus pp_mesh_cvt(bool disk,
                          double size,
                          uintptr_t target_elements,
                          uint64_t seed,
                          struct PpMesh **out);

// Reads a mesh from a `polyplate-mesh v1` text file.
//
// # Safety
// `path` must be a valid NUL-terminated string and `out` a writable
// `PpMesh*` slot.
enum PpStatus pp_mesh_read(const char *path, struct PpMesh **out);

// Writes a mesh to a `polyplate-mesh v1` text file.
//
// # Safety
// `mesh` must be a live handle and `path` a valid NUL-terminated string.
enum PpStatus pp_mesh_write(const struct PpMesh *mesh, const char *path);

// Number of nodes of a mesh; zero for a null handle.
//
// # Safety
// `mesh` must be null or a live handle.
uintptr_t pp_mesh_num_nodes(const struct PpMesh *mesh);

// Number of elements of a mesh; zero for a null handle.
//
// # Safety
// `mesh` must be null or a live handle.
uintptr_t pp_mesh_num_elements(const struct PpMesh *mesh);

// Total mesh area; zero for a null handle.
//
// # Safety
// `mesh` must be null or a live handle.
double pp_mesh_total_area(const struct PpMesh *mesh);

// Frees a mesh handle; null is a no-op.
//
// # Safety
// `mesh` must be null or a live handle, and must not be used afterwards.
void pp_mesh_free(struct PpMesh *mesh);

// Solves the plate problem on `mesh` under uniform transverse pressure `q`
// with the boundary condition applied on the whole boundary.
//
// `youngs_modulus`, `poisson_ratio` and `thickness` define the isotropic
// Reissner-Mindlin material (shear correction factor 5/6).
//
// # Safety
// `mesh` must be a live handle and `out` a writable `PpSolution*` slot.
enum PpStatus pp_solve(const struct PpMesh *mesh,
                       double youngs_modulus,
                       double poisson_ratio,
                       double thickness,
                       double q,
                       enum PpBc bc,
                       struct PpSolution **out);

// Reads the nodal solution (deflection `w` and rotations `beta_x`,
// `beta_y`) at a node index.
//
// # Safety
// `solution` must be a live handle; `w`, `beta_x` and `beta_y` must be
// writable `double` slots.
enum PpStatus pp_solution_node_values(const struct PpSolution *solution,
                                      uintptr_t node,
                                      double *w,
                                      double *beta_x,
                                      double *beta_y);

// Interpolated deflection at an interior point (x, y).
//
// # Safety
// `solution` must be a live handle and `w` a writable `double` slot.
enum PpStatus pp_solution_deflection_at(const struct PpSolution *solution,
                                        double x,
                                        double y,
                                        double *w);

// Sum of the transverse reaction forces on constrained nodes (balances the
// negative of the total applied load); zero for a null handle.
//
// # Safety
// `solution` must be null or a live handle.
double pp_solution_total_w_reaction(const struct PpSolution *solution);

// Frees a solution handle; null is a no-op.
//
// # Safety
// `solution` must be null or a live handle, and must not be used
// afterwards.
void pp_solution_free(struct PpSolution *solution);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POLYPLATE_H */
