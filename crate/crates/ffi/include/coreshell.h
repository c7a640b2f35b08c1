#ifndef CORESHELL_H
#define CORESHELL_H

/* Generated by cbindgen from crates/ffi/src. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CsStatus {
  CS_STATUS_OK = 0,
  CS_STATUS_NULL_POINTER = 1,
  CS_STATUS_INVALID_ARGUMENT = 2,
  CS_STATUS_INADMISSIBLE = 3,
  CS_STATUS_NUMERICAL = 4,
  CS_STATUS_BUFFER_TOO_SMALL = 5,
  CS_STATUS_PANIC = 6,
} CsStatus;

typedef enum CsGeometry {
  CS_GEOMETRY_INTERVAL = 0,
  CS_GEOMETRY_RADIAL = 1,
} CsGeometry;

typedef enum CsNorm {
  CS_NORM_H = 0,
  CS_NORM_V = 1,
  CS_NORM_V_SEMI = 2,
  CS_NORM_DA = 3,
} CsNorm;

typedef enum CsSolver {
  CS_SOLVER_GALERKIN = 0,
  CS_SOLVER_FEM = 1,
} CsSolver;

/*
 Assembled operator on a mesh, with an eigenbasis computed on demand.
 */
typedef struct CsProblem CsProblem;

typedef struct CsReaction CsReaction;

typedef struct CsTrajectory CsTrajectory;

/*
 Squared norms of the state at one time level.
 */
typedef struct CsNormRecord {
  double t;
  double h_norm_sq;
  double grad_norm_sq;
  double v_norm_sq;
  double da_norm_sq;
  double u_f_inner;
} CsNormRecord;

/*
 Scalar outcome of the energy-estimate audit. Margins are bound minus
 observed value; `pass` is 1 when every margin is within tolerance.
 */
typedef struct CsEnergySummary {
  double admissibility;
  double gamma;
  double tolerance;
  double worst_weak_margin;
  double sup_margin;
  double integral_margin;
  double strong_margin;
  double admissibility_margin;
  int32_t pass;
} CsEnergySummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Copies the calling thread's last error message (NUL-terminated, truncated
 to fit) into `buf` and returns the full length including the terminator.
 Returns 0 when there is no error. `buf` may be null to query the length.

 # Safety
 `buf` must be null or valid for `len` bytes.
 */
size_t cs_last_error_message(char *buf, size_t len);

/*
 Library version as a static NUL-terminated string.
 */
const char *cs_version(void);

/*
 Builds the geometry, a uniform-per-region mesh with `elements` elements and
 the assembled operator. `epsilon > 0` smooths the coefficient jump over a
 ramp of that width.

 # Safety
 `out` must be valid for writes.
 */
enum CsStatus cs_problem_new(enum CsGeometry kind,
                             uint32_t dimension,
                             double interface,
                             double outer_extent,
                             size_t elements,
                             double b1,
                             double b2,
                             double epsilon,
                             struct CsProblem **out);

/*
 # Safety
 `problem` must be null or a handle from [`cs_problem_new`] not yet freed.
 */
void cs_problem_free(struct CsProblem *problem);

/*
 # Safety
 `problem` must be a live handle; `out` valid for writes.
 */
enum CsStatus cs_problem_node_count(const struct CsProblem *problem, size_t *out);

/*
 Copies node coordinates into `buf` (length at least the node count).

 # Safety
 `problem` must be a live handle; `buf` valid for `len` writes.
 */
enum CsStatus cs_problem_nodes(const struct CsProblem *problem, double *buf, size_t len);

/*
 Writes the `n` smallest eigenvalues in ascending order.

 # Safety
 `problem` must be a live handle; `out` valid for `n` writes.
 */
enum CsStatus cs_problem_eigenvalues(struct CsProblem *problem, size_t n, double *out);

/*
 Writes eigenvector `j` (zero-based, H-normalized) as nodal values.

 # Safety
 `problem` must be a live handle; `buf` valid for `len` writes.
 */
enum CsStatus cs_problem_eigenvector(struct CsProblem *problem, size_t j, double *buf, size_t len);

/*
 # Safety
 `problem` must be a live handle; `u` valid for `len` reads; `out` for one write.
 */
enum CsStatus cs_problem_norm(const struct CsProblem *problem,
                              enum CsNorm kind,
                              const double *u,
                              size_t len,
                              double *out);

/*
 Discrete interface flux jump `b₁u′(Γ⁻) − b₂u′(Γ⁺)`.

 # Safety
 `problem` must be a live handle; `u` valid for `len` reads; `out` for one write.
 */
enum CsStatus cs_problem_flux_jump(const struct CsProblem *problem,
                                   const double *u,
                                   size_t len,
                                   double *out);

/*
 # Safety
 `out` must be valid for writes.
 */
enum CsStatus cs_reaction_zero(struct CsReaction **out);

/*
 # Safety
 `out` must be valid for writes.
 */
enum CsStatus cs_reaction_michaelis_menten(double v_max,
                                           double k_m,
                                           double c0,
                                           struct CsReaction **out);

/*
 # Safety
 `out` must be valid for writes.
 */
enum CsStatus cs_reaction_substrate_inhibition(double v_max,
                                               double k_m,
                                               double c0,
                                               struct CsReaction **out);

/*
 Constant source `f ≡ s`, for linear test problems only.

 # Safety
 `out` must be valid for writes.
 */
enum CsStatus cs_reaction_constant_source(double s, struct CsReaction **out);

/*
 # Safety
 `reaction` must be null or a live handle.
 */
void cs_reaction_free(struct CsReaction *reaction);

/*
 `f(u) = g(c0 − u)` at one point.

 # Safety
 `reaction` must be a live handle; `out` valid for writes.
 */
enum CsStatus cs_reaction_evaluate(const struct CsReaction *reaction, double u, double *out);

/*
 Admissibility constant `K` on the problem's domain and Lipschitz constant `L`.

 # Safety
 Handles must be live; `k` and `l` valid for writes.
 */
enum CsStatus cs_reaction_certify(const struct CsReaction *reaction,
                                  const struct CsProblem *problem,
                                  double *k,
                                  double *l);

/*
 Integrates to `t_final` with step `dt` from `u0` (nodal values, or null for
 zero). `modes` is ignored by the nodal solver.

 # Safety
 Handles must be live; `u0` null or valid for `len` reads; `out` valid for writes.
 */
enum CsStatus cs_solve(struct CsProblem *problem,
                       const struct CsReaction *reaction,
                       enum CsSolver solver,
                       size_t modes,
                       double t_final,
                       double dt,
                       const double *u0,
                       size_t len,
                       struct CsTrajectory **out);

/*
 # Safety
 `trajectory` must be null or a live handle.
 */
void cs_trajectory_free(struct CsTrajectory *trajectory);

/*
 Number of recorded time levels, including `t = 0`.

 # Safety
 `trajectory` must be a live handle; `out` valid for writes.
 */
enum CsStatus cs_trajectory_len(const struct CsTrajectory *trajectory, size_t *out);

/*
 # Safety
 `trajectory` must be a live handle; `out` valid for writes.
 */
enum CsStatus cs_trajectory_record(const struct CsTrajectory *trajectory,
                                   size_t i,
                                   struct CsNormRecord *out);

/*
 # Safety
 `trajectory` must be a live handle; `buf` valid for `len` writes.
 */
enum CsStatus cs_trajectory_final_state(const struct CsTrajectory *trajectory,
                                        double *buf,
                                        size_t len);

/*
 Audits the a priori energy estimates along `trajectory`, which must have
 been computed on `problem`.

 # Safety
 Handles must be live; `out` valid for writes.
 */
enum CsStatus cs_energy_audit(const struct CsTrajectory *trajectory,
                              const struct CsProblem *problem,
                              const struct CsReaction *reaction,
                              struct CsEnergySummary *out);

/*
 Steady state by damped Newton from a zero guess; writes the nodal state.

 # Safety
 Handles must be live; `state` valid for `len` writes; `iterations` and
 `residual` null or valid for writes.
 */
enum CsStatus cs_stationary(const struct CsProblem *problem,
                            const struct CsReaction *reaction,
                            double *state,
                            size_t len,
                            size_t *iterations,
                            double *residual);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CORESHELL_H */
