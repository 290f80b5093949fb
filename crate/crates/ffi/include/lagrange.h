#ifndef LAGRANGE_H
#define LAGRANGE_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LgStatus {
  LG_STATUS_OK = 0,
  LG_STATUS_NULL_POINTER = 1,
  LG_STATUS_INVALID_ARGUMENT = 2,
  LG_STATUS_DIMENSION_MISMATCH = 3,
  LG_STATUS_RANK_DEFICIENT = 4,
  LG_STATUS_SINGULAR = 5,
  LG_STATUS_NOT_CONVERGED = 6,
  LG_STATUS_NOT_OPTIMAL = 7,
  LG_STATUS_IO = 8,
  LG_STATUS_PARSE = 9,
  LG_STATUS_BUFFER_TOO_SMALL = 10,
  LG_STATUS_PANIC = 11,
} LgStatus;

typedef enum LgMethod {
  LG_METHOD_DIRECT = 0,
  LG_METHOD_NULLSPACE = 1,
  LG_METHOD_SCHUR = 2,
} LgMethod;

/**
 * Opaque program handle.
 */
typedef struct LgProblem LgProblem;

/**
 * Opaque solution handle.
 */
typedef struct LgSolution LgSolution;

/**
 * Outcome of `lg_stokes_run`.
 */
typedef struct LgStokesSummary {
  /**
   * Relative velocity difference between the coupled and minimization
   * solves.
   */
  double velocity_gap;
  /**
   * Same for the zero-mean pressures.
   */
  double pressure_gap;
  /**
   * Largest `|Bu| / |u|` of the two velocities.
   */
  double divergence;
  double l2_u;
  double l2_p;
  double linf_u;
} LgStokesSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length without the NUL.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t lg_last_error_message(char *buf, size_t len);

/**
 * Builds a program from dense row-major data: `a` is `n x n` and must be
 * symmetric positive definite, `c` is `m x n` with full row rank. `d` may
 * be null for a homogeneous constraint.
 *
 * # Safety
 * Each non-null pointer must reference the stated number of doubles; `out`
 * must be valid for a write.
 */
enum LgStatus lg_problem_new_dense(size_t n,
                                   size_t m,
                                   const double *a,
                                   const double *b,
                                   const double *c,
                                   const double *d,
                                   struct LgProblem **out);

/**
 * Loads `A.mtx`, `C.mtx`, `b.txt` and optional `d.txt` from `dir`.
 *
 * # Safety
 * `dir` must be a NUL-terminated string; `out` must be valid for a write.
 */
enum LgStatus lg_problem_load(const char *dir, struct LgProblem **out);

/**
 * # Safety
 * `p` must be null or a handle from this library not yet freed.
 */
void lg_problem_free(struct LgProblem *p);

/**
 * Number of unknowns, or 0 for a null handle.
 *
 * # Safety
 * `p` must be null or a live handle.
 */
size_t lg_problem_n(const struct LgProblem *p);

/**
 * Number of constraints, or 0 for a null handle.
 *
 * # Safety
 * `p` must be null or a live handle.
 */
size_t lg_problem_m(const struct LgProblem *p);

/**
 * # Safety
 * `p` must be a live handle and `out` valid for a write.
 */
enum LgStatus lg_solve(const struct LgProblem *p,
                       enum LgMethod method,
                       double tol,
                       struct LgSolution **out);

/**
 * # Safety
 * `s` must be null or a handle from this library not yet freed.
 */
void lg_solution_free(struct LgSolution *s);

/**
 * Copies the minimizer into `buf` (at least `n` doubles).
 *
 * # Safety
 * `s` must be a live handle; `buf` must hold `len` doubles.
 */
enum LgStatus lg_solution_x(const struct LgSolution *s, double *buf, size_t len);

/**
 * Copies the multiplier (`Ax - b = C' lambda`) into `buf` (at least `m`
 * doubles).
 *
 * # Safety
 * `s` must be a live handle; `buf` must hold `len` doubles.
 */
enum LgStatus lg_solution_lambda(const struct LgSolution *s, double *buf, size_t len);

/**
 * `|Ax - b - C' lambda|` and `|Cx - d|`.
 *
 * # Safety
 * `s` must be a live handle; the outputs must be valid for writes.
 */
enum LgStatus lg_solution_residuals(const struct LgSolution *s,
                                    double *stationarity,
                                    double *feasibility);

/**
 * Inf-sup constant of the program's `C` in the `A`-norm with Euclidean
 * multipliers.
 *
 * # Safety
 * `p` must be a live handle and `beta` valid for a write.
 */
enum LgStatus lg_infsup(const struct LgProblem *p, double *beta);

/**
 * Coupled and minimization Stokes solves on an `n x n` MAC grid.
 * `case_id` is `taylor_green`, `polynomial` or `zero`.
 *
 * # Safety
 * `case_id` must be NUL-terminated and `out` valid for a write.
 */
enum LgStatus lg_stokes_run(size_t n, const char *case_id, double tol, struct LgStokesSummary *out);

/**
 * Discrete inf-sup constant of the MAC discretization on an `n x n` grid.
 *
 * # Safety
 * `beta` must be valid for a write.
 */
enum LgStatus lg_stokes_infsup(size_t n, double *beta);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LAGRANGE_H */
