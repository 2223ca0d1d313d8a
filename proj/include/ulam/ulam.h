/* C interface to the ulampoly library.
 *
 * All functions return a ulam_status. On failure a message describing the
 * last error on the calling thread is available from ulam_last_error().
 * Strings returned through char** out-parameters are owned by the caller and
 * must be released with ulam_string_free(). Handles are released with their
 * matching *_free function; passing NULL to any *_free is a no-op.
 */
#ifndef ULAM_ULAM_H
#define ULAM_ULAM_H

#include <stddef.h>
#include <stdint.h>

#if defined(ULAM_BUILDING_LIBRARY)
#define ULAM_API __attribute__((visibility("default")))
#else
#define ULAM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct {
  double re;
  double im;
} ulam_complex;

typedef enum {
  ULAM_OK = 0,
  ULAM_ERR_INVALID_ARGUMENT = 1,
  ULAM_ERR_NON_CONVERGENCE = 2,
  ULAM_ERR_SINGULAR_JACOBIAN = 3,
  ULAM_ERR_MAX_ITERATIONS = 4,
  ULAM_ERR_OVERFLOW = 5,
  ULAM_ERR_TRACKING_FAILED = 6,
  ULAM_ERR_DEGENERATE_EIGENVALUES = 7,
  ULAM_ERR_COLLISION = 8,
  ULAM_ERR_INADMISSIBLE = 9,
  ULAM_ERR_IO = 10,
  ULAM_ERR_INTERNAL = 11
} ulam_status;

typedef enum { ULAM_SYSTEM_FULL = 0, ULAM_SYSTEM_TILDE = 1 } ulam_system;

typedef enum { ULAM_GRID_DEFAULT = 0, ULAM_GRID_WIDE = 1, ULAM_GRID_FINE = 2 } ulam_grid;

typedef struct {
  double tol_residual; /* Newton polish tolerance, default 1e-12 */
  double tol_cluster;  /* endpoint clustering radius, default 1e-6 */
  unsigned threads;    /* 0 = hardware concurrency */
} ulam_solve_options;

typedef struct {
  size_t n;
  size_t u_n;
  size_t v_tilde;
  size_t v_zero;
  size_t intersection;
  size_t full_records;
  size_t full_paths;
  size_t at_infinity;
  int consistent;
} ulam_counts;

typedef struct ulam_solution_set ulam_solution_set;
typedef struct ulam_trajectory ulam_trajectory;

ULAM_API const char* ulam_version(void);
ULAM_API const char* ulam_last_error(void);
ULAM_API const char* ulam_status_string(ulam_status status);
ULAM_API void ulam_string_free(char* s);

/* Polynomial core. Coefficient arrays hold c_1..c_N of a monic polynomial. */
ULAM_API ulam_status ulam_elem_sym(const ulam_complex* c, size_t n, size_t j, ulam_complex* out);
ULAM_API ulam_status ulam_poly_from_roots(const ulam_complex* roots, size_t n, ulam_complex* coeffs_out);
ULAM_API ulam_status ulam_poly_eval(const ulam_complex* coeffs, size_t n, ulam_complex z, ulam_complex* out);
ULAM_API ulam_status ulam_all_roots(const ulam_complex* coeffs, size_t n, double tol, ulam_complex* roots_out);

/* Ulam map and fixed-point systems. */
ULAM_API ulam_status ulam_map(const ulam_complex* c, size_t n, ulam_complex* out);
ULAM_API ulam_status ulam_residual(const ulam_complex* c, size_t n, ulam_system sys, ulam_complex* out);
/* Polished point into point_out (length n); residual max-norm into *residual. */
ULAM_API ulam_status ulam_newton_polish(const ulam_complex* c0, size_t n, ulam_system sys, double tol,
                                        int max_iter, ulam_complex* point_out, double* residual);

/* Homotopy solves. */
ULAM_API void ulam_solve_options_init(ulam_solve_options* opts);
ULAM_API ulam_status ulam_solve(size_t n, ulam_system sys, uint64_t seed, const ulam_solve_options* opts,
                                ulam_solution_set** out);
ULAM_API void ulam_solution_set_free(ulam_solution_set* set);
ULAM_API size_t ulam_solution_set_size(const ulam_solution_set* set);
ULAM_API size_t ulam_solution_set_degree(const ulam_solution_set* set);
ULAM_API ulam_status ulam_solution_set_stats(const ulam_solution_set* set, size_t* path_count,
                                             size_t* at_infinity, size_t* failed);
/* point_out must hold ulam_solution_set_degree() entries. Any out pointer may be NULL. */
ULAM_API ulam_status ulam_solution_set_record(const ulam_solution_set* set, size_t index, ulam_complex* point_out,
                                              size_t* cluster_size, double* residual);
ULAM_API ulam_status ulam_solution_set_to_json(const ulam_solution_set* set, char** json_out);

ULAM_API ulam_status ulam_count(size_t n, uint64_t seed, const ulam_solve_options* opts, ulam_counts* out);
ULAM_API ulam_status ulam_counts_to_json(const ulam_counts* counts, char** json_out);

/* Verification suites. *passed is set to 1 when every check holds. */
ULAM_API ulam_status ulam_verify(size_t n, uint64_t seed, const ulam_solve_options* opts, int* passed,
                                 char** json_out);
ULAM_API ulam_status ulam_eigencheck(ulam_grid grid, double tol, int* passed, char** json_out);
/* flags: bit 0 adds the TILDE column, bit 1 the intersection column. */
enum { ULAM_REPORT_TILDE = 1, ULAM_REPORT_INTERSECTIONS = 2 };
ULAM_API ulam_status ulam_report(uint64_t seed, const ulam_solve_options* opts, int flags, int* passed,
                                 char** json_out, char** markdown_out);

/* Zero flow relaxing onto an Ulam fixed point gamma (distinct entries). */
ULAM_API ulam_status ulam_flow_rhs(const ulam_complex* zeta, const ulam_complex* gamma, size_t n,
                                   ulam_complex* out);
ULAM_API ulam_status ulam_perturb(const ulam_complex* gamma, size_t n, double radius, uint64_t seed,
                                  ulam_complex* out);
ULAM_API ulam_status ulam_flow_integrate(const ulam_complex* zeta0, const ulam_complex* gamma, size_t n,
                                         double horizon, double dt, size_t stride, ulam_trajectory** out);
ULAM_API void ulam_trajectory_free(ulam_trajectory* traj);
ULAM_API size_t ulam_trajectory_size(const ulam_trajectory* traj);
ULAM_API int ulam_trajectory_collided(const ulam_trajectory* traj);
/* State index k into state_out (length n) and its time into *t. */
ULAM_API ulam_status ulam_trajectory_state(const ulam_trajectory* traj, size_t k, double* t,
                                           ulam_complex* state_out);
ULAM_API ulam_status ulam_trajectory_to_csv(const ulam_trajectory* traj, char** csv_out);
ULAM_API ulam_status ulam_trajectory_to_json(const ulam_trajectory* traj, char** json_out);
ULAM_API ulam_status ulam_equilibrium_jacobian_deviation(const ulam_complex* gamma, size_t n, double* deviation);
ULAM_API ulam_status ulam_stability_probe(const ulam_complex* gamma, size_t n, double radius, size_t trials,
                                          uint64_t seed, double horizon, double dt, size_t* converged,
                                          char** json_out);

#ifdef __cplusplus
}
#endif

#endif /* ULAM_ULAM_H */
