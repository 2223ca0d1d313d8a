#include "ulam/ulam.h"

#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>

#include "ulam/dynamics.hpp"
#include "ulam/error.hpp"
#include "ulam/homotopy.hpp"
#include "ulam/reports.hpp"

struct ulam_solution_set {
  ulam::SolutionSet set;
};

struct ulam_trajectory {
  ulam::FlowTrajectory traj;
};

namespace {

thread_local std::string last_error;

ulam_status status_of(ulam::ErrorCode code) {
  using ulam::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return ULAM_ERR_INVALID_ARGUMENT;
    case ErrorCode::NonConvergence: return ULAM_ERR_NON_CONVERGENCE;
    case ErrorCode::SingularJacobian: return ULAM_ERR_SINGULAR_JACOBIAN;
    case ErrorCode::MaxIterations: return ULAM_ERR_MAX_ITERATIONS;
    case ErrorCode::Overflow: return ULAM_ERR_OVERFLOW;
    case ErrorCode::TrackingFailed: return ULAM_ERR_TRACKING_FAILED;
    case ErrorCode::DegenerateEigenvalues: return ULAM_ERR_DEGENERATE_EIGENVALUES;
    case ErrorCode::Collision: return ULAM_ERR_COLLISION;
    case ErrorCode::Inadmissible: return ULAM_ERR_INADMISSIBLE;
    case ErrorCode::Io: return ULAM_ERR_IO;
  }
  return ULAM_ERR_INTERNAL;
}

// Runs body, translating exceptions into status codes.
template <class F>
ulam_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return ULAM_OK;
  } catch (const ulam::Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return ULAM_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return ULAM_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown exception";
    return ULAM_ERR_INTERNAL;
  }
}

void require(bool cond, const char* what) {
  if (!cond) throw ulam::Error(ulam::ErrorCode::InvalidArgument, what);
}

ulam::CVec to_cvec(const ulam_complex* values, std::size_t n) {
  require(values != nullptr || n == 0, "null input array");
  ulam::CVec out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = {values[i].re, values[i].im};
  return out;
}

void write(const ulam::CVec& values, ulam_complex* out) {
  require(out != nullptr || values.empty(), "null output array");
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = {values[i].real(), values[i].imag()};
}

ulam_complex to_c(const ulam::Complex& z) { return {z.real(), z.imag()}; }

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

ulam::ResidualSystem to_system(ulam_system sys) {
  switch (sys) {
    case ULAM_SYSTEM_FULL: return ulam::ResidualSystem::Full;
    case ULAM_SYSTEM_TILDE: return ulam::ResidualSystem::Tilde;
  }
  throw ulam::Error(ulam::ErrorCode::InvalidArgument, "unknown residual system");
}

ulam::SolveOptions to_options(const ulam_solve_options* opts) {
  ulam::SolveOptions out;
  if (opts == nullptr) return out;
  require(opts->tol_residual > 0.0 && opts->tol_cluster > 0.0, "tolerances must be positive");
  out.track.polish_tol = opts->tol_residual;
  out.cluster_radius = opts->tol_cluster;
  out.threads = opts->threads;
  return out;
}

}  // namespace

extern "C" {

const char* ulam_version(void) { return "0.1.0"; }

const char* ulam_last_error(void) { return last_error.c_str(); }

const char* ulam_status_string(ulam_status status) {
  switch (status) {
    case ULAM_OK: return "ok";
    case ULAM_ERR_INVALID_ARGUMENT: return "invalid argument";
    case ULAM_ERR_NON_CONVERGENCE: return "non-convergence";
    case ULAM_ERR_SINGULAR_JACOBIAN: return "singular jacobian";
    case ULAM_ERR_MAX_ITERATIONS: return "max iterations";
    case ULAM_ERR_OVERFLOW: return "overflow";
    case ULAM_ERR_TRACKING_FAILED: return "tracking failed";
    case ULAM_ERR_DEGENERATE_EIGENVALUES: return "degenerate eigenvalues";
    case ULAM_ERR_COLLISION: return "collision";
    case ULAM_ERR_INADMISSIBLE: return "inadmissible";
    case ULAM_ERR_IO: return "io";
    case ULAM_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void ulam_string_free(char* s) { delete[] s; }

ulam_status ulam_elem_sym(const ulam_complex* c, size_t n, size_t j, ulam_complex* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = to_c(ulam::elem_sym(to_cvec(c, n), j));
  });
}

ulam_status ulam_poly_from_roots(const ulam_complex* roots, size_t n, ulam_complex* coeffs_out) {
  return guarded([&] { write(ulam::poly_from_roots(to_cvec(roots, n)).coeffs(), coeffs_out); });
}

ulam_status ulam_poly_eval(const ulam_complex* coeffs, size_t n, ulam_complex z, ulam_complex* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = to_c(ulam::eval(ulam::MonicPoly(to_cvec(coeffs, n)), {z.re, z.im}));
  });
}

ulam_status ulam_all_roots(const ulam_complex* coeffs, size_t n, double tol, ulam_complex* roots_out) {
  return guarded([&] { write(ulam::all_roots(ulam::MonicPoly(to_cvec(coeffs, n)), tol), roots_out); });
}

ulam_status ulam_map(const ulam_complex* c, size_t n, ulam_complex* out) {
  return guarded([&] { write(ulam::ulam_map(to_cvec(c, n)), out); });
}

ulam_status ulam_residual(const ulam_complex* c, size_t n, ulam_system sys, ulam_complex* out) {
  return guarded([&] { write(ulam::residual(to_cvec(c, n), to_system(sys)), out); });
}

ulam_status ulam_newton_polish(const ulam_complex* c0, size_t n, ulam_system sys, double tol, int max_iter,
                               ulam_complex* point_out, double* residual) {
  return guarded([&] {
    const ulam::FixedPointRecord rec = ulam::newton_polish(to_cvec(c0, n), to_system(sys), tol, max_iter);
    write(rec.point, point_out);
    if (residual != nullptr) *residual = rec.residual;
  });
}

void ulam_solve_options_init(ulam_solve_options* opts) {
  if (opts == nullptr) return;
  const ulam::SolveOptions defaults;
  opts->tol_residual = defaults.track.polish_tol;
  opts->tol_cluster = defaults.cluster_radius;
  opts->threads = defaults.threads;
}

ulam_status ulam_solve(size_t n, ulam_system sys, uint64_t seed, const ulam_solve_options* opts,
                       ulam_solution_set** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    *out = nullptr;
    auto handle = std::make_unique<ulam_solution_set>();
    handle->set = ulam::solve_system(n, to_system(sys), seed, to_options(opts));
    *out = handle.release();
  });
}

void ulam_solution_set_free(ulam_solution_set* set) { delete set; }

size_t ulam_solution_set_size(const ulam_solution_set* set) { return set ? set->set.records.size() : 0; }

size_t ulam_solution_set_degree(const ulam_solution_set* set) { return set ? set->set.n : 0; }

ulam_status ulam_solution_set_stats(const ulam_solution_set* set, size_t* path_count, size_t* at_infinity,
                                    size_t* failed) {
  return guarded([&] {
    require(set != nullptr, "null solution set");
    if (path_count) *path_count = set->set.path_count;
    if (at_infinity) *at_infinity = set->set.at_infinity_count;
    if (failed) *failed = set->set.failed_count;
  });
}

ulam_status ulam_solution_set_record(const ulam_solution_set* set, size_t index, ulam_complex* point_out,
                                     size_t* cluster_size, double* residual) {
  return guarded([&] {
    require(set != nullptr, "null solution set");
    require(index < set->set.records.size(), "record index out of range");
    const auto& rec = set->set.records[index];
    if (point_out) write(rec.point, point_out);
    if (cluster_size) *cluster_size = rec.cluster_size;
    if (residual) *residual = rec.residual;
  });
}

ulam_status ulam_solution_set_to_json(const ulam_solution_set* set, char** json_out) {
  return guarded([&] {
    require(set != nullptr && json_out != nullptr, "null argument");
    *json_out = copy_string(ulam::dump(ulam::document("solution_set", ulam::to_json(set->set))));
  });
}

ulam_status ulam_count(size_t n, uint64_t seed, const ulam_solve_options* opts, ulam_counts* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    const ulam::UlamCounts c = ulam::count_ulam(n, seed, to_options(opts));
    *out = {c.n,           c.u_n,          c.v_tilde,   c.v_zero, c.intersection, c.full_records,
            c.full_paths, c.at_infinity, c.consistent() ? 1 : 0};
  });
}

ulam_status ulam_counts_to_json(const ulam_counts* counts, char** json_out) {
  return guarded([&] {
    require(counts != nullptr && json_out != nullptr, "null argument");
    ulam::UlamCounts c;
    c.n = counts->n;
    c.u_n = counts->u_n;
    c.v_tilde = counts->v_tilde;
    c.v_zero = counts->v_zero;
    c.intersection = counts->intersection;
    c.full_records = counts->full_records;
    c.full_paths = counts->full_paths;
    c.at_infinity = counts->at_infinity;
    *json_out = copy_string(ulam::dump(ulam::document("counts", ulam::to_json(c))));
  });
}

ulam_status ulam_verify(size_t n, uint64_t seed, const ulam_solve_options* opts, int* passed, char** json_out) {
  return guarded([&] {
    const ulam::CheckResult res = ulam::run_verify(n, seed, to_options(opts));
    if (passed) *passed = res.passed ? 1 : 0;
    if (json_out) *json_out = copy_string(ulam::dump(res.json));
  });
}

ulam_status ulam_eigencheck(ulam_grid grid, double tol, int* passed, char** json_out) {
  return guarded([&] {
    ulam::GridPreset preset = ulam::GridPreset::Default;
    switch (grid) {
      case ULAM_GRID_DEFAULT: preset = ulam::GridPreset::Default; break;
      case ULAM_GRID_WIDE: preset = ulam::GridPreset::Wide; break;
      case ULAM_GRID_FINE: preset = ulam::GridPreset::Fine; break;
      default: require(false, "unknown grid preset");
    }
    require(tol > 0.0, "tolerance must be positive");
    const ulam::CheckResult res = ulam::run_eigencheck(preset, tol);
    if (passed) *passed = res.passed ? 1 : 0;
    if (json_out) *json_out = copy_string(ulam::dump(res.json));
  });
}

ulam_status ulam_report(uint64_t seed, const ulam_solve_options* opts, int flags, int* passed, char** json_out,
                        char** markdown_out) {
  return guarded([&] {
    ulam::SummaryOptions so;
    so.tilde = (flags & ULAM_REPORT_TILDE) != 0;
    so.intersections = (flags & ULAM_REPORT_INTERSECTIONS) != 0;
    const ulam::Summary s = ulam::run_summary(seed, to_options(opts), so);
    if (passed) *passed = s.passed ? 1 : 0;
    if (json_out) *json_out = copy_string(ulam::dump(s.json));
    if (markdown_out) *markdown_out = copy_string(s.markdown);
  });
}

ulam_status ulam_flow_rhs(const ulam_complex* zeta, const ulam_complex* gamma, size_t n, ulam_complex* out) {
  return guarded([&] { write(ulam::flow_rhs(to_cvec(zeta, n), to_cvec(gamma, n)), out); });
}

ulam_status ulam_perturb(const ulam_complex* gamma, size_t n, double radius, uint64_t seed, ulam_complex* out) {
  return guarded([&] { write(ulam::perturb(to_cvec(gamma, n), radius, seed), out); });
}

ulam_status ulam_flow_integrate(const ulam_complex* zeta0, const ulam_complex* gamma, size_t n, double horizon,
                                double dt, size_t stride, ulam_trajectory** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    *out = nullptr;
    auto handle = std::make_unique<ulam_trajectory>();
    handle->traj = ulam::integrate(to_cvec(zeta0, n), to_cvec(gamma, n), horizon, dt, stride);
    *out = handle.release();
  });
}

void ulam_trajectory_free(ulam_trajectory* traj) { delete traj; }

size_t ulam_trajectory_size(const ulam_trajectory* traj) { return traj ? traj->traj.states.size() : 0; }

int ulam_trajectory_collided(const ulam_trajectory* traj) { return traj && traj->traj.collision_flag ? 1 : 0; }

ulam_status ulam_trajectory_state(const ulam_trajectory* traj, size_t k, double* t, ulam_complex* state_out) {
  return guarded([&] {
    require(traj != nullptr, "null trajectory");
    require(k < traj->traj.states.size(), "state index out of range");
    if (t) *t = traj->traj.times[k];
    if (state_out) write(traj->traj.states[k], state_out);
  });
}

ulam_status ulam_trajectory_to_csv(const ulam_trajectory* traj, char** csv_out) {
  return guarded([&] {
    require(traj != nullptr && csv_out != nullptr, "null argument");
    *csv_out = copy_string(ulam::to_csv(traj->traj));
  });
}

ulam_status ulam_trajectory_to_json(const ulam_trajectory* traj, char** json_out) {
  return guarded([&] {
    require(traj != nullptr && json_out != nullptr, "null argument");
    *json_out = copy_string(ulam::dump(ulam::document("trajectory", ulam::to_json(traj->traj))));
  });
}

ulam_status ulam_equilibrium_jacobian_deviation(const ulam_complex* gamma, size_t n, double* deviation) {
  return guarded([&] {
    require(deviation != nullptr, "null output");
    *deviation = ulam::jacobian_at_equilibrium(to_cvec(gamma, n)).deviation;
  });
}

ulam_status ulam_stability_probe(const ulam_complex* gamma, size_t n, double radius, size_t trials, uint64_t seed,
                                 double horizon, double dt, size_t* converged, char** json_out) {
  return guarded([&] {
    const ulam::StabilityReport rep = ulam::stability_probe(to_cvec(gamma, n), radius, trials, seed, horizon, dt);
    if (converged) *converged = rep.converged_count();
    if (json_out) *json_out = copy_string(ulam::dump(ulam::document("stability", ulam::to_json(rep))));
  });
}

}  // extern "C"
