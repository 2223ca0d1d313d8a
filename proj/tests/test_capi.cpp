#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "ulam/ulam.h"

namespace {

std::string take(char* s) {
  std::string out = s ? s : "";
  ulam_string_free(s);
  return out;
}

double dist(ulam_complex a, ulam_complex b) { return std::hypot(a.re - b.re, a.im - b.im); }

}  // namespace

TEST_CASE("version and status strings") {
  CHECK(std::string(ulam_version()).size() > 0);
  CHECK(std::string(ulam_status_string(ULAM_OK)) == "ok");
  CHECK(std::string(ulam_status_string(ULAM_ERR_INADMISSIBLE)) == "inadmissible");
}

TEST_CASE("polynomial helpers") {
  const ulam_complex roots[2] = {{1.0, 0.0}, {-2.0, 0.0}};
  ulam_complex coeffs[2];
  REQUIRE(ulam_poly_from_roots(roots, 2, coeffs) == ULAM_OK);
  CHECK(dist(coeffs[0], {1.0, 0.0}) < 1e-15);
  CHECK(dist(coeffs[1], {-2.0, 0.0}) < 1e-15);

  ulam_complex e;
  REQUIRE(ulam_elem_sym(roots, 2, 2, &e) == ULAM_OK);
  CHECK(dist(e, {-2.0, 0.0}) < 1e-15);
  CHECK(ulam_elem_sym(roots, 2, 3, &e) == ULAM_ERR_INVALID_ARGUMENT);
  CHECK(std::string(ulam_last_error()).size() > 0);

  ulam_complex v;
  REQUIRE(ulam_poly_eval(coeffs, 2, {3.0, 0.0}, &v) == ULAM_OK);
  CHECK(dist(v, {10.0, 0.0}) < 1e-14);

  ulam_complex found[2];
  REQUIRE(ulam_all_roots(coeffs, 2, 1e-12, found) == ULAM_OK);
  CHECK(std::min(dist(found[0], roots[0]), dist(found[1], roots[0])) < 1e-12);
}

TEST_CASE("null pointers and NaN are rejected") {
  ulam_complex out[2];
  CHECK(ulam_map(nullptr, 2, out) == ULAM_ERR_INVALID_ARGUMENT);
  const ulam_complex bad[2] = {{NAN, 0.0}, {0.0, 0.0}};
  CHECK(ulam_map(bad, 2, out) == ULAM_ERR_INVALID_ARGUMENT);
}

TEST_CASE("map, residual and polish") {
  const ulam_complex c[3] = {{1.0, 0.0}, {-1.0, 0.0}, {-1.0, 0.0}};
  ulam_complex r[3];
  REQUIRE(ulam_residual(c, 3, ULAM_SYSTEM_TILDE, r) == ULAM_OK);
  for (auto z : r) CHECK(std::hypot(z.re, z.im) < 1e-15);

  const ulam_complex near[2] = {{1.001, 0.0}, {-2.002, 0.0}};
  ulam_complex polished[2];
  double res = 1.0;
  REQUIRE(ulam_newton_polish(near, 2, ULAM_SYSTEM_FULL, 1e-12, 100, polished, &res) == ULAM_OK);
  CHECK(dist(polished[1], {-2.0, 0.0}) < 1e-12);
  CHECK(res <= 1e-12);
}

TEST_CASE("solve and inspect a solution set") {
  ulam_solve_options opts;
  ulam_solve_options_init(&opts);
  ulam_solution_set* set = nullptr;
  REQUIRE(ulam_solve(4, ULAM_SYSTEM_FULL, 1, &opts, &set) == ULAM_OK);
  CHECK(ulam_solution_set_size(set) == 23);
  CHECK(ulam_solution_set_degree(set) == 4);
  size_t paths = 0, inf = 9, failed = 9;
  REQUIRE(ulam_solution_set_stats(set, &paths, &inf, &failed) == ULAM_OK);
  CHECK(paths == 24);
  CHECK(inf == 0);
  CHECK(failed == 0);
  size_t total = 0;
  for (size_t i = 0; i < ulam_solution_set_size(set); ++i) {
    size_t cs = 0;
    REQUIRE(ulam_solution_set_record(set, i, nullptr, &cs, nullptr) == ULAM_OK);
    total += cs;
  }
  CHECK(total == 24);
  CHECK(ulam_solution_set_record(set, 99, nullptr, nullptr, nullptr) == ULAM_ERR_INVALID_ARGUMENT);
  char* json = nullptr;
  REQUIRE(ulam_solution_set_to_json(set, &json) == ULAM_OK);
  CHECK(take(json).find("\"record_count\": 23") != std::string::npos);
  ulam_solution_set_free(set);
  CHECK(ulam_solve(9, ULAM_SYSTEM_FULL, 1, &opts, &set) == ULAM_ERR_INVALID_ARGUMENT);
}

TEST_CASE("identical seeds give byte-identical JSON") {
  std::string docs[2];
  for (auto& doc : docs) {
    ulam_solution_set* set = nullptr;
    REQUIRE(ulam_solve(5, ULAM_SYSTEM_TILDE, 11, nullptr, &set) == ULAM_OK);
    char* json = nullptr;
    REQUIRE(ulam_solution_set_to_json(set, &json) == ULAM_OK);
    doc = take(json);
    ulam_solution_set_free(set);
  }
  CHECK(docs[0] == docs[1]);
}

TEST_CASE("counts") {
  ulam_counts c{};
  REQUIRE(ulam_count(5, 2, nullptr, &c) == ULAM_OK);
  CHECK(c.u_n == 119);
  CHECK(c.v_tilde == 96);
  CHECK(c.v_zero == 23);
  CHECK(c.intersection == 0);
  CHECK(c.full_paths == 120);
  CHECK(c.consistent == 1);
  char* json = nullptr;
  REQUIRE(ulam_counts_to_json(&c, &json) == ULAM_OK);
  CHECK(take(json).find("\"u_n\": 119") != std::string::npos);
}

TEST_CASE("verification entry points") {
  int passed = 0;
  char* json = nullptr;
  REQUIRE(ulam_verify(3, 1, nullptr, &passed, &json) == ULAM_OK);
  CHECK(passed == 1);
  take(json);
  REQUIRE(ulam_eigencheck(ULAM_GRID_DEFAULT, 1e-10, &passed, &json) == ULAM_OK);
  CHECK(passed == 1);
  take(json);
  char* md = nullptr;
  REQUIRE(ulam_report(1, nullptr, ULAM_REPORT_TILDE | ULAM_REPORT_INTERSECTIONS, &passed, &json, &md) == ULAM_OK);
  CHECK(passed == 1);
  take(json);
  CHECK(take(md).find("| 5 | 119 | 96 | 0 |") != std::string::npos);
}

TEST_CASE("flow entry points") {
  const ulam_complex gamma[2] = {{1.0, 0.0}, {-2.0, 0.0}};
  ulam_complex rhs[2];
  REQUIRE(ulam_flow_rhs(gamma, gamma, 2, rhs) == ULAM_OK);
  CHECK(std::hypot(rhs[0].re, rhs[0].im) < 1e-14);

  double dev = 1.0;
  REQUIRE(ulam_equilibrium_jacobian_deviation(gamma, 2, &dev) == ULAM_OK);
  CHECK(dev <= 1e-8);

  ulam_complex start[2];
  REQUIRE(ulam_perturb(gamma, 2, 0.05, 3, start) == ULAM_OK);
  ulam_trajectory* traj = nullptr;
  REQUIRE(ulam_flow_integrate(start, gamma, 2, 20.0, 1e-3, 100, &traj) == ULAM_OK);
  CHECK(ulam_trajectory_size(traj) == 201);
  CHECK(ulam_trajectory_collided(traj) == 0);
  double t = 0.0;
  ulam_complex last[2];
  REQUIRE(ulam_trajectory_state(traj, ulam_trajectory_size(traj) - 1, &t, last) == ULAM_OK);
  CHECK(std::abs(t - 20.0) < 1e-9);
  CHECK(dist(last[0], gamma[0]) < 1e-6);
  char* csv = nullptr;
  REQUIRE(ulam_trajectory_to_csv(traj, &csv) == ULAM_OK);
  CHECK(take(csv).rfind("t,re_1,im_1,re_2,im_2\r\n", 0) == 0);
  ulam_trajectory_free(traj);

  size_t converged = 0;
  char* json = nullptr;
  REQUIRE(ulam_stability_probe(gamma, 2, 0.05, 20, 1, 25.0, 1e-3, &converged, &json) == ULAM_OK);
  CHECK(converged == 20);
  take(json);

  const ulam_complex repeated[3] = {{1.0, 0.0}, {-1.0, 0.0}, {-1.0, 0.0}};
  CHECK(ulam_equilibrium_jacobian_deviation(repeated, 3, &dev) == ULAM_ERR_INADMISSIBLE);
}
