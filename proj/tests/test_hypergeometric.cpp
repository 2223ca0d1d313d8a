#include <optional>

#include <Eigen/Dense>

#include "doctest.h"
#include "support.hpp"
#include "ulam/error.hpp"
#include "ulam/hypergeometric.hpp"
#include "ulam/reports.hpp"
#include "ulam/ulam_map.hpp"

using namespace ulam;
using testing::Gen;

namespace {

// Monic polynomial solution of (a x^2 + b x + d) y'' - (x + a1) y' + lambda y = 0
// obtained by matching coefficients as one linear system.
CVec oracle_coeffs(const HyperParams& p, std::size_t n) {
  const Complex lambda = eigenvalue(p, n);
  // Unknowns y_k for powers k = 0..n-1; y_n = 1.
  const auto N = static_cast<Eigen::Index>(n);
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(N, N);
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(N);
  auto add = [&](Eigen::Index row, std::size_t k, Complex w) {
    if (row < 0 || row >= N) return;
    if (k == n) {
      rhs(row) -= w;
    } else {
      A(row, static_cast<Eigen::Index>(k)) += w;
    }
  };
  for (std::size_t k = 0; k <= n; ++k) {
    const double kd = static_cast<double>(k);
    const auto ki = static_cast<Eigen::Index>(k);
    add(ki, k, p.alpha * kd * (kd - 1.0) - kd + lambda);
    add(ki - 1, k, p.beta * kd * (kd - 1.0));
    add(ki - 2, k, p.delta * kd * (kd - 1.0));
    add(ki - 1, k, -p.a1 * kd);
  }
  const Eigen::VectorXcd y = A.fullPivLu().solve(rhs);
  CVec out(n);
  for (std::size_t j = 1; j <= n; ++j) out[j - 1] = y(N - static_cast<Eigen::Index>(j));
  return out;
}

HyperParams random_params(Gen& g) {
  for (;;) {
    HyperParams p{g.in_box(1.0), g.in_box(1.0), g.in_box(1.0), g.in_box(1.0)};
    bool ok = true;
    for (std::size_t i = 1; i <= 6 && ok; ++i) {
      for (std::size_t j = 0; j < i && ok; ++j) ok = std::abs(eigenvalue(p, i) - eigenvalue(p, j)) > 1e-3;
    }
    if (ok) return p;
  }
}

CVec unit_disc_samples(Gen& g, std::size_t count = 20) {
  CVec s(count);
  for (auto& z : s) z = g.in_disc();
  return s;
}

}  // namespace

TEST_CASE("recurrence examples") {
  const auto a = recurrence_coeffs(HyperParams{0.0, 1.0, 0.0, 0.0}, 2);
  CHECK(max_abs_diff(a.coeffs, CVec{-2.0, 0.0}) < 1e-14);
  for (std::size_t n = 1; n <= 6; ++n) CHECK(max_abs(recurrence_coeffs(HyperParams{0.0, 0.0, 0.0, 0.0}, n).coeffs) == 0.0);
  const auto c = recurrence_coeffs(HyperParams{0.0, 0.0, 1.0, 0.0}, 3);
  CHECK(max_abs_diff(c.coeffs, CVec{0.0, -3.0, 0.0}) < 1e-14);
}

TEST_CASE("eigen residual examples") {
  Gen g(5);
  const CVec samples = unit_disc_samples(g);
  const HyperParams p{0.0, 1.0, 0.0, 0.0};
  const auto y = recurrence_coeffs(p, 2);
  CHECK(eigen_residual(y, p, samples) <= 1e-10);
  auto bumped = y;
  bumped.coeffs[0] += 0.1;
  CHECK(eigen_residual(bumped, p, samples) > 1e-2);
}

TEST_CASE("degenerate eigenvalues are reported") {
  // lambda_4 = lambda_2 when alpha = 1/5.
  CHECK_THROWS_AS(recurrence_coeffs(HyperParams{0.2, 0.0, 0.0, 0.0}, 4), Error);
  CHECK_NOTHROW(recurrence_coeffs(HyperParams{0.2, 0.0, 0.0, 0.0}, 3));
}

TEST_CASE("property: recurrence agrees with the coefficient-matching oracle") {
  Gen g(31);
  for (int trial = 0; trial < 50; ++trial) {
    const HyperParams p = random_params(g);
    const CVec samples = unit_disc_samples(g);
    for (std::size_t n = 1; n <= 6; ++n) {
      const auto y = recurrence_coeffs(p, n);
      const CVec expect = oracle_coeffs(p, n);
      CHECK(max_abs_diff(y.coeffs, expect) <= 1e-9 * std::max(1.0, max_abs(expect)));
      CHECK(eigen_residual(y, p, samples) <= 1e-9 * std::max(1.0, max_abs(y.coeffs)));
    }
  }
}

TEST_CASE("property: trivial family gives x^N") {
  for (double alpha : {-1.0, -0.5, 0.0, 0.1, 0.35, 0.6, 0.75, 2.0}) {
    for (std::size_t n = 1; n <= 10; ++n) {
      const HyperParams p{alpha, 0.0, 0.0, 0.0};
      std::optional<double> size;
      try {
        size = max_abs(recurrence_coeffs(p, n).coeffs);
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateEigenvalues);
      }
      if (size) CHECK(*size == 0.0);
      Gen g(n);
      const EigenPoly monomial{n, CVec(n, 0.0), eigenvalue(p, n)};
      CHECK(eigen_residual(monomial, p, unit_disc_samples(g)) <= 1e-12);
    }
  }
}

TEST_CASE("property: eigenvalue differences") {
  Gen g(37);
  for (int trial = 0; trial < 50; ++trial) {
    const HyperParams p{g.in_box(2.0), 0.0, 0.0, 0.0};
    for (std::size_t n = 1; n <= 10; ++n) {
      const Complex diff = eigenvalue(p, n) - eigenvalue(p, n - 1);
      const Complex expect = 1.0 - 2.0 * static_cast<double>(n - 1) * p.alpha;
      CHECK(std::abs(diff - expect) <= 1e-14 * std::max(1.0, std::abs(eigenvalue(p, n))));
    }
  }
}

TEST_CASE("closed forms match the recurrence with a1 = 0") {
  Gen g(41);
  for (int trial = 0; trial < 30; ++trial) {
    HyperParams p = random_params(g);
    p.a1 = 0.0;
    const auto g2 = recurrence_coeffs(p, 2).coeffs;
    const auto g3 = recurrence_coeffs(p, 3).coeffs;
    const auto cf = closed_form_coeffs(p.alpha, p.beta, p.delta);
    CHECK(std::abs(cf.g21 - g2[0]) < 1e-10);
    CHECK(std::abs(cf.g22 - g2[1]) < 1e-10);
    CHECK(std::abs(cf.g31 - g3[0]) < 1e-10);
    CHECK(std::abs(cf.g32 - g3[1]) < 1e-10);
    CHECK(std::abs(cf.g33 - g3[2]) < 1e-10);
  }
}

TEST_CASE("constraints are the fixed-point residuals of the low-degree eigenpolynomials") {
  Gen g(43);
  for (int trial = 0; trial < 30; ++trial) {
    const HyperParams p = random_params(g);
    const auto cf = closed_form_coeffs(p.alpha, p.beta, p.delta);
    const auto k = ulam_constraints(p.alpha, p.beta, p.delta);
    const CVec r2 = residual(CVec{cf.g21, cf.g22}, ResidualSystem::Full);
    const CVec r3 = residual(CVec{cf.g31, cf.g32, cf.g33}, ResidualSystem::Full);
    const std::array<Complex, 5> mine{r2[0], r2[1], r3[0], r3[1], r3[2]};
    for (int i = 0; i < 5; ++i) CHECK(std::abs(std::abs(k[i]) - std::abs(mine[i])) < 1e-10);
  }
  for (auto z : ulam_constraints(0.3, 0.0, 0.0)) CHECK(std::abs(z) == 0.0);
}

TEST_CASE("constraint jacobian against finite differences") {
  Gen g(47);
  const double h = 1e-6;
  for (int trial = 0; trial < 30; ++trial) {
    const HyperParams p = random_params(g);
    const auto jac = ulam_constraints_jacobian(p.alpha, p.beta, p.delta);
    const auto bp = ulam_constraints(p.alpha, p.beta + h, p.delta);
    const auto bm = ulam_constraints(p.alpha, p.beta - h, p.delta);
    const auto dp = ulam_constraints(p.alpha, p.beta, p.delta + h);
    const auto dm = ulam_constraints(p.alpha, p.beta, p.delta - h);
    for (int i = 0; i < 5; ++i) {
      const double scale = std::max(1.0, std::abs(jac[i][0]) + std::abs(jac[i][1]));
      CHECK(std::abs((bp[i] - bm[i]) / (2.0 * h) - jac[i][0]) <= 1e-6 * scale);
      CHECK(std::abs((dp[i] - dm[i]) / (2.0 * h) - jac[i][1]) <= 1e-6 * scale);
    }
  }
}

TEST_CASE("minimizer reaches the origin from nearby starts") {
  for (double alpha : {-1.0, 0.1, 0.6}) {
    const auto m = minimize_constraints(alpha, {0.05, 0.02}, {-0.03, 0.01});
    CHECK(m.residual <= 1e-10);
    CHECK(std::abs(m.beta) <= 1e-6);
    CHECK(std::abs(m.delta) <= 1e-6);
  }
}

TEST_CASE("rigidity over the default grid") {
  const auto grid = grid_preset(GridPreset::Default);
  CHECK(grid.alphas.size() == 10);
  const auto rep = ulam_rigidity_check(grid);
  CHECK(rep.passed());
  CHECK(rep.unexpected_zeros.empty());
  CHECK(rep.offorigin_zero_minimizers == 0);
  CHECK(rep.origin_found_per_alpha);
  for (const auto& m : rep.minimizers) {
    if (m.residual <= 1e-10) CHECK(std::abs(m.beta) + std::abs(m.delta) <= 1e-6);
  }
  for (const auto& h : rep.higher_degree) {
    if (h.ulam_residual) CHECK(*h.ulam_residual <= 1e-10);
  }
}

TEST_CASE("wide and fine presets also pass") {
  CHECK(run_eigencheck(GridPreset::Wide).passed);
  CHECK(run_eigencheck(GridPreset::Fine).passed);
}

TEST_CASE("poles are detected") {
  CHECK(near_pole(0.25));
  CHECK(near_pole(0.5 + 1e-4));
  CHECK_FALSE(near_pole(0.35));
}
