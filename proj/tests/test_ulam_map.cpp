#include "doctest.h"
#include "support.hpp"
#include "ulam/error.hpp"
#include "ulam/homotopy.hpp"
#include "ulam/ulam_map.hpp"

using namespace ulam;
using testing::Gen;

TEST_CASE("ulam_map fixes the known Ulam points") {
  CHECK(max_abs_diff(ulam_map(CVec{1.0, -2.0}), CVec{1.0, -2.0}) < 1e-15);
  CHECK(max_abs(ulam_map(CVec(5, 0.0))) == 0.0);
  CHECK(max_abs_diff(ulam_map(CVec{1.0, -1.0, -1.0}), CVec{1.0, -1.0, -1.0}) < 1e-15);
}

TEST_CASE("residual examples") {
  CHECK(max_abs(residual(CVec{1.0, -2.0}, ResidualSystem::Full)) < 1e-15);
  CHECK(max_abs(residual(CVec(4, 0.0), ResidualSystem::Full)) == 0.0);
  CHECK(max_abs(residual(CVec{1.0, -1.0, -1.0}, ResidualSystem::Tilde)) < 1e-15);
  CHECK(residual_norm(CVec{1.0, -2.5}, ResidualSystem::Full) > 0.1);
}

TEST_CASE("system degrees") {
  CHECK(system_degrees(4, ResidualSystem::Full) == std::vector<int>{1, 2, 3, 4});
  CHECK(system_degrees(5, ResidualSystem::Tilde) == std::vector<int>{1, 2, 3, 4, 4});
}

TEST_CASE("jacobian by hand at (1,-2)") {
  const CMatrix j = jacobian(CVec{1.0, -2.0}, ResidualSystem::Full);
  CHECK(std::abs(j(0, 0) - 2.0) < 1e-15);
  CHECK(std::abs(j(0, 1) - 1.0) < 1e-15);
  CHECK(std::abs(j(1, 0) + 2.0) < 1e-15);
  CHECK(std::abs(j(1, 1)) < 1e-15);
}

TEST_CASE("property: jacobian against finite differences") {
  Gen g(17);
  const double h = 1e-6;
  for (auto sys : {ResidualSystem::Full, ResidualSystem::Tilde}) {
    for (std::size_t n = 2; n <= 5; ++n) {
      for (int trial = 0; trial < 50; ++trial) {
        const CVec c = g.vec(n, 1.0);
        const CMatrix j = jacobian(c, sys);
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          CVec plus = c, minus = c;
          plus[i] += h;
          minus[i] -= h;
          const CVec fp = residual(plus, sys), fm = residual(minus, sys);
          for (std::size_t r = 0; r < n; ++r) {
            worst = std::max(worst, std::abs((fp[r] - fm[r]) / (2.0 * h) - j(r, i)));
          }
        }
        CHECK(worst <= 1e-6);
      }
    }
  }
}

TEST_CASE("property: second derivatives against finite differences of the jacobian") {
  Gen g(19);
  const double h = 1e-6;
  for (std::size_t n = 2; n <= 5; ++n) {
    for (int trial = 0; trial < 10; ++trial) {
      const CVec c = g.vec(n, 1.0);
      const auto hess = second_derivatives(c, ResidualSystem::Full);
      for (std::size_t k = 0; k < n; ++k) {
        CVec plus = c, minus = c;
        plus[k] += h;
        minus[k] -= h;
        const CMatrix fd = (jacobian(plus, ResidualSystem::Full) - jacobian(minus, ResidualSystem::Full)) / (2.0 * h);
        for (std::size_t r = 0; r < n; ++r) {
          for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(fd(r, i) - hess[r](i, k)) <= 1e-6);
        }
      }
    }
  }
}

TEST_CASE("newton_polish examples") {
  const auto a = newton_polish(CVec{1.001, -2.002}, ResidualSystem::Full);
  CHECK(max_abs_diff(a.point, CVec{1.0, -2.0}) < 1e-12);
  const auto b = newton_polish(CVec(3, 0.0), ResidualSystem::Full);
  CHECK(b.residual == 0.0);
  CHECK(max_abs(b.point) == 0.0);
  const auto c = newton_polish(CVec{1.0005, -0.9995, -1.0004}, ResidualSystem::Full);
  CHECK(max_abs_diff(c.point, CVec{1.0, -1.0, -1.0}) < 1e-6);
  CHECK(c.residual <= kPolishTolerance);
}

TEST_CASE("records carry zero tails and realness") {
  const auto rec = make_record(CVec{1.0, -2.0, 0.0}, ResidualSystem::Full);
  CHECK(rec.zero_tail == 1);
  CHECK(rec.is_real);
  CHECK(zero_tail_length(CVec{0.0, 0.0}) == 2);
  CHECK_FALSE(all_real(CVec{Complex(1.0, 0.1)}));
}

TEST_CASE("identities at (1,-2) and at the origin") {
  const auto rep = verify_identities(CVec{1.0, -2.0});
  CHECK(rep.rel1 < 1e-14);
  REQUIRE(rep.rel2.has_value());
  CHECK(*rep.rel2 < 1e-14);
  REQUIRE(rep.rel3.has_value());
  CHECK(*rep.rel3 < 1e-14);
  CHECK(rep.rel4 < 1e-14);
  CHECK(rep.passed(kIdentityTolerance));

  const auto zero = verify_identities(CVec(3, 0.0));
  CHECK(zero.rel1 == 0.0);
  CHECK(zero.rel4 == 0.0);
  CHECK_FALSE(zero.rel2.has_value());
  CHECK_FALSE(zero.rel3.has_value());
  CHECK(zero.distinct_skipped);
}

TEST_CASE("identities flag a non-fixed point") {
  const auto rep = verify_identities(CVec{1.0, -2.5});
  CHECK_FALSE(rep.passed(kIdentityTolerance));
}

TEST_CASE("equivalent system examples") {
  const CVec t{0.0, 1.0};
  CHECK(verify_equivalent_system(CVec{1.0, -2.0}, t, EquivalentSystem::Interpolation));
  CHECK(verify_equivalent_system(CVec(2, 0.0), t, EquivalentSystem::Interpolation));
  CHECK_FALSE(verify_equivalent_system(CVec{1.0, -2.5}, t, EquivalentSystem::Interpolation));
  CHECK(verify_equivalent_system(CVec{1.0, -2.0}, t, EquivalentSystem::Derivative));
  CHECK_THROWS_AS(verify_equivalent_system(CVec{1.0, -2.0}, CVec{0.5, 0.5}, EquivalentSystem::Interpolation),
                  Error);
}

TEST_CASE("property: equivalent systems agree with the FULL residual") {
  Gen g(23);
  for (std::size_t n = 2; n <= 4; ++n) {
    const auto set = solve_system(n, ResidualSystem::Full, 1);
    for (int trial = 0; trial < 100; ++trial) {
      CVec c;
      // Alternate enumerated points, near misses and unstructured draws.
      switch (trial % 3) {
        case 0: c = set.records[trial % set.records.size()].point; break;
        case 1:
          c = set.records[trial % set.records.size()].point;
          c[trial % n] += 1e-3;
          break;
        default: c = g.vec(n); break;
      }
      const CVec t = g.distinct_in_disc(n, 0.1);
      const bool full = residual_norm(c, ResidualSystem::Full) <= kIdentityTolerance;
      CHECK(full == verify_equivalent_system(c, t, EquivalentSystem::Interpolation));
      CHECK(full == verify_equivalent_system(c, t, EquivalentSystem::Derivative));
    }
  }
}

TEST_CASE("padding examples") {
  const auto a = pad_check(CVec{1.0, -2.0}, 1);
  CHECK(a.passed());
  CHECK(a.padded_residual == 0.0);
  CHECK(pad_check(CVec(2, 0.0), 3).passed());
  CHECK(pad_check(CVec{1.0, -1.0, -1.0}, 2).passed());
  CHECK(zero_tail_property(CVec{1.0, -2.0, 0.0}));
  CHECK_FALSE(zero_tail_property(CVec{1.0, 0.0, -2.0}));
}

TEST_CASE("orbits") {
  const auto fixed = iterate_map(CVec{1.0, -2.0}, 4);
  CHECK(fixed.points.size() == 5);
  REQUIRE(fixed.revisit.has_value());
  CHECK(fixed.revisit->first == 0);
  CHECK(fixed.revisit->second == 1);
  for (const auto& p : fixed.points) CHECK(max_abs_diff(p, CVec{1.0, -2.0}) == 0.0);

  const auto zero = iterate_map(CVec(3, 0.0), 3);
  for (const auto& p : zero.points) CHECK(max_abs(p) == 0.0);

  CHECK_THROWS_AS(iterate_map(CVec{1e7, 1e7}, 5), Error);
}

TEST_CASE("orbit of (0.1, 0.1) regression") {
  // Exact rational iteration, rounded to double.
  const std::vector<CVec> expect{
      {0.1, 0.1},
      {-0.2, 0.01},
      {0.19, -0.002},
      {-0.188, -0.00038},
      {0.18838, 7.144e-05},
      {-0.18845144, 1.34578672e-05},
      {0.1884379821328, -2.536154453168768e-06},
      {-0.18843544597834683, -4.779078275322374e-07},
      {0.18843592388617436, 9.005477461758003e-08},
  };
  const auto orbit = iterate_map(CVec{0.1, 0.1}, 8);
  REQUIRE(orbit.points.size() == expect.size());
  for (std::size_t k = 0; k < expect.size(); ++k) CHECK(max_abs_diff(orbit.points[k], expect[k]) < 1e-14);
  CHECK_FALSE(orbit.revisit.has_value());
}
