// Shared helpers for the unit suites: seeded generators and comparisons.
#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "ulam/poly_core.hpp"

namespace testing {

using ulam::Complex;
using ulam::CVec;

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  Complex in_disc(double radius = 1.0) {
    const double r = radius * std::sqrt(uniform(0.0, 1.0));
    return std::polar(r, uniform(0.0, 2.0 * M_PI));
  }

  Complex in_box(double half) { return {uniform(-half, half), uniform(-half, half)}; }

  CVec vec(std::size_t n, double half = 2.0) {
    CVec v(n);
    for (auto& z : v) z = in_box(half);
    return v;
  }

  // Points in the unit disc with a minimum pairwise gap.
  CVec distinct_in_disc(std::size_t n, double gap = 0.05) {
    CVec v;
    while (v.size() < n) {
      const Complex z = in_disc();
      if (std::all_of(v.begin(), v.end(), [&](Complex w) { return std::abs(z - w) >= gap; })) v.push_back(z);
    }
    return v;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline bool lex_less(Complex a, Complex b) {
  return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
}

// Greedy nearest matching; adequate when the sets are well separated.
inline double matched_distance(CVec a, CVec b) {
  double worst = 0.0;
  for (const Complex z : a) {
    auto it = std::min_element(b.begin(), b.end(),
                               [&](Complex u, Complex v) { return std::abs(u - z) < std::abs(v - z); });
    worst = std::max(worst, std::abs(*it - z));
    b.erase(it);
  }
  return worst;
}

}  // namespace testing
