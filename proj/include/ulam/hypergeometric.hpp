#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ulam/poly_core.hpp"

namespace ulam {

// Operator p(x) y'' + q(x) y' with p = alpha x^2 + beta x + delta and
// q = -(x + a1).
struct HyperParams {
  Complex alpha{};
  Complex beta{};
  Complex delta{};
  Complex a1{};
};

// lambda_N = N - N (N - 1) alpha.
Complex eigenvalue(const HyperParams& params, std::size_t n);

// Monic eigenpolynomial x^N + C_1 x^(N-1) + ... + C_N.
struct EigenPoly {
  std::size_t n = 0;
  CVec coeffs;
  Complex lambda{};
};

// Three-branch coefficient recurrence. Throws DegenerateEigenvalues when
// some |lambda_N - lambda_(N-j)| < 1e-12.
EigenPoly recurrence_coeffs(const HyperParams& params, std::size_t n);

// max |p y'' + q y' + lambda y| over the samples.
double eigen_residual(const EigenPoly& poly, const HyperParams& params, std::span<const Complex> samples);

// Degree-2 and degree-3 eigenpolynomial coefficients with a1 = 0, in closed
// form.
struct LowDegreeCoeffs {
  Complex g21, g22;
  Complex g31, g32, g33;
};

LowDegreeCoeffs closed_form_coeffs(Complex alpha, Complex beta, Complex delta);

// The five conditions for both closed-form polynomials to be Ulam
// polynomials: two for degree 2, three for degree 3.
std::array<Complex, 5> ulam_constraints(Complex alpha, Complex beta, Complex delta);

// d constraints / d (beta, delta), row per constraint.
std::array<std::array<Complex, 2>, 5> ulam_constraints_jacobian(Complex alpha, Complex beta, Complex delta);

enum class GridPreset { Default, Wide, Fine };

const char* to_string(GridPreset preset) noexcept;

struct RigidityGrid {
  std::vector<double> alphas;
  std::vector<Complex> betas;
  std::vector<Complex> deltas;
  int multistarts = 20;
  double start_radius = 2.0;
  std::uint64_t seed = 7;
};

RigidityGrid grid_preset(GridPreset preset);

// alpha values where lambda_2..lambda_3 coincide or the closed forms have a
// pole: 1/4, 1/3, 1/2, 1.
bool near_pole(double alpha, double margin = 1e-3);

struct MinimizerResult {
  double alpha = 0.0;
  Complex start_beta, start_delta;
  Complex beta, delta;
  double residual = 0.0;  // max |constraint| at the minimizer
  int iterations = 0;
};

struct HigherDegreeCheck {
  double alpha = 0.0;
  std::size_t n = 0;
  // FULL residual of the degree-n recurrence output; unset when the
  // recurrence is degenerate at this alpha.
  std::optional<double> ulam_residual;
};

struct RigidityReport {
  double tol = 0.0;
  std::vector<MinimizerResult> minimizers;
  // Grid points with (beta, delta) != 0 where every constraint is within tol.
  std::vector<std::array<Complex, 3>> unexpected_zeros;
  std::size_t grid_points_checked = 0;
  // max |constraint| at (beta, delta) = 0 per alpha.
  std::vector<double> origin_residuals;
  bool origin_found_per_alpha = true;
  // Minimizers with residual <= tol that are farther than 1e-6 from 0.
  std::size_t offorigin_zero_minimizers = 0;
  std::vector<HigherDegreeCheck> higher_degree;

  bool passed() const;
};

// Multistart Levenberg-Marquardt on the five constraints over (beta, delta)
// for each alpha, then grid spot checks.
RigidityReport ulam_rigidity_check(const RigidityGrid& grid, double tol = 1e-10);

// Local minimizer from one start. Exposed for tests.
MinimizerResult minimize_constraints(double alpha, Complex beta0, Complex delta0, int max_iter = 200);

}  // namespace ulam
