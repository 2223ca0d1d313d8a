#include "ulam/hypergeometric.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "ulam/error.hpp"
#include "ulam/ulam_map.hpp"

namespace ulam {

Complex eigenvalue(const HyperParams& params, std::size_t n) {
  const double nd = static_cast<double>(n);
  return nd - nd * (nd - 1.0) * params.alpha;
}

EigenPoly recurrence_coeffs(const HyperParams& params, std::size_t n) {
  require_finite(std::array{params.alpha, params.beta, params.delta, params.a1}, "hypergeometric parameters");
  EigenPoly out;
  out.n = n;
  out.lambda = eigenvalue(params, n);
  out.coeffs.assign(n, Complex{});
  const double nd = static_cast<double>(n);

  auto gap = [&](std::size_t j) {
    const Complex d = out.lambda - eigenvalue(params, n - j);
    if (std::abs(d) < 1e-12) {
      throw Error(ErrorCode::DegenerateEigenvalues,
                  "lambda_" + std::to_string(n) + " - lambda_" + std::to_string(n - j) + " vanishes");
    }
    return d;
  };

  if (n >= 1) {
    out.coeffs[0] = (nd * params.a1 - nd * (nd - 1.0) * params.beta) / gap(1);
  }
  if (n >= 2) {
    const Complex d = gap(2);
    out.coeffs[1] = (nd - 1.0) * (params.a1 - (nd - 2.0) * params.beta) / d * out.coeffs[0] -
                    nd * (nd - 1.0) * params.delta / d;
  }
  for (std::size_t j = 3; j <= n; ++j) {
    const double jd = static_cast<double>(j);
    const Complex d = gap(j);
    out.coeffs[j - 1] = (nd - jd + 1.0) * (params.a1 - (nd - jd) * params.beta) / d * out.coeffs[j - 2] -
                        (nd - jd + 2.0) * (nd - jd + 1.0) * params.delta / d * out.coeffs[j - 3];
  }
  return out;
}

double eigen_residual(const EigenPoly& poly, const HyperParams& params, std::span<const Complex> samples) {
  const MonicPoly y{poly.coeffs};
  // Dense coefficient lists of y' and y'', highest degree first.
  CVec dy;
  CVec d2y;
  if (y.degree() >= 1) dy = derivative(y);
  for (std::size_t m = 0; m + 1 < dy.size(); ++m) {
    d2y.push_back(static_cast<double>(dy.size() - 1 - m) * dy[m]);
  }
  double worst = 0.0;
  for (const Complex& x : samples) {
    const Complex p = (params.alpha * x + params.beta) * x + params.delta;
    const Complex q = -(x + params.a1);
    const Complex value = p * eval_dense(d2y, x) + q * eval_dense(dy, x) + poly.lambda * eval(y, x);
    worst = std::max(worst, std::abs(value));
  }
  return worst;
}

LowDegreeCoeffs closed_form_coeffs(Complex alpha, Complex beta, Complex delta) {
  LowDegreeCoeffs g;
  g.g21 = -2.0 * beta / (1.0 - 2.0 * alpha);
  g.g22 = delta / (alpha - 1.0);
  g.g31 = -6.0 * beta / (1.0 - 4.0 * alpha);
  g.g32 = 3.0 * (2.0 * beta * beta + delta * (4.0 * alpha - 1.0)) / ((1.0 - 3.0 * alpha) * (1.0 - 4.0 * alpha));
  g.g33 = 4.0 * beta * delta / ((1.0 - 2.0 * alpha) * (1.0 - 4.0 * alpha));
  return g;
}

std::array<Complex, 5> ulam_constraints(Complex alpha, Complex beta, Complex delta) {
  const LowDegreeCoeffs g = closed_form_coeffs(alpha, beta, delta);
  return {
      2.0 * g.g21 + g.g22,
      g.g22 - g.g21 * g.g22,
      2.0 * g.g31 + g.g32 + g.g33,
      g.g32 - g.g31 * g.g32 - g.g32 * g.g33 - g.g31 * g.g33,
      g.g33 + g.g31 * g.g32 * g.g33,
  };
}

std::array<std::array<Complex, 2>, 5> ulam_constraints_jacobian(Complex alpha, Complex beta, Complex delta) {
  const LowDegreeCoeffs g = closed_form_coeffs(alpha, beta, delta);
  const Complex e = (1.0 - 2.0 * alpha) * (1.0 - 4.0 * alpha);
  const Complex d = (1.0 - 3.0 * alpha) * (1.0 - 4.0 * alpha);
  // Partials of each coefficient: {d/d beta, d/d delta}.
  const std::array<Complex, 2> g21{-2.0 / (1.0 - 2.0 * alpha), 0.0};
  const std::array<Complex, 2> g22{0.0, 1.0 / (alpha - 1.0)};
  const std::array<Complex, 2> g31{-6.0 / (1.0 - 4.0 * alpha), 0.0};
  const std::array<Complex, 2> g32{12.0 * beta / d, 3.0 * (4.0 * alpha - 1.0) / d};
  const std::array<Complex, 2> g33{4.0 * delta / e, 4.0 * beta / e};

  std::array<std::array<Complex, 2>, 5> jac{};
  for (int k = 0; k < 2; ++k) {
    jac[0][k] = 2.0 * g21[k] + g22[k];
    jac[1][k] = g22[k] - g21[k] * g.g22 - g.g21 * g22[k];
    jac[2][k] = 2.0 * g31[k] + g32[k] + g33[k];
    jac[3][k] = g32[k] - (g31[k] * g.g32 + g.g31 * g32[k]) - (g32[k] * g.g33 + g.g32 * g33[k]) -
                (g31[k] * g.g33 + g.g31 * g33[k]);
    jac[4][k] = g33[k] + g31[k] * g.g32 * g.g33 + g.g31 * g32[k] * g.g33 + g.g31 * g.g32 * g33[k];
  }
  return jac;
}

const char* to_string(GridPreset preset) noexcept {
  switch (preset) {
    case GridPreset::Default: return "default";
    case GridPreset::Wide: return "wide";
    case GridPreset::Fine: return "fine";
  }
  return "unknown";
}

bool near_pole(double alpha, double margin) {
  for (double pole : {0.25, 1.0 / 3.0, 0.5, 1.0}) {
    if (std::abs(alpha - pole) < margin) return true;
  }
  return false;
}

namespace {

std::vector<Complex> modulus_grid(double radius, int count) {
  // Points on rays at several angles, including the origin.
  std::vector<Complex> out{Complex{}};
  for (int k = 1; k < count; ++k) {
    const double r = radius * static_cast<double>((k + 1) / 2) / static_cast<double>(count / 2);
    const double angle = (k % 2 == 0) ? 2.0 + 0.7 * k : 0.3 * k;
    out.push_back(std::polar(std::min(r, radius), angle));
  }
  return out;
}

}  // namespace

RigidityGrid grid_preset(GridPreset preset) {
  RigidityGrid g;
  switch (preset) {
    case GridPreset::Default:
      g.alphas = {-1.0, -0.5, 0.0, 0.1, 0.2, 0.35, 0.6, 0.75, 2.0, 5.0};
      g.betas = modulus_grid(2.0, 5);
      g.deltas = modulus_grid(2.0, 5);
      g.multistarts = 20;
      g.start_radius = 2.0;
      break;
    case GridPreset::Wide:
      g.alphas = {-10.0, -3.0, -1.0, -0.5, 0.0, 0.1, 0.2, 0.35, 0.6, 0.75, 0.9, 1.5, 2.0, 5.0, 20.0};
      g.betas = modulus_grid(5.0, 7);
      g.deltas = modulus_grid(5.0, 7);
      g.multistarts = 40;
      g.start_radius = 5.0;
      break;
    case GridPreset::Fine:
      for (int k = 0; k <= 50; ++k) {
        const double a = -2.0 + 0.1 * k + 0.013;
        if (!near_pole(a, 0.02)) g.alphas.push_back(a);
      }
      g.betas = modulus_grid(2.0, 9);
      g.deltas = modulus_grid(2.0, 9);
      g.multistarts = 20;
      g.start_radius = 2.0;
      break;
  }
  return g;
}

MinimizerResult minimize_constraints(double alpha, Complex beta0, Complex delta0, int max_iter) {
  using Vec2 = Eigen::Vector2cd;
  MinimizerResult out;
  out.alpha = alpha;
  out.start_beta = beta0;
  out.start_delta = delta0;

  auto cost = [alpha](const Vec2& z) {
    double s = 0.0;
    for (const Complex& c : ulam_constraints(alpha, z[0], z[1])) s += std::norm(c);
    return s;
  };

  Vec2 z(beta0, delta0);
  double f = cost(z);
  double mu = 1e-3;
  int iter = 0;
  for (; iter < max_iter && f > 0.0; ++iter) {
    const auto g = ulam_constraints(alpha, z[0], z[1]);
    const auto jac = ulam_constraints_jacobian(alpha, z[0], z[1]);
    Eigen::Matrix<Complex, 5, 2> jm;
    Eigen::Matrix<Complex, 5, 1> gv;
    for (int k = 0; k < 5; ++k) {
      gv(k) = g[static_cast<std::size_t>(k)];
      jm(k, 0) = jac[static_cast<std::size_t>(k)][0];
      jm(k, 1) = jac[static_cast<std::size_t>(k)][1];
    }
    const Eigen::Matrix2cd normal = jm.adjoint() * jm;
    const Vec2 grad = jm.adjoint() * gv;

    bool accepted = false;
    while (mu < 1e12) {
      Eigen::Matrix2cd damped = normal;
      damped.diagonal().array() += mu * (1.0 + normal.diagonal().real().maxCoeff());
      const Vec2 step = damped.partialPivLu().solve(-grad);
      const Vec2 trial = z + step;
      const double ft = cost(trial);
      if (std::isfinite(ft) && ft < f) {
        const double shrink = step.cwiseAbs().maxCoeff();
        z = trial;
        f = ft;
        mu = std::max(mu / 10.0, 1e-15);
        accepted = true;
        if (shrink <= 1e-16 * (1.0 + z.cwiseAbs().maxCoeff())) iter = max_iter;
        break;
      }
      mu *= 10.0;
    }
    if (!accepted) break;
  }

  out.beta = z[0];
  out.delta = z[1];
  double worst = 0.0;
  for (const Complex& c : ulam_constraints(alpha, z[0], z[1])) worst = std::max(worst, std::abs(c));
  out.residual = worst;
  out.iterations = iter;
  return out;
}

bool RigidityReport::passed() const {
  return unexpected_zeros.empty() && offorigin_zero_minimizers == 0 && origin_found_per_alpha;
}

RigidityReport ulam_rigidity_check(const RigidityGrid& grid, double tol) {
  RigidityReport rep;
  rep.tol = tol;
  std::mt19937_64 rng(grid.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  for (double alpha : grid.alphas) {
    if (near_pole(alpha)) {
      throw Error(ErrorCode::InvalidArgument, "rigidity grid contains alpha at a pole: " + std::to_string(alpha));
    }
    bool found_origin = false;
    std::vector<MinimizerResult> at_origin;
    for (int s = 0; s < grid.multistarts; ++s) {
      const Complex b0(grid.start_radius * unit(rng), grid.start_radius * unit(rng));
      const Complex d0(grid.start_radius * unit(rng), grid.start_radius * unit(rng));
      MinimizerResult m = minimize_constraints(alpha, b0, d0);
      if (m.residual <= tol) {
        if (std::max(std::abs(m.beta), std::abs(m.delta)) <= 1e-6) {
          found_origin = true;
          at_origin.push_back(m);
        } else {
          ++rep.offorigin_zero_minimizers;
        }
      }
      rep.minimizers.push_back(m);
    }
    rep.origin_found_per_alpha = rep.origin_found_per_alpha && found_origin;

    double origin_res = 0.0;
    for (const Complex& c : ulam_constraints(alpha, 0.0, 0.0)) origin_res = std::max(origin_res, std::abs(c));
    rep.origin_residuals.push_back(origin_res);

    // Degrees 4 and 5 at the zero-residual minimizer.
    const Complex beta = at_origin.empty() ? Complex{} : at_origin.front().beta;
    const Complex delta = at_origin.empty() ? Complex{} : at_origin.front().delta;
    for (std::size_t n : {4u, 5u}) {
      HigherDegreeCheck hc;
      hc.alpha = alpha;
      hc.n = n;
      try {
        const EigenPoly poly = recurrence_coeffs({alpha, beta, delta, 0.0}, n);
        hc.ulam_residual = residual_norm(poly.coeffs, ResidualSystem::Full);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateEigenvalues) throw;
      }
      rep.higher_degree.push_back(hc);
    }

    for (const Complex& b : grid.betas) {
      for (const Complex& d : grid.deltas) {
        if (b == Complex{} && d == Complex{}) continue;
        ++rep.grid_points_checked;
        double worst = 0.0;
        for (const Complex& c : ulam_constraints(alpha, b, d)) worst = std::max(worst, std::abs(c));
        if (!(worst > tol)) rep.unexpected_zeros.push_back({Complex(alpha, 0.0), b, d});
      }
    }
  }
  return rep;
}

}  // namespace ulam
