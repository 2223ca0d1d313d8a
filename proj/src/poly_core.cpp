#include "ulam/poly_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ulam/error.hpp"

namespace ulam {

MonicPoly::MonicPoly(CVec coeffs) : coeffs_(std::move(coeffs)) {
  require_finite(coeffs_, "polynomial coefficients");
}

MonicPoly MonicPoly::monomial(std::size_t degree) {
  return MonicPoly(CVec(degree, Complex{}));
}

bool is_finite(std::span<const Complex> values) noexcept {
  return std::all_of(values.begin(), values.end(), [](const Complex& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

void require_finite(std::span<const Complex> values, const char* what) {
  if (!is_finite(values)) {
    throw Error(ErrorCode::InvalidArgument,
                std::string(what) + " contain a non-finite entry");
  }
}

CVec elem_sym_all(std::span<const Complex> c) {
  require_finite(c, "elem_sym input");
  // a[j] holds the x^(k-j) coefficient of prod_{n<k} (x - c_n).
  CVec a(c.size() + 1, Complex{});
  a[0] = 1.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    for (std::size_t j = k + 1; j >= 1; --j) a[j] -= c[k] * a[j - 1];
  }
  for (std::size_t j = 1; j < a.size(); j += 2) a[j] = -a[j];
  return a;
}

Complex elem_sym(std::span<const Complex> c, std::size_t j) {
  if (j > c.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "elem_sym index " + std::to_string(j) + " exceeds length " +
                    std::to_string(c.size()));
  }
  return elem_sym_all(c)[j];
}

MonicPoly poly_from_roots(std::span<const Complex> roots) {
  CVec e = elem_sym_all(roots);
  CVec coeffs(roots.size());
  for (std::size_t j = 1; j <= roots.size(); ++j) {
    coeffs[j - 1] = (j % 2 == 0) ? e[j] : -e[j];
  }
  return MonicPoly(std::move(coeffs));
}

Complex eval(const MonicPoly& p, Complex z) {
  Complex acc = 1.0;
  for (const Complex& c : p.coeffs()) acc = acc * z + c;
  return acc;
}

Complex eval_dense(std::span<const Complex> coeffs, Complex z) {
  Complex acc{};
  for (const Complex& c : coeffs) acc = acc * z + c;
  return acc;
}

CVec derivative(const MonicPoly& p) {
  const std::size_t n = p.degree();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "derivative of a constant");
  CVec d(n);
  d[0] = static_cast<double>(n);
  for (std::size_t m = 1; m < n; ++m) {
    d[m] = static_cast<double>(n - m) * p.coeffs()[m - 1];
  }
  return d;
}

namespace {

// |p(z)| relative to the magnitude of the terms that produced it.
double relative_residual(const MonicPoly& p, Complex z, Complex value) {
  const double r = std::abs(z);
  double scale = 1.0;
  double acc = 1.0;
  for (const Complex& c : p.coeffs()) {
    acc = acc * r + std::abs(c);
  }
  scale = std::max(scale, acc);
  return std::abs(value) / scale;
}

constexpr double kRoundoff = 2.220446049250313e-16;

CVec dense_derivative(const CVec& dense) {
  const std::size_t degree = dense.size() - 1;
  CVec out(degree);
  for (std::size_t k = 0; k < degree; ++k) out[k] = static_cast<double>(degree - k) * dense[k];
  return out;
}

// Aberth resolves an m-fold root only to about tol^(1/m). Such a root is a
// simple root of the (m-1)-th derivative, so Newton on that derivative from the
// cluster centroid recovers it. The cluster collapses onto the refined point
// only when its residual is no larger than the worst member residual, or at
// roundoff level (rounded coefficients split a multiple root into a tiny cluster).
void merge_multiple_roots(const MonicPoly& p, CVec& z) {
  const std::size_t n = z.size();
  std::vector<std::size_t> group(n);
  for (std::size_t i = 0; i < n; ++i) group[i] = i;
  auto find = [&](std::size_t i) {
    while (group[i] != i) i = group[i] = group[group[i]];
    return i;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(z[i] - z[j]) <= 0.05 * std::max(1.0, std::abs(z[i]))) group[find(j)] = find(i);
    }
  }
  for (std::size_t root = 0; root < n; ++root) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < n; ++i) {
      if (find(i) == root) members.push_back(i);
    }
    if (members.size() < 2) continue;
    Complex centroid{};
    double worst = 0.0;
    for (std::size_t i : members) {
      centroid += z[i];
      worst = std::max(worst, relative_residual(p, z[i], eval(p, z[i])));
    }
    centroid /= static_cast<double>(members.size());
    CVec d{Complex(1.0)};
    d.insert(d.end(), p.coeffs().begin(), p.coeffs().end());
    for (std::size_t k = 1; k < members.size(); ++k) d = dense_derivative(d);
    const CVec dd = dense_derivative(d);
    for (int it = 0; it < 50; ++it) {
      const Complex step = eval_dense(d, centroid) / eval_dense(dd, centroid);
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
      centroid -= step;
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(centroid))) break;
    }
    if (relative_residual(p, centroid, eval(p, centroid)) <= std::max(worst, 64.0 * kRoundoff)) {
      for (std::size_t i : members) z[i] = centroid;
    }
  }
}

}  // namespace

CVec all_roots(const MonicPoly& p, double tol) {
  const std::size_t n = p.degree();
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "all_roots needs degree >= 1");
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "all_roots tolerance must be positive");

  const CVec dp = derivative(p);
  double cauchy = 0.0;
  for (const Complex& c : p.coeffs()) cauchy = std::max(cauchy, std::abs(c));
  cauchy += 1.0;

  // Roots of unity scaled by the Cauchy bound, rotated off the real axis and
  // with slightly varying radii so no two starts are symmetric.
  CVec z(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n) + 0.4;
    const double radius = cauchy * (1.0 - 0.05 * static_cast<double>(k) / static_cast<double>(n));
    z[k] = std::polar(radius, angle);
  }

  constexpr int kMaxIter = 500;
  constexpr double kEps = 2.220446049250313e-16;
  std::vector<bool> done(n, false);
  int extra_sweeps = 0;
  for (int iter = 0; iter < kMaxIter; ++iter) {
    bool all_done = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i]) continue;
      const Complex value = eval(p, z[i]);
      if (value == Complex{}) {
        done[i] = true;
        continue;
      }
      const Complex ratio = value / eval_dense(dp, z[i]);
      Complex repulsion{};
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) repulsion += 1.0 / (z[i] - z[j]);
      }
      const Complex step = ratio / (1.0 - ratio * repulsion);
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) {
        // Landed on a critical point; nudge and retry next sweep.
        z[i] += Complex(1e-8, 1e-8) * (1.0 + std::abs(z[i]));
        all_done = false;
        continue;
      }
      z[i] -= step;
      if (std::abs(step) <= 4.0 * kEps * std::max(1.0, std::abs(z[i]))) {
        done[i] = true;
      } else {
        all_done = false;
      }
    }
    if (all_done) break;

    bool residual_ok = true;
    for (std::size_t i = 0; i < n && residual_ok; ++i) {
      residual_ok = relative_residual(p, z[i], eval(p, z[i])) <= tol;
    }
    // Two more sweeps after the residual test first passes sharpens simple
    // roots to full precision.
    if (residual_ok && ++extra_sweeps > 2) break;
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (relative_residual(p, z[i], eval(p, z[i])) > tol) {
      throw Error(ErrorCode::NonConvergence,
                  "all_roots: residual above tolerance after " +
                      std::to_string(kMaxIter) + " iterations");
    }
  }
  merge_multiple_roots(p, z);
  return z;
}

double max_abs(std::span<const Complex> v) noexcept {
  double m = 0.0;
  for (const Complex& z : v) m = std::max(m, std::abs(z));
  return m;
}

double max_abs_diff(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::InvalidArgument, "max_abs_diff: length mismatch");
  }
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace ulam
