#include "ulam/ulam_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ulam/error.hpp"

namespace ulam {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double sign_pow(std::size_t j) { return (j % 2 == 0) ? 1.0 : -1.0; }

CVec without(std::span<const Complex> c, std::size_t skip) {
  CVec out;
  out.reserve(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i != skip) out.push_back(c[i]);
  }
  return out;
}

CVec without(std::span<const Complex> c, std::size_t skip1, std::size_t skip2) {
  CVec out;
  out.reserve(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i != skip1 && i != skip2) out.push_back(c[i]);
  }
  return out;
}

void require_system_size(std::size_t n, ResidualSystem sys) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "residual system needs N >= 1");
  if (sys == ResidualSystem::Tilde && n < 2) {
    throw Error(ErrorCode::InvalidArgument, "TILDE system needs N >= 2");
  }
}

Complex product_of_differences(std::span<const Complex> v, std::size_t n, Complex x,
                               std::size_t skip2 = std::numeric_limits<std::size_t>::max()) {
  Complex prod = 1.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k != n && k != skip2) prod *= x - v[k];
  }
  return prod;
}

}  // namespace

const char* to_string(ResidualSystem sys) noexcept {
  return sys == ResidualSystem::Full ? "full" : "tilde";
}

std::vector<int> system_degrees(std::size_t n, ResidualSystem sys) {
  require_system_size(n, sys);
  std::vector<int> d(n);
  for (std::size_t j = 0; j < n; ++j) d[j] = static_cast<int>(j + 1);
  if (sys == ResidualSystem::Tilde) d[n - 1] = static_cast<int>(n - 1);
  return d;
}

std::size_t zero_tail_length(std::span<const Complex> c, double threshold) {
  std::size_t tail = 0;
  for (auto it = c.rbegin(); it != c.rend() && std::abs(*it) < threshold; ++it) ++tail;
  return tail;
}

bool all_real(std::span<const Complex> c, double threshold) {
  return std::all_of(c.begin(), c.end(),
                     [threshold](const Complex& z) { return std::abs(z.imag()) < threshold; });
}

bool pairwise_distinct(std::span<const Complex> c, double min_gap) {
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t j = i + 1; j < c.size(); ++j) {
      if (std::abs(c[i] - c[j]) <= min_gap) return false;
    }
  }
  return true;
}

FixedPointRecord make_record(CVec point, ResidualSystem sys, std::size_t cluster_size) {
  FixedPointRecord rec;
  rec.residual = residual_norm(point, sys);
  rec.cluster_size = cluster_size;
  rec.zero_tail = zero_tail_length(point);
  rec.is_real = all_real(point);
  rec.point = std::move(point);
  return rec;
}

CVec ulam_map(std::span<const Complex> c) { return poly_from_roots(c).coeffs(); }

CVec residual(std::span<const Complex> c, ResidualSystem sys) {
  const std::size_t n = c.size();
  require_system_size(n, sys);
  const CVec e = elem_sym_all(c);
  CVec r(n);
  for (std::size_t j = 1; j <= n; ++j) r[j - 1] = e[j] - sign_pow(j) * c[j - 1];
  if (sys == ResidualSystem::Tilde) {
    r[n - 1] = elem_sym(c.first(n - 1), n - 1) - sign_pow(n);
  }
  return r;
}

double residual_norm(std::span<const Complex> c, ResidualSystem sys) {
  return max_abs(residual(c, sys));
}

CMatrix jacobian(std::span<const Complex> c, ResidualSystem sys) {
  const std::size_t n = c.size();
  require_system_size(n, sys);
  require_finite(c, "jacobian input");
  CMatrix jac(n, n);
  // d e_j / d c_i = e_(j-1) of c with entry i removed.
  for (std::size_t i = 0; i < n; ++i) {
    const CVec e_minus = elem_sym_all(without(c, i));
    for (std::size_t j = 1; j <= n; ++j) jac(j - 1, i) = e_minus[j - 1];
    jac(i, i) -= sign_pow(i + 1);
  }
  if (sys == ResidualSystem::Tilde) {
    const auto head = c.first(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      jac(n - 1, i) = elem_sym_all(without(head, i))[n - 2];
    }
    jac(n - 1, n - 1) = 0.0;
  }
  return jac;
}

std::vector<CMatrix> second_derivatives(std::span<const Complex> c, ResidualSystem sys) {
  const std::size_t n = c.size();
  require_system_size(n, sys);
  std::vector<CMatrix> hess(n, CMatrix::Zero(n, n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i + 1; k < n; ++k) {
      const CVec e = elem_sym_all(without(c, i, k));
      for (std::size_t j = 2; j <= n; ++j) {
        hess[j - 1](i, k) = e[j - 2];
        hess[j - 1](k, i) = e[j - 2];
      }
    }
  }
  if (sys == ResidualSystem::Tilde) {
    hess[n - 1].setZero();
    if (n >= 3) {
      const auto head = c.first(n - 1);
      for (std::size_t i = 0; i + 1 < n; ++i) {
        for (std::size_t k = i + 1; k + 1 < n; ++k) {
          const Complex v = elem_sym_all(without(head, i, k))[n - 3];
          hess[n - 1](i, k) = v;
          hess[n - 1](k, i) = v;
        }
      }
    }
  }
  return hess;
}

FixedPointRecord newton_polish(std::span<const Complex> c0, ResidualSystem sys, double tol,
                               int max_iter) {
  require_system_size(c0.size(), sys);
  require_finite(c0, "newton_polish start");
  const std::size_t n = c0.size();
  Eigen::VectorXcd x = Eigen::Map<const Eigen::VectorXcd>(c0.data(), static_cast<Eigen::Index>(n));
  auto as_span = [&x]() { return std::span<const Complex>(x.data(), static_cast<std::size_t>(x.size())); };

  CVec best(c0.begin(), c0.end());
  double best_res = residual_norm(best, sys);
  double prev_step = std::numeric_limits<double>::infinity();
  double last_rcond = 1.0;
  bool singular = false;

  for (int iter = 0; iter < max_iter; ++iter) {
    const CVec f = residual(as_span(), sys);
    const double res = max_abs(f);
    if (res < best_res) {
      best_res = res;
      best.assign(x.data(), x.data() + n);
    }
    if (res == 0.0) break;

    Eigen::PartialPivLU<CMatrix> lu(jacobian(as_span(), sys));
    last_rcond = lu.rcond();
    if (!(last_rcond > 1e-15)) {
      singular = true;
      break;
    }
    const Eigen::VectorXcd dx = lu.solve(Eigen::Map<const Eigen::VectorXcd>(f.data(), static_cast<Eigen::Index>(n)));
    const double step = dx.cwiseAbs().maxCoeff();
    if (!std::isfinite(step)) {
      singular = true;
      break;
    }
    // Once within tolerance, stop as soon as the updates stop contracting.
    if (best_res <= tol && step >= 0.9 * prev_step) break;
    x -= dx;
    prev_step = step;
    if (step <= 4.0 * kEps * (1.0 + x.cwiseAbs().maxCoeff())) {
      const double final_res = residual_norm(as_span(), sys);
      if (final_res <= best_res) {
        best_res = final_res;
        best.assign(x.data(), x.data() + n);
      }
      break;
    }
  }

  if (best_res <= tol) return make_record(std::move(best), sys);
  if (singular || last_rcond < 1e-8) {
    throw Error(ErrorCode::SingularJacobian,
                "newton_polish: jacobian singular near residual " + std::to_string(best_res));
  }
  throw Error(ErrorCode::MaxIterations,
              "newton_polish: residual " + std::to_string(best_res) + " above tolerance after " +
                  std::to_string(max_iter) + " iterations");
}

bool IdentityReport::passed(double tol) const {
  if (!(rel1 <= tol) || !(rel4 <= tol)) return false;
  if (rel2 && !(*rel2 <= tol)) return false;
  if (rel3 && !(*rel3 <= tol)) return false;
  return true;
}

IdentityReport verify_identities(std::span<const Complex> gamma) {
  require_finite(gamma, "verify_identities input");
  const std::size_t n = gamma.size();
  IdentityReport rep;
  if (n == 0) return rep;

  const MonicPoly p{CVec(gamma.begin(), gamma.end())};
  const CVec e = elem_sym_all(gamma);
  CVec rel4_coeffs(n);
  for (std::size_t m = 1; m <= n; ++m) rel4_coeffs[m - 1] = sign_pow(m) * e[m];
  const MonicPoly p_sym{rel4_coeffs};

  for (std::size_t i = 0; i < n; ++i) {
    rep.rel1 = std::max(rep.rel1, std::abs(eval(p, gamma[i])));
    rep.rel4 = std::max(rep.rel4, std::abs(eval(p_sym, gamma[i])));
  }

  rep.distinct_skipped = !pairwise_distinct(gamma, kZeroThreshold);
  if (rep.distinct_skipped) return rep;

  const CVec d1 = derivative(p);
  // Second derivative: (N-m)(N-m-1) gamma_m for m = 0..N-2, gamma_0 = 1.
  CVec d2(n >= 2 ? n - 1 : 0);
  for (std::size_t m = 0; m + 2 <= n; ++m) {
    const Complex g = (m == 0) ? Complex(1.0) : gamma[m - 1];
    d2[m] = static_cast<double>((n - m) * (n - m - 1)) * g;
  }

  double rel2 = 0.0;
  double rel3 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Complex x = gamma[i];
    const Complex rhs2 = product_of_differences(gamma, i, x);
    rel2 = std::max(rel2, std::abs(eval_dense(d1, x) - rhs2));

    Complex rhs3{};
    for (std::size_t m = 0; m < n; ++m) {
      if (m != i) rhs3 += product_of_differences(gamma, i, x, m);
    }
    rhs3 *= 2.0;
    rel3 = std::max(rel3, std::abs(eval_dense(d2, x) - rhs3));
  }
  rep.rel2 = rel2;
  rep.rel3 = rel3;
  return rep;
}

CVec equivalent_system_defects(std::span<const Complex> c, std::span<const Complex> t,
                               EquivalentSystem variant) {
  const std::size_t n = c.size();
  if (t.size() != n) throw Error(ErrorCode::InvalidArgument, "node vector length must equal N");
  require_finite(c, "equivalent system coefficients");
  require_finite(t, "equivalent system nodes");
  const auto nodes_checked = variant == EquivalentSystem::Interpolation ? t : t.subspan(std::min<std::size_t>(1, n));
  if (!pairwise_distinct(nodes_checked, 1e-12)) {
    throw Error(ErrorCode::InvalidArgument, "equivalent system nodes must be pairwise distinct");
  }

  const MonicPoly q{CVec(c.begin(), c.end())};
  // q(x) minus the product form of the polynomial with roots c.
  auto value_defect = [&](Complex x) {
    Complex prod = 1.0;
    for (const Complex& cm : c) prod *= x - cm;
    return eval(q, x) - prod;
  };

  CVec out(n);
  if (variant == EquivalentSystem::Interpolation) {
    for (std::size_t j = 0; j < n; ++j) out[j] = value_defect(t[j]);
    return out;
  }

  const CVec dq = derivative(q);
  out[0] = value_defect(t[0]);
  for (std::size_t j = 1; j < n; ++j) {
    Complex rhs{};
    for (std::size_t k = 0; k < n; ++k) rhs += product_of_differences(c, k, t[j]);
    out[j] = eval_dense(dq, t[j]) - rhs;
  }
  return out;
}

bool verify_equivalent_system(std::span<const Complex> c, std::span<const Complex> t,
                              EquivalentSystem variant, double tol) {
  return max_abs(equivalent_system_defects(c, t, variant)) <= tol;
}

bool zero_tail_property(std::span<const Complex> gamma, double threshold) {
  bool seen_zero = false;
  for (const Complex& z : gamma) {
    const bool is_zero = std::abs(z) < threshold;
    if (seen_zero && !is_zero) return false;
    seen_zero = seen_zero || is_zero;
  }
  return true;
}

PadCheck pad_check(std::span<const Complex> gamma, std::size_t pad, double tol) {
  CVec padded(gamma.begin(), gamma.end());
  padded.resize(gamma.size() + pad, Complex{});
  PadCheck out;
  out.padded_residual = padded.empty() ? 0.0 : residual_norm(padded, ResidualSystem::Full);
  out.padded_is_fixed = out.padded_residual <= tol;
  out.zero_tail_ok = zero_tail_property(gamma);
  return out;
}

Orbit iterate_map(std::span<const Complex> c0, std::size_t steps) {
  constexpr double kEscape = 1e12;
  constexpr double kRevisit = 1e-9;
  Orbit orbit;
  orbit.points.emplace_back(c0.begin(), c0.end());
  require_finite(c0, "orbit start");
  for (std::size_t s = 0; s < steps; ++s) {
    CVec next = ulam_map(orbit.points.back());
    if (!is_finite(next) || max_abs(next) > kEscape) {
      throw Error(ErrorCode::Overflow, "orbit escaped beyond modulus 1e12 at step " + std::to_string(s + 1));
    }
    if (!orbit.revisit) {
      for (std::size_t k = 0; k < orbit.points.size(); ++k) {
        if (max_abs_diff(orbit.points[k], next) <= kRevisit) {
          orbit.revisit = std::make_pair(k, orbit.points.size());
          break;
        }
      }
    }
    orbit.points.push_back(std::move(next));
  }
  return orbit;
}

}  // namespace ulam
