#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace ulam {

using Complex = std::complex<double>;
using CVec = std::vector<Complex>;

// Monic polynomial x^N + c_1 x^(N-1) + ... + c_N. The leading 1 is implicit.
class MonicPoly {
 public:
  MonicPoly() = default;
  explicit MonicPoly(CVec coeffs);

  std::size_t degree() const noexcept { return coeffs_.size(); }
  const CVec& coeffs() const noexcept { return coeffs_; }
  // c_j for j = 1..N.
  Complex coeff(std::size_t j) const { return coeffs_.at(j - 1); }

  static MonicPoly monomial(std::size_t degree);

 private:
  CVec coeffs_;
};

// Throws InvalidArgument if any entry is NaN or infinite.
void require_finite(std::span<const Complex> values, const char* what);
bool is_finite(std::span<const Complex> values) noexcept;

// e_0..e_N of the entries, built by multiplying out prod (x - c_n) one factor
// at a time.
CVec elem_sym_all(std::span<const Complex> c);

// Elementary symmetric polynomial e_j; e_0 = 1.
Complex elem_sym(std::span<const Complex> c, std::size_t j);

MonicPoly poly_from_roots(std::span<const Complex> roots);

Complex eval(const MonicPoly& p, Complex z);

// Coefficients of p' from the leading term down: N, (N-1) c_1, ..., c_(N-1).
CVec derivative(const MonicPoly& p);

// Horner evaluation of a dense coefficient list, highest degree first.
Complex eval_dense(std::span<const Complex> coeffs, Complex z);

// Aberth-Ehrlich simultaneous iteration. Each returned root satisfies
// |p(z)| <= tol * max(1, sum_k |c_k| |z|^(N-k)), c_0 = 1. Multiple roots come
// back as clusters of nearly equal values.
CVec all_roots(const MonicPoly& p, double tol = 1e-12);

double max_abs(std::span<const Complex> v) noexcept;
double max_abs_diff(std::span<const Complex> a, std::span<const Complex> b);

}  // namespace ulam
