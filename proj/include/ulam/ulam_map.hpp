#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ulam/poly_core.hpp"

namespace ulam {

using CMatrix = Eigen::MatrixXcd;

// FULL: alpha_1..alpha_N. TILDE: alpha_1..alpha_(N-1) followed by
// e_(N-1)(c_1..c_(N-1)) - (-1)^N, the c_N != 0 branch of alpha_N.
enum class ResidualSystem { Full, Tilde };

const char* to_string(ResidualSystem sys) noexcept;

// Total degrees of the component polynomials.
std::vector<int> system_degrees(std::size_t n, ResidualSystem sys);

inline constexpr double kZeroThreshold = 1e-8;
inline constexpr double kPolishTolerance = 1e-12;
inline constexpr double kIdentityTolerance = 1e-8;

struct FixedPointRecord {
  CVec point;
  double residual = 0.0;
  std::size_t cluster_size = 1;
  std::size_t zero_tail = 0;
  bool is_real = false;
};

// Trailing entries with modulus below the threshold.
std::size_t zero_tail_length(std::span<const Complex> c, double threshold = kZeroThreshold);
bool all_real(std::span<const Complex> c, double threshold = kZeroThreshold);
bool pairwise_distinct(std::span<const Complex> c, double min_gap);

// Fills point-derived fields; residual is the FULL/TILDE max-norm at point.
FixedPointRecord make_record(CVec point, ResidualSystem sys, std::size_t cluster_size = 1);

// psi^(N): coefficient vector of prod (x - c_n).
CVec ulam_map(std::span<const Complex> c);

CVec residual(std::span<const Complex> c, ResidualSystem sys);
double residual_norm(std::span<const Complex> c, ResidualSystem sys);

CMatrix jacobian(std::span<const Complex> c, ResidualSystem sys);

// d^2 residual_j / dc_i dc_k, laid out as hessians[j](i, k).
std::vector<CMatrix> second_derivatives(std::span<const Complex> c, ResidualSystem sys);

// Newton iteration continues past tol until the update stops contracting, so
// points near a multiple root are pushed as close as double precision allows.
// Throws SingularJacobian or MaxIterations when the residual stays above tol.
FixedPointRecord newton_polish(std::span<const Complex> c0, ResidualSystem sys,
                               double tol = kPolishTolerance, int max_iter = 100);

struct IdentityReport {
  // Max absolute defect over n = 1..N; unset when the check was skipped.
  double rel1 = 0.0;
  std::optional<double> rel2;
  std::optional<double> rel3;
  double rel4 = 0.0;
  bool distinct_skipped = false;

  bool passed(double tol) const;
};

IdentityReport verify_identities(std::span<const Complex> gamma);

enum class EquivalentSystem { Interpolation = 1, Derivative = 2 };

// Whether every equation of the chosen interpolation-node system holds at
// (c, t) within tol. Throws InvalidArgument if the nodes are not distinct.
bool verify_equivalent_system(std::span<const Complex> c, std::span<const Complex> t,
                              EquivalentSystem variant, double tol = kIdentityTolerance);

// Per-equation defects of the same systems.
CVec equivalent_system_defects(std::span<const Complex> c, std::span<const Complex> t,
                               EquivalentSystem variant);

struct PadCheck {
  bool padded_is_fixed = false;
  bool zero_tail_ok = false;
  double padded_residual = 0.0;

  bool passed() const { return padded_is_fixed && zero_tail_ok; }
};

PadCheck pad_check(std::span<const Complex> gamma, std::size_t pad, double tol = 1e-9);

// True if no entry below the threshold is followed by one above it.
bool zero_tail_property(std::span<const Complex> gamma, double threshold = kZeroThreshold);

struct Orbit {
  std::vector<CVec> points;
  // First (earlier, later) index pair whose points agree within 1e-9.
  std::optional<std::pair<std::size_t, std::size_t>> revisit;
};

// Throws Overflow if an entry modulus exceeds 1e12.
Orbit iterate_map(std::span<const Complex> c0, std::size_t steps);

}  // namespace ulam
