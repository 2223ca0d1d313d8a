#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ulam/poly_core.hpp"
#include "ulam/ulam_map.hpp"

namespace ulam {

enum class PathStatus { Converged, AtInfinity, Failed };

const char* to_string(PathStatus status) noexcept;

struct TrackOptions {
  double initial_step = 0.01;
  double max_step = 0.05;
  double step_floor = 1e-14;
  double escape_norm = 1e8;
  int max_steps = 10000;
  double corrector_tol = 1e-9;
  int corrector_iters = 3;
  // Below this t a step-size underflow hands the point to the endpoint
  // polish instead of failing the path; singular endpoints end up here.
  double endgame_t = 1e-4;
  double polish_tol = kPolishTolerance;
};

// Decoupled start system x_j^(d_j) = r_j with its prod d_j solutions.
struct StartSystem {
  std::vector<int> degrees;
  CVec constants;
  std::vector<CVec> points;
};

StartSystem start_system(std::span<const int> degrees, std::uint64_t seed);

// H(x, t) = gamma t S(x) + (1 - t) F(x), tracked from t = 1 to t = 0.
struct Homotopy {
  ResidualSystem system = ResidualSystem::Full;
  StartSystem start;
  Complex gamma{1.0, 0.0};
};

// Unit-modulus constant e^(i theta) with theta away from multiples of pi.
Complex draw_gamma(std::uint64_t seed);

Homotopy make_homotopy(std::size_t n, ResidualSystem sys, std::uint64_t seed);

struct PathResult {
  CVec start;
  CVec endpoint;
  PathStatus status = PathStatus::Failed;
  int steps = 0;
  double min_step = 0.0;
  // Newton at t = 0 reached the polish tolerance with a regular jacobian.
  bool polished = false;
  double residual = 0.0;
};

PathResult track_path(std::span<const Complex> start, const Homotopy& homotopy,
                      const TrackOptions& opts = {});

struct SolveOptions {
  TrackOptions track;
  double cluster_radius = 1e-6;
  // 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
};

struct SolutionSet {
  std::size_t n = 0;
  ResidualSystem system = ResidualSystem::Full;
  std::uint64_t seed = 0;
  Complex gamma{};
  std::vector<FixedPointRecord> records;
  std::size_t path_count = 0;
  std::size_t at_infinity_count = 0;
  std::size_t failed_count = 0;
  std::size_t retried_count = 0;
  std::vector<PathResult> paths;

  std::size_t multiplicity_total() const;
};

// Sorted lexicographically by (re, im) of each entry at 1e-8 resolution.
SolutionSet solve_system(std::size_t n, ResidualSystem sys, std::uint64_t seed,
                         const SolveOptions& opts = {});

// Groups points whose max-norm distance chains within radius. Input order
// does not affect the result.
std::vector<std::vector<std::size_t>> cluster_points(const std::vector<CVec>& points, double radius);

// Gauss-Newton on the deflated system {F(x) = 0, J(x) v = 0, <r, v> = 1}.
// Recovers a multiplicity point to full precision when J has a one
// dimensional kernel; returns nullopt when it does not converge.
std::optional<CVec> refine_singular(std::span<const Complex> x0, ResidualSystem sys);

struct UlamCounts {
  std::size_t n = 0;
  std::size_t u_n = 0;
  std::size_t v_tilde = 0;
  std::size_t v_zero = 0;
  std::size_t intersection = 0;
  // Record count of the direct FULL solve, for the cross-check.
  std::size_t full_records = 0;
  std::size_t full_paths = 0;
  std::size_t at_infinity = 0;

  bool consistent() const { return u_n == full_records; }
};

UlamCounts count_ulam(std::size_t n, std::uint64_t seed, const SolveOptions& opts = {});

// TILDE records with |c_N| below the zero threshold.
std::size_t tilde_intersection(const SolutionSet& tilde);

bool nontrivial_existence_check(std::size_t n, std::uint64_t seed, const SolveOptions& opts = {});

}  // namespace ulam
