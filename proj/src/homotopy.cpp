#include "ulam/homotopy.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <exception>
#include <mutex>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <thread>

#include "ulam/error.hpp"

namespace ulam {

namespace {

using Vec = Eigen::VectorXcd;

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::span<const Complex> as_span(const Vec& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

Vec to_vec(std::span<const Complex> c) {
  return Eigen::Map<const Vec>(c.data(), static_cast<Eigen::Index>(c.size()));
}

CVec to_cvec(const Vec& v) { return CVec(v.data(), v.data() + v.size()); }

double norm_inf(const Vec& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

struct Evaluated {
  Vec value;
  CMatrix jac_x;
  Vec d_t;
};

// H, dH/dx and dH/dt at (x, t).
Evaluated evaluate(const Homotopy& hom, const Vec& x, double t) {
  const std::size_t n = static_cast<std::size_t>(x.size());
  const CVec f = residual(as_span(x), hom.system);
  const CMatrix jf = jacobian(as_span(x), hom.system);
  Vec s(n);
  CMatrix js = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    const int d = hom.start.degrees[j];
    const Complex xd1 = std::pow(x[j], d - 1);
    s[j] = xd1 * x[j] - hom.start.constants[j];
    js(j, j) = static_cast<double>(d) * xd1;
  }
  const Vec fv = to_vec(f);
  Evaluated out;
  out.value = hom.gamma * t * s + (1.0 - t) * fv;
  out.jac_x = hom.gamma * t * js + (1.0 - t) * jf;
  out.d_t = hom.gamma * s - fv;
  return out;
}

// Newton on H(., t) from x. Accepts only clearly contracting iterations.
bool correct(const Homotopy& hom, Vec& x, double t, const TrackOptions& opts) {
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 0; k < opts.corrector_iters; ++k) {
    const Evaluated ev = evaluate(hom, x, t);
    Eigen::PartialPivLU<CMatrix> lu(ev.jac_x);
    const Vec dx = lu.solve(ev.value);
    const double step = norm_inf(dx);
    if (!std::isfinite(step)) return false;
    if (k > 0 && step > 0.25 * prev && step > opts.corrector_tol * (1.0 + norm_inf(x))) return false;
    if (k == 0 && step > 0.1 * (1.0 + norm_inf(x))) return false;
    x -= dx;
    if (step <= opts.corrector_tol * (1.0 + norm_inf(x))) return true;
    prev = step;
  }
  return false;
}

std::array<std::int64_t, 2> round_key(const Complex& z) {
  return {std::llround(z.real() * 1e8), std::llround(z.imag() * 1e8)};
}

bool key_less(const CVec& a, const CVec& b) {
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    const auto ka = round_key(a[i]);
    const auto kb = round_key(b[i]);
    if (ka != kb) return ka < kb;
  }
  return a.size() < b.size();
}

}  // namespace

const char* to_string(PathStatus status) noexcept {
  switch (status) {
    case PathStatus::Converged: return "converged";
    case PathStatus::AtInfinity: return "at_infinity";
    case PathStatus::Failed: return "failed";
  }
  return "unknown";
}

StartSystem start_system(std::span<const int> degrees, std::uint64_t seed) {
  for (int d : degrees) {
    if (d < 1) throw Error(ErrorCode::InvalidArgument, "start system degrees must be >= 1");
  }
  StartSystem ss;
  ss.degrees.assign(degrees.begin(), degrees.end());
  std::mt19937_64 rng(seed ^ 0x5bd1e995u);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  for (std::size_t j = 0; j < degrees.size(); ++j) ss.constants.push_back(std::polar(1.0, phase(rng)));

  // Roots of x^d = r as r^(1/d) times the d-th roots of unity.
  std::vector<CVec> per_coord(degrees.size());
  for (std::size_t j = 0; j < degrees.size(); ++j) {
    const int d = degrees[j];
    const double base = std::arg(ss.constants[j]) / d;
    const double radius = std::pow(std::abs(ss.constants[j]), 1.0 / d);
    for (int k = 0; k < d; ++k) {
      per_coord[j].push_back(std::polar(radius, base + 2.0 * std::numbers::pi * k / d));
    }
  }

  std::size_t total = 1;
  for (int d : degrees) total *= static_cast<std::size_t>(d);
  ss.points.reserve(total);
  std::vector<int> idx(degrees.size(), 0);
  for (std::size_t p = 0; p < total; ++p) {
    CVec point(degrees.size());
    for (std::size_t j = 0; j < degrees.size(); ++j) point[j] = per_coord[j][static_cast<std::size_t>(idx[j])];
    ss.points.push_back(std::move(point));
    for (std::size_t j = degrees.size(); j-- > 0;) {
      if (++idx[j] < degrees[j]) break;
      idx[j] = 0;
    }
  }
  return ss;
}

Complex draw_gamma(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  double theta = phase(rng);
  while (std::abs(std::sin(theta)) < 1e-3) theta = phase(rng);
  return std::polar(1.0, theta);
}

Homotopy make_homotopy(std::size_t n, ResidualSystem sys, std::uint64_t seed) {
  Homotopy hom;
  hom.system = sys;
  hom.start = start_system(system_degrees(n, sys), seed);
  hom.gamma = draw_gamma(seed);
  return hom;
}

PathResult track_path(std::span<const Complex> start, const Homotopy& hom, const TrackOptions& opts) {
  if (std::abs(std::abs(hom.gamma) - 1.0) > 1e-12 ||
      (std::abs(hom.gamma.imag()) < 1e-12 && hom.gamma.real() > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "gamma must lie on the unit circle and not be real positive");
  }
  if (start.size() != hom.start.degrees.size()) {
    throw Error(ErrorCode::InvalidArgument, "start point length does not match the system");
  }

  PathResult out;
  out.start.assign(start.begin(), start.end());
  Vec x = to_vec(start);
  double t = 1.0;
  double h = opts.initial_step;
  out.min_step = h;
  int successes = 0;
  bool reached_end = false;

  while (out.steps < opts.max_steps) {
    if (t <= 0.0) {
      reached_end = true;
      break;
    }
    h = std::min(h, t);
    const Evaluated ev = evaluate(hom, x, t);
    Eigen::PartialPivLU<CMatrix> lu(ev.jac_x);
    const Vec dxdt = -lu.solve(ev.d_t);
    const double t_next = (h >= t) ? 0.0 : t - h;
    Vec x_next = x - (t - t_next) * dxdt;

    if (norm_inf(dxdt) < std::numeric_limits<double>::infinity() && correct(hom, x_next, t_next, opts)) {
      x = std::move(x_next);
      t = t_next;
      ++out.steps;
      if (norm_inf(x) > opts.escape_norm) {
        out.status = PathStatus::AtInfinity;
        out.endpoint = to_cvec(x);
        return out;
      }
      if (++successes >= 3) {
        h = std::min(2.0 * h, opts.max_step);
        successes = 0;
      }
      continue;
    }

    successes = 0;
    h *= 0.5;
    out.min_step = std::min(out.min_step, h);
    if (h < opts.step_floor) {
      if (t < opts.endgame_t) {
        reached_end = true;
        break;
      }
      out.status = PathStatus::Failed;
      out.endpoint = to_cvec(x);
      return out;
    }
  }

  out.endpoint = to_cvec(x);
  if (!reached_end) {
    out.status = PathStatus::Failed;
    return out;
  }

  try {
    FixedPointRecord rec = newton_polish(out.endpoint, hom.system, opts.polish_tol);
    out.endpoint = std::move(rec.point);
    out.polished = true;
  } catch (const Error&) {
    // Singular endpoints keep the tracked value; clustering handles them.
  }
  out.residual = residual_norm(out.endpoint, hom.system);
  out.status = (out.residual <= 1e-8 && is_finite(out.endpoint)) ? PathStatus::Converged : PathStatus::Failed;
  return out;
}

std::size_t SolutionSet::multiplicity_total() const {
  std::size_t total = 0;
  for (const auto& r : records) total += r.cluster_size;
  return total;
}

std::vector<std::vector<std::size_t>> cluster_points(const std::vector<CVec>& points, double radius) {
  std::vector<std::size_t> order(points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return key_less(points[a], points[b]); });

  std::vector<bool> taken(points.size(), false);
  std::vector<std::vector<std::size_t>> clusters;
  for (std::size_t seed_pos = 0; seed_pos < order.size(); ++seed_pos) {
    const std::size_t root = order[seed_pos];
    if (taken[root]) continue;
    taken[root] = true;
    std::vector<std::size_t> members{root};
    for (std::size_t m = 0; m < members.size(); ++m) {
      for (std::size_t cand : order) {
        if (!taken[cand] && max_abs_diff(points[members[m]], points[cand]) <= radius) {
          taken[cand] = true;
          members.push_back(cand);
        }
      }
    }
    std::sort(members.begin(), members.end(),
              [&](std::size_t a, std::size_t b) { return key_less(points[a], points[b]); });
    clusters.push_back(std::move(members));
  }
  return clusters;
}

std::optional<CVec> refine_singular(std::span<const Complex> x0, ResidualSystem sys) {
  const auto n = static_cast<Eigen::Index>(x0.size());
  Vec x = to_vec(x0);
  Eigen::JacobiSVD<CMatrix> svd(jacobian(x0, sys), Eigen::ComputeFullV);
  Vec v = svd.matrixV().col(n - 1);
  const Vec r = v.conjugate();

  for (int iter = 0; iter < 30; ++iter) {
    const CMatrix jac = jacobian(as_span(x), sys);
    const std::vector<CMatrix> hess = second_derivatives(as_span(x), sys);
    Vec g(2 * n + 1);
    g.head(n) = to_vec(residual(as_span(x), sys));
    g.segment(n, n) = jac * v;
    g(2 * n) = r.dot(v.conjugate()) - 1.0;

    CMatrix dg = CMatrix::Zero(2 * n + 1, 2 * n);
    dg.topLeftCorner(n, n) = jac;
    for (Eigen::Index j = 0; j < n; ++j) {
      dg.block(n + j, 0, 1, n) = (hess[static_cast<std::size_t>(j)] * v).transpose();
    }
    dg.block(n, n, n, n) = jac;
    dg.block(2 * n, n, 1, n) = r.transpose();

    const Vec step = dg.colPivHouseholderQr().solve(g);
    if (!std::isfinite(norm_inf(step))) return std::nullopt;
    x -= step.head(n);
    v -= step.tail(n);
    if (norm_inf(step.head(n)) <= 8.0 * kEps * (1.0 + norm_inf(x))) {
      if (residual_norm(as_span(x), sys) <= kPolishTolerance) return to_cvec(x);
      return std::nullopt;
    }
  }
  return std::nullopt;
}

namespace {

std::vector<PathResult> track_all(const Homotopy& hom, const std::vector<CVec>& starts,
                                  const std::vector<std::size_t>& which, const TrackOptions& opts,
                                  unsigned threads) {
  std::vector<PathResult> results(which.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    for (std::size_t i = next++; i < which.size(); i = next++) {
      try {
        results[i] = track_path(starts[which[i]], hom, opts);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const unsigned count = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(which.size())));
  if (count == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < count; ++k) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace

SolutionSet solve_system(std::size_t n, ResidualSystem sys, std::uint64_t seed, const SolveOptions& opts) {
  if (n < 1 || n > 8) throw Error(ErrorCode::InvalidArgument, "solve_system supports 1 <= N <= 8");
  const Homotopy hom = make_homotopy(n, sys, seed);
  const unsigned threads = opts.threads != 0 ? opts.threads : std::max(1u, std::thread::hardware_concurrency());

  SolutionSet set;
  set.n = n;
  set.system = sys;
  set.seed = seed;
  set.gamma = hom.gamma;
  set.path_count = hom.start.points.size();

  std::vector<std::size_t> all(set.path_count);
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  set.paths = track_all(hom, hom.start.points, all, opts.track, threads);

  std::vector<std::size_t> retry;
  for (std::size_t i = 0; i < set.paths.size(); ++i) {
    if (set.paths[i].status != PathStatus::Converged) retry.push_back(i);
  }
  if (!retry.empty()) {
    TrackOptions cautious = opts.track;
    cautious.initial_step *= 0.5;
    cautious.max_step *= 0.5;
    const auto redo = track_all(hom, hom.start.points, retry, cautious, threads);
    for (std::size_t k = 0; k < retry.size(); ++k) set.paths[retry[k]] = redo[k];
    set.retried_count = retry.size();
  }

  std::vector<CVec> endpoints;
  for (const PathResult& p : set.paths) {
    switch (p.status) {
      case PathStatus::Converged: endpoints.push_back(p.endpoint); break;
      case PathStatus::AtInfinity: ++set.at_infinity_count; break;
      case PathStatus::Failed: ++set.failed_count; break;
    }
  }
  if (set.failed_count > 0) {
    throw Error(ErrorCode::TrackingFailed,
                std::to_string(set.failed_count) + " of " + std::to_string(set.path_count) + " paths failed for " +
                    to_string(sys) + " N=" + std::to_string(n) + " after retry");
  }

  for (const auto& members : cluster_points(endpoints, opts.cluster_radius)) {
    if (members.size() == 1) {
      set.records.push_back(make_record(endpoints[members.front()], sys));
      continue;
    }
    CVec centroid(n, Complex{});
    for (std::size_t m : members) {
      for (std::size_t i = 0; i < n; ++i) centroid[i] += endpoints[m][i];
    }
    for (auto& z : centroid) z /= static_cast<double>(members.size());
    CVec point = centroid;
    if (auto refined = refine_singular(centroid, sys);
        refined && max_abs_diff(*refined, centroid) <= opts.cluster_radius) {
      point = std::move(*refined);
    }
    set.records.push_back(make_record(std::move(point), sys, members.size()));
  }
  std::stable_sort(set.records.begin(), set.records.end(),
                   [](const FixedPointRecord& a, const FixedPointRecord& b) { return key_less(a.point, b.point); });
  return set;
}

std::size_t tilde_intersection(const SolutionSet& tilde) {
  return static_cast<std::size_t>(std::count_if(tilde.records.begin(), tilde.records.end(), [](const auto& r) {
    return std::abs(r.point.back()) < kZeroThreshold;
  }));
}

UlamCounts count_ulam(std::size_t n, std::uint64_t seed, const SolveOptions& opts) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "count_ulam needs N >= 2");
  UlamCounts counts;
  counts.n = n;
  const SolutionSet tilde = solve_system(n, ResidualSystem::Tilde, seed, opts);
  counts.v_tilde = tilde.records.size();
  counts.intersection = tilde_intersection(tilde);
  counts.at_infinity = tilde.at_infinity_count;

  if (n == 2) {
    counts.v_zero = 1;
  } else {
    const UlamCounts previous = count_ulam(n - 1, seed, opts);
    counts.v_zero = previous.u_n;
    counts.at_infinity += previous.at_infinity;
  }
  counts.u_n = counts.v_zero + counts.v_tilde - counts.intersection;

  const SolutionSet full = solve_system(n, ResidualSystem::Full, seed, opts);
  counts.full_records = full.records.size();
  counts.full_paths = full.path_count;
  counts.at_infinity += full.at_infinity_count;
  return counts;
}

bool nontrivial_existence_check(std::size_t n, std::uint64_t seed, const SolveOptions& opts) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "nontrivial_existence_check needs N >= 2");
  auto has_all_nonzero = [](const SolutionSet& set) {
    return std::any_of(set.records.begin(), set.records.end(), [](const FixedPointRecord& r) {
      return std::all_of(r.point.begin(), r.point.end(), [](const Complex& z) { return std::abs(z) > kZeroThreshold; });
    });
  };
  if (has_all_nonzero(solve_system(n, ResidualSystem::Tilde, seed, opts))) return true;
  return n >= 3 && has_all_nonzero(solve_system(n - 1, ResidualSystem::Tilde, seed, opts));
}

}  // namespace ulam
