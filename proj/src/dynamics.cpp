#include "ulam/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "ulam/error.hpp"

namespace ulam {

namespace {

void require_same_length(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size() || a.empty()) {
    throw Error(ErrorCode::InvalidArgument, "flow state and gamma must have the same nonzero length");
  }
}

CVec axpy(std::span<const Complex> x, double a, std::span<const Complex> y) {
  CVec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + a * y[i];
  return out;
}

}  // namespace

CVec flow_rhs(std::span<const Complex> zeta, std::span<const Complex> gamma) {
  require_same_length(zeta, gamma);
  require_finite(zeta, "flow state");
  if (!pairwise_distinct(zeta, kCollisionGap)) {
    throw Error(ErrorCode::Collision, "flow state has zeros closer than 1e-10");
  }
  const MonicPoly p{CVec(gamma.begin(), gamma.end())};
  CVec out(zeta.size());
  for (std::size_t n = 0; n < zeta.size(); ++n) {
    Complex prod = 1.0;
    for (std::size_t l = 0; l < zeta.size(); ++l) {
      if (l != n) prod *= zeta[n] - zeta[l];
    }
    out[n] = -eval(p, zeta[n]) / prod;
  }
  return out;
}

CMatrix flow_jacobian(std::span<const Complex> zeta, std::span<const Complex> gamma) {
  require_same_length(zeta, gamma);
  if (!pairwise_distinct(zeta, kCollisionGap)) {
    throw Error(ErrorCode::Collision, "flow state has zeros closer than 1e-10");
  }
  const MonicPoly p{CVec(gamma.begin(), gamma.end())};
  const CVec dp = derivative(p);
  const auto n = static_cast<Eigen::Index>(zeta.size());
  CMatrix jac(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Complex z = zeta[static_cast<std::size_t>(i)];
    Complex prod = 1.0;
    Complex inv_sum{};
    for (Eigen::Index l = 0; l < n; ++l) {
      if (l == i) continue;
      const Complex diff = z - zeta[static_cast<std::size_t>(l)];
      prod *= diff;
      inv_sum += 1.0 / diff;
    }
    const Complex value = eval(p, z) / prod;
    for (Eigen::Index k = 0; k < n; ++k) {
      jac(i, k) = (k == i) ? -eval_dense(dp, z) / prod + value * inv_sum
                           : -value / (z - zeta[static_cast<std::size_t>(k)]);
    }
  }
  return jac;
}

CMatrix flow_jacobian_fd(std::span<const Complex> zeta, std::span<const Complex> gamma, double h) {
  const auto n = static_cast<Eigen::Index>(zeta.size());
  CMatrix jac(n, n);
  CVec plus(zeta.begin(), zeta.end());
  CVec minus(zeta.begin(), zeta.end());
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    plus[ku] += h;
    minus[ku] -= h;
    const CVec fp = flow_rhs(plus, gamma);
    const CVec fm = flow_rhs(minus, gamma);
    for (Eigen::Index i = 0; i < n; ++i) {
      jac(i, k) = (fp[static_cast<std::size_t>(i)] - fm[static_cast<std::size_t>(i)]) / (2.0 * h);
    }
    plus[ku] = zeta[ku];
    minus[ku] = zeta[ku];
  }
  return jac;
}

bool is_admissible(std::span<const Complex> gamma) {
  return !gamma.empty() && is_finite(gamma) && pairwise_distinct(gamma, kZeroThreshold) &&
         residual_norm(gamma, ResidualSystem::Full) <= 1e-9;
}

void require_admissible(std::span<const Complex> gamma) {
  if (!is_admissible(gamma)) {
    throw Error(ErrorCode::Inadmissible,
                "equilibrium must be an Ulam fixed point with pairwise-distinct entries");
  }
}

FlowTrajectory integrate(std::span<const Complex> zeta0, std::span<const Complex> gamma, double horizon,
                         double dt, std::size_t stride) {
  require_same_length(zeta0, gamma);
  require_admissible(gamma);
  if (!(horizon >= 0.0) || !(dt > 0.0) || stride == 0) {
    throw Error(ErrorCode::InvalidArgument, "integrate needs T >= 0, dt > 0 and stride >= 1");
  }
  if (!pairwise_distinct(zeta0, kCollisionGap)) {
    throw Error(ErrorCode::InvalidArgument, "initial zeros must be pairwise distinct");
  }

  FlowTrajectory traj;
  traj.gamma.assign(gamma.begin(), gamma.end());
  CVec state(zeta0.begin(), zeta0.end());
  traj.times.push_back(0.0);
  traj.states.push_back(state);

  const auto steps = static_cast<std::size_t>(std::llround(std::ceil(horizon / dt - 1e-9)));
  const double h = steps == 0 ? 0.0 : horizon / static_cast<double>(steps);
  for (std::size_t s = 1; s <= steps; ++s) {
    try {
      const CVec k1 = flow_rhs(state, gamma);
      const CVec k2 = flow_rhs(axpy(state, 0.5 * h, k1), gamma);
      const CVec k3 = flow_rhs(axpy(state, 0.5 * h, k2), gamma);
      const CVec k4 = flow_rhs(axpy(state, h, k3), gamma);
      for (std::size_t i = 0; i < state.size(); ++i) {
        state[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      }
      if (!pairwise_distinct(state, kCollisionGap)) throw Error(ErrorCode::Collision, "zeros collided");
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Collision) throw;
      traj.collision_flag = true;
      return traj;
    }
    if (s % stride == 0 || s == steps) {
      traj.times.push_back(static_cast<double>(s) * h);
      traj.states.push_back(state);
    }
  }
  return traj;
}

CVec coefficient_flow(std::span<const Complex> c0, std::span<const Complex> gamma, double t) {
  require_same_length(c0, gamma);
  const double decay = std::exp(-t);
  CVec c(c0.size());
  for (std::size_t m = 0; m < c.size(); ++m) c[m] = gamma[m] + (c0[m] - gamma[m]) * decay;
  return c;
}

OracleState match_labels(std::span<const Complex> previous, std::span<const Complex> current) {
  require_same_length(previous, current);
  const std::size_t n = previous.size();
  struct Candidate {
    double dist;
    std::size_t prev;
    std::size_t cur;
  };
  std::vector<Candidate> pairs;
  pairs.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) pairs.push_back({std::abs(previous[i] - current[j]), i, j});
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const Candidate& a, const Candidate& b) { return a.dist < b.dist; });

  OracleState out;
  out.zeros.assign(n, Complex{});
  std::vector<bool> prev_used(n, false);
  std::vector<bool> cur_used(n, false);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const Candidate& c = pairs[k];
    if (prev_used[c.prev] || cur_used[c.cur]) continue;
    // A competing free pair at essentially the same distance makes the
    // assignment a coin flip; index order decides it.
    for (std::size_t m = k + 1; m < pairs.size() && pairs[m].dist - c.dist <= 1e-12; ++m) {
      const Candidate& o = pairs[m];
      if ((o.prev == c.prev && !cur_used[o.cur]) || (o.cur == c.cur && !prev_used[o.prev])) {
        out.pairing_ambiguous = true;
      }
    }
    prev_used[c.prev] = true;
    cur_used[c.cur] = true;
    out.zeros[c.prev] = current[c.cur];
  }
  return out;
}

OracleState oracle(std::span<const Complex> zeta0, std::span<const Complex> gamma, double t, double label_step) {
  require_same_length(zeta0, gamma);
  require_admissible(gamma);
  if (!(t >= 0.0) || !(label_step > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "oracle needs t >= 0 and a positive label step");
  }
  if (!pairwise_distinct(zeta0, kCollisionGap)) {
    throw Error(ErrorCode::InvalidArgument, "initial zeros must be pairwise distinct");
  }
  const CVec c0 = poly_from_roots(zeta0).coeffs();
  OracleState state;
  state.zeros.assign(zeta0.begin(), zeta0.end());
  const auto pieces = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(t / label_step)));
  for (std::size_t k = 1; k <= pieces; ++k) {
    const double tk = t * static_cast<double>(k) / static_cast<double>(pieces);
    const CVec roots = all_roots(MonicPoly(coefficient_flow(c0, gamma, tk)));
    const bool was_ambiguous = state.pairing_ambiguous;
    state = match_labels(state.zeros, roots);
    state.pairing_ambiguous = state.pairing_ambiguous || was_ambiguous;
  }
  return state;
}

EquilibriumJacobian jacobian_at_permuted_equilibrium(std::span<const Complex> gamma,
                                                     std::span<const std::size_t> permutation) {
  require_admissible(gamma);
  if (permutation.size() != gamma.size()) {
    throw Error(ErrorCode::InvalidArgument, "permutation length must equal N");
  }
  CVec zeta(gamma.size());
  std::vector<bool> seen(gamma.size(), false);
  for (std::size_t i = 0; i < permutation.size(); ++i) {
    if (permutation[i] >= gamma.size() || seen[permutation[i]]) {
      throw Error(ErrorCode::InvalidArgument, "not a permutation");
    }
    seen[permutation[i]] = true;
    zeta[i] = gamma[permutation[i]];
  }
  EquilibriumJacobian out;
  out.jacobian = flow_jacobian(zeta, gamma);
  const auto n = out.jacobian.rows();
  out.deviation = (out.jacobian + CMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
  return out;
}

EquilibriumJacobian jacobian_at_equilibrium(std::span<const Complex> gamma) {
  std::vector<std::size_t> identity(gamma.size());
  for (std::size_t i = 0; i < identity.size(); ++i) identity[i] = i;
  return jacobian_at_permuted_equilibrium(gamma, identity);
}

namespace {

CVec perturb_with(std::span<const Complex> gamma, double radius, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  CVec out(gamma.begin(), gamma.end());
  for (Complex& z : out) {
    z += std::polar(radius * std::sqrt(unit(rng)), 2.0 * std::numbers::pi * unit(rng));
  }
  return out;
}

}  // namespace

CVec perturb(std::span<const Complex> gamma, double radius, std::uint64_t seed) {
  if (!(radius >= 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be non-negative");
  std::mt19937_64 rng(seed);
  return perturb_with(gamma, radius, rng);
}

std::size_t StabilityReport::converged_count() const {
  return static_cast<std::size_t>(
      std::count_if(trials.begin(), trials.end(), [](const StabilityTrial& t) { return t.converged; }));
}

double StabilityReport::converged_fraction() const {
  return trials.empty() ? 1.0 : static_cast<double>(converged_count()) / static_cast<double>(trials.size());
}

StabilityReport stability_probe(std::span<const Complex> gamma, double radius, std::size_t trials,
                                std::uint64_t seed, double horizon, double dt) {
  require_admissible(gamma);
  if (!(radius >= 0.0)) throw Error(ErrorCode::InvalidArgument, "radius must be non-negative");
  StabilityReport rep;
  rep.gamma.assign(gamma.begin(), gamma.end());
  rep.radius = radius;
  rep.horizon = horizon;
  rep.dt = dt;

  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k < trials; ++k) {
    StabilityTrial trial;
    trial.start = perturb_with(gamma, radius, rng);
    if (!pairwise_distinct(trial.start, kCollisionGap)) {
      trial.collided = true;
      rep.trials.push_back(std::move(trial));
      continue;
    }
    const FlowTrajectory traj = integrate(trial.start, gamma, horizon, dt, std::numeric_limits<std::size_t>::max());
    trial.collided = traj.collision_flag;
    trial.final_state = traj.states.back();
    trial.final_deviation = max_abs_diff(trial.final_state, gamma);
    trial.converged = !trial.collided && trial.final_deviation <= rep.tol;
    rep.trials.push_back(std::move(trial));
  }
  return rep;
}

}  // namespace ulam
