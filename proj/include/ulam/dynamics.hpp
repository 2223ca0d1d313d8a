#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ulam/poly_core.hpp"
#include "ulam/ulam_map.hpp"

namespace ulam {

// Minimum pairwise gap between zeros before the flow is treated as singular.
inline constexpr double kCollisionGap = 1e-10;

// zeta_n' = -p(zeta_n) / prod_{l != n} (zeta_n - zeta_l), with p the monic
// polynomial whose coefficients are gamma. Throws Collision when two entries
// of zeta are closer than kCollisionGap.
CVec flow_rhs(std::span<const Complex> zeta, std::span<const Complex> gamma);

// Analytic Jacobian of flow_rhs with respect to zeta.
CMatrix flow_jacobian(std::span<const Complex> zeta, std::span<const Complex> gamma);

// Central differences of flow_rhs along each coordinate.
CMatrix flow_jacobian_fd(std::span<const Complex> zeta, std::span<const Complex> gamma, double h = 1e-6);

// Throws Inadmissible unless gamma has pairwise-distinct entries and is a
// fixed point of the Ulam map to within 1e-9.
void require_admissible(std::span<const Complex> gamma);
bool is_admissible(std::span<const Complex> gamma);

struct FlowTrajectory {
  std::vector<double> times;
  std::vector<CVec> states;
  CVec gamma;
  bool collision_flag = false;
};

// Classical fixed-step RK4 from t = 0 to T. Every `stride`-th state is
// stored, plus the last one. Stops early with collision_flag set if two
// zeros meet.
FlowTrajectory integrate(std::span<const Complex> zeta0, std::span<const Complex> gamma, double horizon,
                         double dt, std::size_t stride = 1);

// c_m(t) = gamma_m + (c_m(0) - gamma_m) e^(-t).
CVec coefficient_flow(std::span<const Complex> c0, std::span<const Complex> gamma, double t);

struct OracleState {
  CVec zeros;
  bool pairing_ambiguous = false;
};

// Zeros of the closed-form coefficient flow at time t, labelled by greedy
// nearest-neighbour matching along a grid of intermediate times so they line
// up with zeta0.
OracleState oracle(std::span<const Complex> zeta0, std::span<const Complex> gamma, double t,
                   double label_step = 0.01);

// Pairs each previous zero with a current one, closest pairs first.
OracleState match_labels(std::span<const Complex> previous, std::span<const Complex> current);

struct EquilibriumJacobian {
  CMatrix jacobian;
  // max |J - (-I)| entrywise.
  double deviation = 0.0;
};

EquilibriumJacobian jacobian_at_equilibrium(std::span<const Complex> gamma);

// Same check at a permuted equilibrium gamma_sigma of the flow defined by gamma.
EquilibriumJacobian jacobian_at_permuted_equilibrium(std::span<const Complex> gamma,
                                                     std::span<const std::size_t> permutation);

// gamma plus an independent uniform draw from the disc of the given radius
// for each entry.
CVec perturb(std::span<const Complex> gamma, double radius, std::uint64_t seed);

struct StabilityTrial {
  CVec start;
  CVec final_state;
  double final_deviation = 0.0;
  bool converged = false;
  bool collided = false;
};

struct StabilityReport {
  CVec gamma;
  double radius = 0.0;
  double horizon = 0.0;
  double dt = 0.0;
  double tol = 1e-6;
  std::vector<StabilityTrial> trials;

  std::size_t converged_count() const;
  double converged_fraction() const;
};

// Integrates from random perturbations of entrywise modulus <= radius and
// checks convergence to gamma without relabelling.
StabilityReport stability_probe(std::span<const Complex> gamma, double radius, std::size_t trials,
                                std::uint64_t seed, double horizon = 25.0, double dt = 1e-3);

}  // namespace ulam
