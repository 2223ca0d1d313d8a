#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "json.hpp"
#include "ulam/dynamics.hpp"
#include "ulam/homotopy.hpp"
#include "ulam/hypergeometric.hpp"

namespace ulam {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// Complex numbers serialize as [re, im].
Json to_json(const Complex& z);
Json to_json(const CVec& v);
Json to_json(const FixedPointRecord& rec);
Json to_json(const SolutionSet& set);
Json to_json(const UlamCounts& counts);
Json to_json(const RigidityReport& rep);
Json to_json(const FlowTrajectory& traj);
Json to_json(const StabilityReport& rep);

// Top-level document: {"schema": 1, "kind": kind, ...body}.
Json document(const std::string& kind, Json body);

// Deterministic UTF-8 text: keys sorted, two-space indent, trailing newline.
std::string dump(const Json& doc);

// Header t,re_1,im_1,...,re_N,im_N then one row per stored state.
std::string to_csv(const FlowTrajectory& traj);

// No point with every entry real and nonzero (threshold 1e-8).
bool stein_property(const SolutionSet& set);

// For a degree-3 fixed point with c_3 != 0 other than (1,-1,-1): max of
// |2c1^3 + 2c1^2 - 1|, |c2 + 1/c1|, |c3 - 1/(c1 + 1)|.
double u3_structure_defect(std::span<const Complex> point);
bool is_u3_exceptional(std::span<const Complex> point);

struct CheckResult {
  Json json;
  bool passed = false;
};

// Identity, equivalent-system, padding, zero-tail and idempotence checks over
// every FULL record of degree n, plus the Stein property for n = 5 and the
// degree-3 structure for n = 3.
CheckResult run_verify(std::size_t n, std::uint64_t seed, const SolveOptions& opts = {});

CheckResult run_eigencheck(GridPreset preset, double tol = 1e-10);

struct SummaryOptions {
  bool tilde = false;
  bool intersections = false;
  std::size_t max_n = 5;
};

struct Summary {
  Json json;
  std::string markdown;
  bool passed = false;
};

// Counts for N = 1..max_n from one FULL and one TILDE solve per degree.
Summary run_summary(std::uint64_t seed, const SolveOptions& opts = {}, const SummaryOptions& summary = {});

}  // namespace ulam
