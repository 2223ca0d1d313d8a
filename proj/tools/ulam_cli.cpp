// Command-line driver over the C interface of libulam.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ulam/ulam.h"

namespace {

// Exit codes shared by every subcommand.
constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitTrackingFailed = 2;
constexpr int kExitInadmissible = 3;

struct CString {
  char* ptr = nullptr;
  ~CString() { ulam_string_free(ptr); }
  std::string str() const { return ptr ? std::string(ptr) : std::string(); }
};

struct SolutionSetHandle {
  ulam_solution_set* ptr = nullptr;
  ~SolutionSetHandle() { ulam_solution_set_free(ptr); }
};

struct TrajectoryHandle {
  ulam_trajectory* ptr = nullptr;
  ~TrajectoryHandle() { ulam_trajectory_free(ptr); }
};

struct CommonFlags {
  std::size_t n = 2;
  std::uint64_t seed = 1;
  double tol_residual = 1e-12;
  double tol_cluster = 1e-6;
  std::string format = "json";
  std::string out;
};

int exit_code_for(ulam_status status) {
  switch (status) {
    case ULAM_OK: return kExitOk;
    case ULAM_ERR_TRACKING_FAILED: return kExitTrackingFailed;
    case ULAM_ERR_INADMISSIBLE: return kExitInadmissible;
    default: return kExitCheckFailed;
  }
}

int report_error(ulam_status status) {
  std::cerr << "ulam: " << ulam_status_string(status) << ": " << ulam_last_error() << "\n";
  return exit_code_for(status);
}

ulam_solve_options solve_options(const CommonFlags& f) {
  ulam_solve_options opts;
  ulam_solve_options_init(&opts);
  opts.tol_residual = f.tol_residual;
  opts.tol_cluster = f.tol_cluster;
  return opts;
}

// Relative paths land under $ULAM_OUT_DIR when it is set.
std::filesystem::path resolve_output(const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_relative()) {
    if (const char* dir = std::getenv("ULAM_OUT_DIR"); dir != nullptr && *dir != '\0') {
      return std::filesystem::path(dir) / p;
    }
  }
  return p;
}

bool emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return true;
  }
  const auto path = resolve_output(out);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream file(path, std::ios::binary);
  file << text;
  if (!file) {
    std::cerr << "ulam: cannot write " << path << "\n";
    return false;
  }
  return true;
}

void add_common(CLI::App* cmd, CommonFlags& f, bool with_n) {
  if (with_n) cmd->add_option("--n", f.n, "Polynomial degree N")->check(CLI::Range(1, 8));
  cmd->add_option("--seed", f.seed, "Seed for the homotopy constants and probes");
  cmd->add_option("--tol-residual", f.tol_residual, "Newton polish tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--tol-cluster", f.tol_cluster, "Endpoint clustering radius")->check(CLI::PositiveNumber);
  cmd->add_option("--out", f.out, "Output file (stdout when omitted)");
}

int cmd_enumerate(const CommonFlags& f) {
  const ulam_solve_options opts = solve_options(f);
  SolutionSetHandle set;
  if (auto st = ulam_solve(f.n, ULAM_SYSTEM_FULL, f.seed, &opts, &set.ptr); st != ULAM_OK) return report_error(st);
  CString json;
  if (auto st = ulam_solution_set_to_json(set.ptr, &json.ptr); st != ULAM_OK) return report_error(st);
  return emit(json.str(), f.out) ? kExitOk : kExitCheckFailed;
}

int cmd_count(const CommonFlags& f) {
  const ulam_solve_options opts = solve_options(f);
  ulam_counts counts{};
  if (auto st = ulam_count(f.n, f.seed, &opts, &counts); st != ULAM_OK) return report_error(st);
  CString json;
  if (auto st = ulam_counts_to_json(&counts, &json.ptr); st != ULAM_OK) return report_error(st);
  std::cerr << "N=" << counts.n << ": |U_N| = " << counts.v_zero << " + " << counts.v_tilde << " - "
            << counts.intersection << " = " << counts.u_n << "; direct enumeration " << counts.full_records
            << (counts.consistent ? " (match)" : " (MISMATCH)") << "\n";
  if (!emit(json.str(), f.out)) return kExitCheckFailed;
  return counts.consistent && counts.at_infinity == 0 ? kExitOk : kExitCheckFailed;
}

int cmd_verify(const CommonFlags& f) {
  const ulam_solve_options opts = solve_options(f);
  int passed = 0;
  CString json;
  if (auto st = ulam_verify(f.n, f.seed, &opts, &passed, &json.ptr); st != ULAM_OK) return report_error(st);
  if (!emit(json.str(), f.out)) return kExitCheckFailed;
  return passed ? kExitOk : kExitCheckFailed;
}

int cmd_eigencheck(const std::string& grid, double tol, const std::string& out) {
  const ulam_grid preset = grid == "wide" ? ULAM_GRID_WIDE : grid == "fine" ? ULAM_GRID_FINE : ULAM_GRID_DEFAULT;
  int passed = 0;
  CString json;
  if (auto st = ulam_eigencheck(preset, tol, &passed, &json.ptr); st != ULAM_OK) return report_error(st);
  if (!emit(json.str(), out)) return kExitCheckFailed;
  if (!passed) std::cerr << "ulam: found a zero-residual parameter away from beta = delta = 0\n";
  return passed ? kExitOk : kExitCheckFailed;
}

struct FlowFlags {
  std::size_t point = 1;
  double radius = 0.05;
  std::size_t trials = 20;
  double horizon = 25.0;
  double dt = 1e-3;
  std::size_t stride = 10;
  std::string report;
};

int cmd_flow(const CommonFlags& f, const FlowFlags& flow) {
  const ulam_solve_options opts = solve_options(f);
  SolutionSetHandle set;
  if (auto st = ulam_solve(f.n, ULAM_SYSTEM_FULL, f.seed, &opts, &set.ptr); st != ULAM_OK) return report_error(st);
  if (flow.point >= ulam_solution_set_size(set.ptr)) {
    std::cerr << "ulam: point index " << flow.point << " out of range (" << ulam_solution_set_size(set.ptr)
              << " records)\n";
    return kExitInadmissible;
  }
  std::vector<ulam_complex> gamma(f.n);
  if (auto st = ulam_solution_set_record(set.ptr, flow.point, gamma.data(), nullptr, nullptr); st != ULAM_OK) {
    return report_error(st);
  }

  std::vector<ulam_complex> start(f.n);
  if (auto st = ulam_perturb(gamma.data(), f.n, flow.radius, f.seed, start.data()); st != ULAM_OK) {
    return report_error(st);
  }
  TrajectoryHandle traj;
  if (auto st = ulam_flow_integrate(start.data(), gamma.data(), f.n, flow.horizon, flow.dt, flow.stride, &traj.ptr);
      st != ULAM_OK) {
    return report_error(st);
  }
  CString trajectory_text;
  const ulam_status st = f.format == "json" ? ulam_trajectory_to_json(traj.ptr, &trajectory_text.ptr)
                                            : ulam_trajectory_to_csv(traj.ptr, &trajectory_text.ptr);
  if (st != ULAM_OK) return report_error(st);
  const std::string default_name = f.format == "json" ? "trajectory.json" : "trajectory.csv";
  if (!emit(trajectory_text.str(), f.out.empty() ? default_name : f.out)) return kExitCheckFailed;

  std::size_t converged = 0;
  CString report;
  if (auto s = ulam_stability_probe(gamma.data(), f.n, flow.radius, flow.trials, f.seed, flow.horizon, flow.dt,
                                    &converged, &report.ptr);
      s != ULAM_OK) {
    return report_error(s);
  }
  if (!emit(report.str(), flow.report)) return kExitCheckFailed;
  if (ulam_trajectory_collided(traj.ptr)) {
    std::cerr << "ulam: trajectory truncated at a collision\n";
    return kExitCheckFailed;
  }
  return converged == flow.trials ? kExitOk : kExitCheckFailed;
}

int cmd_report(const CommonFlags& f, bool tilde, bool intersections) {
  const ulam_solve_options opts = solve_options(f);
  const int flags = (tilde ? ULAM_REPORT_TILDE : 0) | (intersections ? ULAM_REPORT_INTERSECTIONS : 0);
  int passed = 0;
  CString json;
  CString markdown;
  if (auto st = ulam_report(f.seed, &opts, flags, &passed, &json.ptr, &markdown.ptr); st != ULAM_OK) {
    return report_error(st);
  }
  if (!emit(f.format == "markdown" ? markdown.str() : json.str(), f.out)) return kExitCheckFailed;
  return passed ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Enumerate and verify Ulam polynomials"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(ulam_version()));

  CommonFlags enumerate_flags;
  auto* enumerate = app.add_subcommand("enumerate", "Solve the fixed-point system and list every Ulam polynomial");
  add_common(enumerate, enumerate_flags, true);

  CommonFlags count_flags;
  auto* count = app.add_subcommand("count", "Count Ulam polynomials by inclusion-exclusion");
  add_common(count, count_flags, true);
  count->get_option("--n")->check(CLI::Range(2, 8));

  CommonFlags verify_flags;
  auto* verify = app.add_subcommand("verify", "Check identities, equivalent systems and padding");
  add_common(verify, verify_flags, true);

  std::string grid = "default";
  double eig_tol = 1e-10;
  std::string eig_out;
  auto* eigencheck = app.add_subcommand("eigencheck", "Search hypergeometric parameters for Ulam eigenpolynomials");
  eigencheck->add_option("--grid", grid, "Parameter grid preset")->check(CLI::IsMember({"default", "wide", "fine"}));
  eigencheck->add_option("--tol", eig_tol, "Zero-residual tolerance")->check(CLI::PositiveNumber);
  eigencheck->add_option("--out", eig_out, "Output file (stdout when omitted)");

  CommonFlags flow_common;
  flow_common.format = "csv";
  FlowFlags flow_flags;
  auto* flow = app.add_subcommand("flow", "Integrate the zero flow around an enumerated fixed point");
  add_common(flow, flow_common, true);
  flow->add_option("--format", flow_common.format, "Trajectory format")->check(CLI::IsMember({"csv", "json"}));
  flow->add_option("--point", flow_flags.point, "Index of the fixed point in the enumerate output");
  flow->add_option("--radius", flow_flags.radius, "Perturbation radius")->check(CLI::NonNegativeNumber);
  flow->add_option("--trials", flow_flags.trials, "Stability probe trials");
  flow->add_option("--T", flow_flags.horizon, "Integration horizon")->check(CLI::NonNegativeNumber);
  flow->add_option("--dt", flow_flags.dt, "Integration step")->check(CLI::PositiveNumber);
  flow->add_option("--stride", flow_flags.stride, "Store every k-th state")->check(CLI::PositiveNumber);
  flow->add_option("--report", flow_flags.report, "Stability report file (stdout when omitted)");

  CommonFlags report_flags;
  bool tilde = false;
  bool intersections = false;
  auto* report = app.add_subcommand("report", "Counts for N = 1..5 in one table");
  add_common(report, report_flags, false);
  report->add_option("--format", report_flags.format, "Output format")->check(CLI::IsMember({"json", "markdown"}));
  report->add_flag("--tilde", tilde, "Include |V(I~_N)|");
  report->add_flag("--intersections", intersections, "Include the intersection counts");

  CLI11_PARSE(app, argc, argv);

  if (*enumerate) return cmd_enumerate(enumerate_flags);
  if (*count) return cmd_count(count_flags);
  if (*verify) return cmd_verify(verify_flags);
  if (*eigencheck) return cmd_eigencheck(grid, eig_tol, eig_out);
  if (*flow) return cmd_flow(flow_common, flow_flags);
  if (*report) return cmd_report(report_flags, tilde, intersections);
  return kExitCheckFailed;
}
