#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "edg/integrator.hpp"
#include "edg/kernel.hpp"
#include "edg/state.hpp"

namespace edg {

struct OutputPaths {
  std::string moments_path;
  std::string states_path;
  std::string report_path;
  std::string convergence_path;
};

struct GelationOptions {
  // Negative bounds mean "derive from the analytic or threshold-estimated
  // gelation time" (window defaults to [0.1, 0.7] x T_gel).
  double window_lo = -1.0;
  double window_hi = -1.0;
};

struct ConvergeOptions {
  std::vector<std::size_t> N_list;
};

struct VerifyOptions {
  double conservation_max_drift = 0.0;  // 0: 10 x rel_tol
  std::optional<int> jensen_n;          // jensen check on every recorded state
  double jensen_beta = 3.0;
  std::optional<double> upper_bound_lambda;
  std::optional<double> blowup_alpha;
  double blowup_C1 = 0.0;
  double blowup_t_max = -1.0;           // restrict the lower-bound check to t <= t_max
};

struct SimulationConfig {
  KernelSpec kernel;
  InitSpec init;
  std::size_t N = 0;
  IntegratorConfig integrator;
  std::vector<double> tracked_moment_orders;  // extras on top of 0,1,2
  OutputPaths outputs;
  GelationOptions gelation;
  ConvergeOptions converge;
  VerifyOptions verify;
};

// Parses the JSON config document. Unknown keys are a hard error; family-
// irrelevant kernel parameters are accepted and ignored. base_dir resolves
// relative kernel.table_path references. Throws std::runtime_error with the
// offending key path on any problem.
SimulationConfig parse_config(const std::string& text, const std::filesystem::path& base_dir);

SimulationConfig load_config_file(const std::filesystem::path& path);

// Dense numeric CSV matrix (no header), used for tabulated kernels.
std::vector<std::vector<double>> load_table_csv(const std::filesystem::path& path);

}  // namespace edg
