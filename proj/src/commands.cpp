#include "edg/commands.hpp"

#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "edg/analysis.hpp"
#include "edg/config.hpp"
#include "edg/csv.hpp"
#include "edg/oracle.hpp"

namespace edg {

namespace {

unsigned thread_cap() {
  if (const char* env = std::getenv("EDG_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  return out;
}

Trajectory run_simulation(const SimulationConfig& cfg) {
  const Kernel kernel = make_kernel(cfg.kernel);
  const DensityState state0 = make_state(cfg.init, cfg.N);
  return integrate(state0, kernel, cfg.integrator, cfg.tracked_moment_orders);
}

void write_trajectory_outputs(const SimulationConfig& cfg, const Trajectory& traj) {
  if (!cfg.outputs.moments_path.empty()) {
    auto f = open_output(cfg.outputs.moments_path);
    write_moments_csv(f, traj);
  }
  if (!cfg.outputs.states_path.empty()) {
    auto f = open_output(cfg.outputs.states_path);
    write_states_csv(f, traj);
  }
}

int cmd_simulate(const SimulationConfig& cfg, std::ostream& out) {
  if (cfg.outputs.moments_path.empty())
    throw std::runtime_error("simulate requires outputs.moments_path");
  const Trajectory traj = run_simulation(cfg);
  write_trajectory_outputs(cfg, traj);
  out << "simulate: " << traj.states.size() << " records, stop_reason="
      << stop_reason_name(traj.stop_reason)
      << ", accepted=" << traj.step_stats.accepted
      << ", rejected=" << traj.step_stats.rejected << "\n";
  return 0;
}

int cmd_gelation(const SimulationConfig& cfg, std::ostream& out) {
  const Kernel kernel = make_kernel(cfg.kernel);
  const Trajectory traj = run_simulation(cfg);
  write_trajectory_outputs(cfg, traj);

  FitWindow window{cfg.gelation.window_lo, cfg.gelation.window_hi};
  if (window.lo < 0.0 || window.hi <= window.lo) {
    // Default window: [0.1, 0.7] of the analytic or threshold-estimated
    // gelation time, away from the flat start and the truncation-polluted end.
    std::optional<double> t_est;
    if (!traj.states.empty()) {
      const double m20 = moment(traj.states.front(), 2.0);
      const KernelSpec& s = kernel.spec();
      if (s.family == KernelFamily::homogeneous_eta && s.eta == 2.0 && s.C > 0.0 && m20 > 0.0)
        t_est = 1.0 / (2.0 * m20 * s.C);
      else if (s.family == KernelFamily::product_power && s.mu == 2.0 && s.nu == 2.0 &&
               s.C > 0.0 && m20 > 0.0)
        t_est = 1.0 / (2.0 * m20 * 2.0 * s.C);
      else if (m20 > 0.0)
        t_est = threshold_crossing_time(traj, 2.0, 10.0 * m20);
    }
    if (!t_est)
      throw std::runtime_error(
          "gelation.window not given and no gelation-time estimate is available");
    window = FitWindow{0.1 * *t_est, 0.7 * *t_est};
  }

  const GelationEstimate est = estimate_gelation_time(traj, kernel, window);
  std::ostringstream rep;
  rep << "method: inverse_m2_linear_fit\n"
      << "window_lo: " << format_double(est.window.lo) << "\n"
      << "window_hi: " << format_double(est.window.hi) << "\n"
      << "slope: " << format_double(est.slope) << "\n"
      << "intercept: " << format_double(est.intercept) << "\n"
      << "t_gel: " << format_double(est.t_gel) << "\n"
      << "fit_r2: " << format_double(est.fit_r2) << "\n"
      << "gelling: " << (est.gelling ? "true" : "false") << "\n"
      << "analytic_prediction: "
      << (est.analytic_prediction ? format_double(*est.analytic_prediction) : "none") << "\n"
      << "stop_reason: " << stop_reason_name(traj.stop_reason) << "\n"
      << "regime: " << regime_name(classify_regime(kernel).regime) << "\n";
  out << rep.str();
  if (!cfg.outputs.report_path.empty()) {
    auto f = open_output(cfg.outputs.report_path);
    f << rep.str();
  }
  return 0;
}

int cmd_converge(const SimulationConfig& cfg, std::ostream& out) {
  if (cfg.converge.N_list.size() < 2)
    throw std::runtime_error("converge requires converge.N_list with at least two sizes");
  const Kernel kernel = make_kernel(cfg.kernel);
  std::vector<double> orders = {0.0, 1.0, 2.0};
  for (double p : cfg.tracked_moment_orders)
    if (std::find(orders.begin(), orders.end(), p) == orders.end()) orders.push_back(p);
  const ConvergenceReport rep = convergence_study(
      cfg.init, kernel, cfg.integrator, cfg.converge.N_list, orders, thread_cap());
  std::ostringstream csv;
  write_convergence_csv(csv, rep);
  out << csv.str();
  if (!cfg.outputs.convergence_path.empty()) {
    auto f = open_output(cfg.outputs.convergence_path);
    f << csv.str();
  }
  return 0;
}

int cmd_verify(const SimulationConfig& cfg, std::ostream& out, std::ostream& err) {
  const Kernel kernel = make_kernel(cfg.kernel);
  const VerifyOptions& v = cfg.verify;
  if (v.upper_bound_lambda && !kernel.symmetric())
    throw std::runtime_error(
        "verify.upper_bound requires a symmetric kernel; this kernel is not symmetric");
  if (v.blowup_alpha && !kernel.symmetric())
    throw std::runtime_error(
        "verify.blowup_lower_bound requires a symmetric kernel; this kernel is not symmetric");

  const Trajectory traj = run_simulation(cfg);
  write_trajectory_outputs(cfg, traj);

  bool all_pass = true;
  std::ostringstream rep;

  const double drift_limit = v.conservation_max_drift > 0.0
                                 ? v.conservation_max_drift
                                 : 10.0 * cfg.integrator.resolved().rel_tol;
  const ConservationReport cons = conservation_report(traj);
  const bool cons_ok =
      cons.max_drift_M0 <= drift_limit && cons.max_drift_M1 <= drift_limit;
  all_pass = all_pass && cons_ok;
  rep << "conservation: max_drift_M0=" << format_double(cons.max_drift_M0)
      << " max_drift_M1=" << format_double(cons.max_drift_M1)
      << " limit=" << format_double(drift_limit) << " " << (cons_ok ? "pass" : "FAIL")
      << "\n";

  if (v.jensen_n) {
    std::size_t checked = 0, held = 0;
    for (const DensityState& st : traj.states) {
      if (!(moment(st, 1.0) > 0.0)) continue;
      ++checked;
      if (jensen_lower_bound(st, *v.jensen_n, v.jensen_beta).holds) ++held;
    }
    const bool ok = held == checked;
    all_pass = all_pass && ok;
    rep << "jensen (n=" << *v.jensen_n << ", beta=" << format_double(v.jensen_beta)
        << "): " << held << "/" << checked << " states hold " << (ok ? "pass" : "FAIL")
        << "\n";
  }

  if (v.upper_bound_lambda) {
    const BoundReport br = verify_upper_bound(traj, kernel, *v.upper_bound_lambda);
    const bool ok = br.all_satisfied();
    all_pass = all_pass && ok;
    rep << "upper_bound (lambda=" << format_double(*v.upper_bound_lambda)
        << "): worst_margin=" << format_double(br.worst_margin()) << " "
        << (ok ? "pass" : "FAIL") << "\n";
  }

  if (v.blowup_alpha) {
    BoundReport br = verify_blowup_bound(traj, *v.blowup_alpha, v.blowup_C1);
    bool ok = true;
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < br.times.size(); ++i) {
      if (v.blowup_t_max >= 0.0 && br.times[i] > v.blowup_t_max) continue;
      ok = ok && br.satisfied[i];
      worst = std::min(worst, br.margin[i]);
    }
    all_pass = all_pass && ok;
    rep << "blowup_lower_bound (alpha=" << format_double(*v.blowup_alpha)
        << ", C1=" << format_double(v.blowup_C1)
        << "): worst_margin=" << format_double(worst) << " " << (ok ? "pass" : "FAIL")
        << "\n";
  }

  rep << "result: " << (all_pass ? "PASS" : "FAIL") << "\n";
  out << rep.str();
  if (!cfg.outputs.report_path.empty()) {
    auto f = open_output(cfg.outputs.report_path);
    f << rep.str();
  }
  if (!all_pass) err << "verify: a theorem-level check failed\n";
  return all_pass ? 0 : 1;
}

}  // namespace

int run_command(std::span<const std::string> argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"exchange-driven growth solver and verification harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 42;
  int cases = 100;

  CLI::App* sim = app.add_subcommand("simulate", "integrate and write trajectory CSVs");
  sim->add_option("--config", config_path, "config file (JSON)")->required();
  CLI::App* gel = app.add_subcommand("gelation", "fit 1/M2 and extrapolate the gelation time");
  gel->add_option("--config", config_path, "config file (JSON)")->required();
  CLI::App* conv = app.add_subcommand("converge", "truncation-size convergence study");
  conv->add_option("--config", config_path, "config file (JSON)")->required();
  CLI::App* ver = app.add_subcommand("verify", "run bound and conservation checks");
  ver->add_option("--config", config_path, "config file (JSON)")->required();
  CLI::App* orc = app.add_subcommand("oracle-check", "randomized divergence-form identity check");
  orc->add_option("--seed", seed, "RNG seed");
  orc->add_option("--cases", cases, "number of random cases");

  std::vector<std::string> args(argv.begin(), argv.end());
  std::reverse(args.begin(), args.end());  // CLI11 consumes reversed argv
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (orc->parsed()) {
      if (cases < 1) throw std::runtime_error("--cases must be positive");
      const OracleCheckResult res = run_divergence_oracle(seed, cases, &err);
      out << "oracle-check: " << res.cases - res.failures << "/" << res.cases
          << " cases pass, worst_rel_error=" << format_double(res.worst_rel_error) << "\n";
      if (res.failures > 0) {
        err << "oracle-check: divergence-form identity violated\n";
        return 1;
      }
      return 0;
    }
    const SimulationConfig cfg = load_config_file(config_path);
    if (sim->parsed()) return cmd_simulate(cfg, out);
    if (gel->parsed()) return cmd_gelation(cfg, out);
    if (conv->parsed()) return cmd_converge(cfg, out);
    if (ver->parsed()) return cmd_verify(cfg, out, err);
    err << "error: no subcommand\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace edg
