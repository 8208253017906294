#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "edg/integrator.hpp"
#include "edg/kernel.hpp"
#include "edg/state.hpp"

namespace edg {

enum class GelationMethod { inverse_m2_linear_fit, threshold_crossing };

struct FitWindow {
  double lo = 0.0;
  double hi = 0.0;
};

struct GelationEstimate {
  double t_gel = 0.0;  // +inf when the fit extrapolates to no finite root
  GelationMethod method = GelationMethod::inverse_m2_linear_fit;
  double fit_r2 = 0.0;
  FitWindow window;
  std::optional<double> analytic_prediction;  // 1/(2 M2(0) c) for K = c j^2 k^2
  double slope = 0.0;      // fitted slope of 1/M2 against t
  double intercept = 0.0;
  bool gelling = false;    // false when the fitted slope is >= 0 or smaller than 1e-3 in magnitude
};

// Least-squares line through (t, 1/M2(t)) over recorded times inside the
// window; t_gel is the root of the fitted line. Requires at least 4 samples
// in the window.
GelationEstimate estimate_gelation_time(const Trajectory& traj, const Kernel& kernel,
                                        FitWindow window);

// First recorded time at which the moment of the given order reaches the
// threshold; empty if it never does.
std::optional<double> threshold_crossing_time(const Trajectory& traj, double order,
                                              double threshold);

struct UpperBoundConstants {
  double C_M = 0.0;
  double C = 0.0;
  double C_lambda = 0.0;
  double C_L = 0.0;
};

// Growth constants for the lambda-moment bound M_lambda(t) <= C_M e^{C t}:
//   C_lambda = max{2^lambda - 2, 2^{2-lambda} lambda (lambda-1)}
//   C_L      = max{M1(0)^{(2-nu)/(lambda-1)}, M1(0)}   (nu = min exponent)
//   C        = 2 C_lambda C_q M1(0) + 2 C_L C_lambda C_q
//   C_M      = 2 C_L C_lambda C_q + M_lambda(0)
// Requires a product_power kernel with lambda = max(mu,nu) in (1,2] and
// mu + nu <= 3.
UpperBoundConstants moment_upper_bound_constants(const Kernel& kernel,
                                                 const DensityState& state0,
                                                 double lambda);

struct BoundReport {
  std::string bound_name;
  std::size_t truncation_size = 0;
  std::vector<double> times;
  std::vector<double> simulated;
  std::vector<double> bound_value;
  std::vector<bool> satisfied;
  // Signed relative slack: (bound - simulated)/bound for upper bounds,
  // (simulated - bound)/bound for lower bounds. Negative means violated.
  std::vector<double> margin;

  bool all_satisfied() const;
  double worst_margin() const;
};

// Checks M_lambda(t) <= C_M e^{C t} at every recorded time. Requires the
// global-existence regime.
BoundReport verify_upper_bound(const Trajectory& traj, const Kernel& kernel,
                               double lambda);

// [1/M_alpha(0) - C1 alpha (alpha-1) 2^{alpha-2} t]^{-1}; +inf at or past the
// divergence time. Requires 1 < alpha <= 2, C1 > 0.
double blowup_lower_bound(double alpha, double C1, double M_alpha0, double t);

// Compares M_alpha(t) against blowup_lower_bound at recorded times. The
// truncated moment underestimates the untruncated one, so reports are read
// through an N-refinement (margins must shrink as N grows).
BoundReport verify_blowup_bound(const Trajectory& traj, double alpha, double C1);

struct JensenCheck {
  double lhs = 0.0;  // M_{n-2+beta}
  double rhs = 0.0;  // M1^{-Lambda} M_n^{1+Lambda}, Lambda = (beta-2)/(n-1)
  bool holds = false;
};

// Moment interpolation inequality; an exact theorem, so holds must be true
// up to 1e-12 relative roundoff slack. Requires n >= 2, beta > 2, M1 > 0.
JensenCheck jensen_lower_bound(const DensityState& state, int n, double beta);

// (Mn0/M10)^{-Lambda} / (C C2 (beta-2) n) with Lambda = (beta-2)/(n-1):
// upper bound on the blow-up time of M_n; decreases like 1/n when Mn0 = M10.
double instantaneous_blowup_time_bound(int n, double beta, double C, double C2,
                                       double Mn0, double M10);

struct ConvergenceReport {
  std::vector<std::size_t> N_values;  // ascending
  std::size_t reference_N = 0;        // max of N_values
  std::vector<double> tracked_orders;
  // sup over shared recorded times of |M_p^N - M_p^ref|, per N then per order.
  std::vector<std::vector<double>> sup_diffs;
  std::vector<StopReason> stop_reasons;
  std::vector<double> final_times;
};

// Integrates the same problem at every N in N_list (at most max_threads runs
// in flight) and measures moment deviations against the largest N.
ConvergenceReport convergence_study(const InitSpec& init, const Kernel& kernel,
                                    const IntegratorConfig& cfg,
                                    std::span<const std::size_t> N_list,
                                    std::span<const double> tracked_orders,
                                    unsigned max_threads = 0);

struct ConservationReport {
  double max_drift_M0 = 0.0;
  double max_drift_M1 = 0.0;
};

// Maximum relative drift of the conserved moments over recorded states.
ConservationReport conservation_report(const Trajectory& traj);

}  // namespace edg
