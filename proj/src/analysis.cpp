#include "edg/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <stdexcept>
#include <thread>

namespace edg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Coefficient c when the kernel is exactly c j^2 k^2, else empty.
std::optional<double> quadratic_coefficient(const Kernel& kernel) {
  const KernelSpec& s = kernel.spec();
  if (s.family == KernelFamily::homogeneous_eta && s.eta == 2.0 && !s.zero_receiver_row)
    return s.C;
  if (s.family == KernelFamily::product_power && s.mu == 2.0 && s.nu == 2.0 &&
      !s.zero_receiver_row)
    return 2.0 * s.C;
  return std::nullopt;
}

}  // namespace

GelationEstimate estimate_gelation_time(const Trajectory& traj, const Kernel& kernel,
                                        FitWindow window) {
  std::vector<double> ts, ys;
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const DensityState& st = traj.states[i];
    if (st.t < window.lo || st.t > window.hi) continue;
    const double m2 = moment(st, 2.0);
    if (m2 <= 0.0) continue;
    ts.push_back(st.t);
    ys.push_back(1.0 / m2);
  }
  if (ts.size() < 4)
    throw std::invalid_argument("gelation fit window holds fewer than 4 samples");

  const double n = static_cast<double>(ts.size());
  double st_sum = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    st_sum += ts[i];
    sy += ys[i];
  }
  const double tbar = st_sum / n, ybar = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double dx = ts[i] - tbar, dy = ys[i] - ybar;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
  const double intercept = ybar - slope * tbar;

  double ss_res = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double r = ys[i] - (intercept + slope * ts[i]);
    ss_res += r * r;
  }
  GelationEstimate est;
  est.method = GelationMethod::inverse_m2_linear_fit;
  est.window = window;
  est.slope = slope;
  est.intercept = intercept;
  est.fit_r2 = syy > 0.0 ? std::max(0.0, 1.0 - ss_res / syy) : 1.0;
  est.t_gel = slope < 0.0 ? -intercept / slope : kInf;
  est.gelling = slope < 0.0 && std::abs(slope) >= 1e-3;
  if (auto c = quadratic_coefficient(kernel); c && *c > 0.0 && !traj.states.empty()) {
    const double m20 = moment(traj.states.front(), 2.0);
    if (m20 > 0.0) est.analytic_prediction = 1.0 / (2.0 * m20 * *c);
  }
  return est;
}

std::optional<double> threshold_crossing_time(const Trajectory& traj, double order,
                                              double threshold) {
  for (const DensityState& st : traj.states)
    if (moment(st, order) >= threshold) return st.t;
  return std::nullopt;
}

UpperBoundConstants moment_upper_bound_constants(const Kernel& kernel,
                                                 const DensityState& state0,
                                                 double lambda) {
  const KernelSpec& s = kernel.spec();
  if (s.family != KernelFamily::product_power)
    throw std::invalid_argument("moment bound constants require a product_power kernel");
  if (!(lambda > 1.0 && lambda <= 2.0))
    throw std::invalid_argument("lambda must lie in (1, 2]");
  if (lambda != std::max(s.mu, s.nu))
    throw std::invalid_argument("lambda must equal max(mu, nu)");
  if (s.mu + s.nu > 3.0)
    throw std::invalid_argument("moment bound constants require mu + nu <= 3");
  const double nu = std::min(s.mu, s.nu);
  const double Cq = s.C;
  const double M1 = moment(state0, 1.0);
  const double Mlam = moment(state0, lambda);

  UpperBoundConstants out;
  out.C_lambda = std::max(std::pow(2.0, lambda) - 2.0,
                          std::pow(2.0, 2.0 - lambda) * lambda * (lambda - 1.0));
  out.C_L = std::max(std::pow(M1, (2.0 - nu) / (lambda - 1.0)), M1);
  out.C = 2.0 * out.C_lambda * Cq * M1 + 2.0 * out.C_L * out.C_lambda * Cq;
  out.C_M = 2.0 * out.C_L * out.C_lambda * Cq + Mlam;
  return out;
}

bool BoundReport::all_satisfied() const {
  for (bool s : satisfied)
    if (!s) return false;
  return true;
}

double BoundReport::worst_margin() const {
  double worst = kInf;
  for (double m : margin) worst = std::min(worst, m);
  return worst;
}

BoundReport verify_upper_bound(const Trajectory& traj, const Kernel& kernel,
                               double lambda) {
  if (classify_regime(kernel).regime != Regime::global_existence)
    throw std::invalid_argument("moment upper bound applies to the global-existence regime");
  if (traj.states.empty()) throw std::invalid_argument("empty trajectory");
  const UpperBoundConstants k =
      moment_upper_bound_constants(kernel, traj.states.front(), lambda);

  BoundReport rep;
  rep.bound_name = "M_lambda(t) <= C_M exp(C t)";
  rep.truncation_size = traj.states.front().truncation_size();
  for (const DensityState& st : traj.states) {
    const double sim = moment(st, lambda);
    const double bound = k.C_M * std::exp(k.C * st.t);
    rep.times.push_back(st.t);
    rep.simulated.push_back(sim);
    rep.bound_value.push_back(bound);
    rep.satisfied.push_back(sim <= bound);
    rep.margin.push_back(bound > 0.0 ? (bound - sim) / bound : (sim <= bound ? 0.0 : -kInf));
  }
  return rep;
}

double blowup_lower_bound(double alpha, double C1, double M_alpha0, double t) {
  if (!(alpha > 1.0 && alpha <= 2.0))
    throw std::invalid_argument("alpha must lie in (1, 2]");
  if (!(C1 > 0.0)) throw std::invalid_argument("C1 must be positive");
  if (!(M_alpha0 > 0.0)) throw std::invalid_argument("M_alpha(0) must be positive");
  const double rate = C1 * alpha * (alpha - 1.0) * std::pow(2.0, alpha - 2.0);
  const double denom = 1.0 / M_alpha0 - rate * t;
  return denom > 0.0 ? 1.0 / denom : kInf;
}

BoundReport verify_blowup_bound(const Trajectory& traj, double alpha, double C1) {
  if (traj.states.empty()) throw std::invalid_argument("empty trajectory");
  const double M_alpha0 = moment(traj.states.front(), alpha);
  BoundReport rep;
  rep.bound_name = "M_alpha(t) >= [1/M_alpha(0) - C1 a(a-1) 2^(a-2) t]^-1";
  rep.truncation_size = traj.states.front().truncation_size();
  for (const DensityState& st : traj.states) {
    const double sim = moment(st, alpha);
    const double bound = blowup_lower_bound(alpha, C1, M_alpha0, st.t);
    rep.times.push_back(st.t);
    rep.simulated.push_back(sim);
    rep.bound_value.push_back(bound);
    rep.satisfied.push_back(sim >= bound);
    rep.margin.push_back(std::isfinite(bound) && bound > 0.0 ? (sim - bound) / bound : -1.0);
  }
  return rep;
}

JensenCheck jensen_lower_bound(const DensityState& state, int n, double beta) {
  if (n < 2) throw std::invalid_argument("n must be at least 2");
  if (!(beta > 2.0)) throw std::invalid_argument("beta must exceed 2");
  const double M1 = moment(state, 1.0);
  if (!(M1 > 0.0)) throw std::invalid_argument("state carries zero mass");
  const double lam = (beta - 2.0) / (static_cast<double>(n) - 1.0);
  JensenCheck c;
  c.lhs = moment(state, static_cast<double>(n) - 2.0 + beta);
  c.rhs = std::pow(M1, -lam) * std::pow(moment(state, static_cast<double>(n)), 1.0 + lam);
  c.holds = c.lhs >= c.rhs * (1.0 - 1e-12);
  return c;
}

double instantaneous_blowup_time_bound(int n, double beta, double C, double C2,
                                       double Mn0, double M10) {
  if (n < 2) throw std::invalid_argument("n must be at least 2");
  if (!(beta > 2.0)) throw std::invalid_argument("beta must exceed 2");
  if (!(C > 0.0 && C2 > 0.0)) throw std::invalid_argument("C and C2 must be positive");
  if (!(Mn0 > 0.0 && M10 > 0.0)) throw std::invalid_argument("moments must be positive");
  const double lam = (beta - 2.0) / (static_cast<double>(n) - 1.0);
  return std::pow(Mn0 / M10, -lam) / (C * C2 * (beta - 2.0) * static_cast<double>(n));
}

ConvergenceReport convergence_study(const InitSpec& init, const Kernel& kernel,
                                    const IntegratorConfig& cfg,
                                    std::span<const std::size_t> N_list,
                                    std::span<const double> tracked_orders,
                                    unsigned max_threads) {
  if (N_list.size() < 2)
    throw std::invalid_argument("convergence study needs at least two truncation sizes");
  std::vector<std::size_t> Ns(N_list.begin(), N_list.end());
  std::sort(Ns.begin(), Ns.end());
  Ns.erase(std::unique(Ns.begin(), Ns.end()), Ns.end());
  if (Ns.size() < 2)
    throw std::invalid_argument("convergence study needs at least two distinct sizes");

  std::vector<double> orders(tracked_orders.begin(), tracked_orders.end());
  if (orders.empty()) orders = {0.0, 1.0, 2.0};

  unsigned cap = max_threads;
  if (cap == 0) cap = std::max(1u, std::thread::hardware_concurrency());

  std::vector<Trajectory> runs(Ns.size());
  for (std::size_t base = 0; base < Ns.size(); base += cap) {
    const std::size_t hi = std::min(base + cap, Ns.size());
    std::vector<std::future<Trajectory>> futs;
    for (std::size_t i = base; i < hi; ++i) {
      futs.push_back(std::async(std::launch::async, [&, i] {
        return integrate(make_state(init, Ns[i]), kernel, cfg, orders);
      }));
    }
    for (std::size_t i = base; i < hi; ++i) runs[i] = futs[i - base].get();
  }

  ConvergenceReport rep;
  rep.N_values = Ns;
  rep.reference_N = Ns.back();
  rep.tracked_orders = orders;
  const Trajectory& ref = runs.back();
  for (std::size_t i = 0; i < Ns.size(); ++i) {
    const Trajectory& run = runs[i];
    std::vector<double> sup(orders.size(), 0.0);
    // Grid recording makes shared times bitwise-equal; match exactly.
    std::size_t r = 0;
    for (const DensityState& st : run.states) {
      while (r < ref.states.size() && ref.states[r].t < st.t) ++r;
      if (r >= ref.states.size() || ref.states[r].t != st.t) continue;
      for (std::size_t p = 0; p < orders.size(); ++p) {
        const double d = std::abs(moment(st, orders[p]) - moment(ref.states[r], orders[p]));
        sup[p] = std::max(sup[p], d);
      }
    }
    rep.sup_diffs.push_back(std::move(sup));
    rep.stop_reasons.push_back(run.stop_reason);
    rep.final_times.push_back(run.states.back().t);
  }
  return rep;
}

ConservationReport conservation_report(const Trajectory& traj) {
  ConservationReport rep;
  if (traj.states.empty()) return rep;
  const double m0_0 = moment(traj.states.front(), 0.0);
  const double m1_0 = moment(traj.states.front(), 1.0);
  const double d0 = m0_0 > 0.0 ? m0_0 : 1.0;
  const double d1 = m1_0 > 0.0 ? m1_0 : 1.0;
  for (const DensityState& st : traj.states) {
    rep.max_drift_M0 = std::max(rep.max_drift_M0, std::abs(moment(st, 0.0) - m0_0) / d0);
    rep.max_drift_M1 = std::max(rep.max_drift_M1, std::abs(moment(st, 1.0) - m1_0) / d1);
  }
  return rep;
}

}  // namespace edg
