#include "edg/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "edg/simd.hpp"

namespace edg {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// Difference between the 5th- and 4th-order weights (error estimator).
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

constexpr double kSafety = 0.9;
constexpr double kShrinkMin = 0.2;
constexpr double kGrowMax = 5.0;

struct Workspace {
  std::vector<double> k1, k2, k3, k4, k5, k6, k7, tmp, y5, err;
  explicit Workspace(std::size_t n)
      : k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), y5(n), err(n) {}
};

struct Attempt {
  double err_norm = 0.0;  // <= 1 means the error test passed
  double min_entry = 0.0;
};

Attempt try_step(const RhsEvaluator& ev, const std::vector<double>& y, double dt,
                 const IntegratorConfig& cfg, Workspace& w) {
  const std::size_t n = y.size();
  ev.rhs(y, w.k1);
  for (std::size_t i = 0; i < n; ++i) w.tmp[i] = y[i] + dt * (a21 * w.k1[i]);
  ev.rhs(w.tmp, w.k2);
  for (std::size_t i = 0; i < n; ++i)
    w.tmp[i] = y[i] + dt * (a31 * w.k1[i] + a32 * w.k2[i]);
  ev.rhs(w.tmp, w.k3);
  for (std::size_t i = 0; i < n; ++i)
    w.tmp[i] = y[i] + dt * (a41 * w.k1[i] + a42 * w.k2[i] + a43 * w.k3[i]);
  ev.rhs(w.tmp, w.k4);
  for (std::size_t i = 0; i < n; ++i)
    w.tmp[i] = y[i] + dt * (a51 * w.k1[i] + a52 * w.k2[i] + a53 * w.k3[i] + a54 * w.k4[i]);
  ev.rhs(w.tmp, w.k5);
  for (std::size_t i = 0; i < n; ++i)
    w.tmp[i] = y[i] + dt * (a61 * w.k1[i] + a62 * w.k2[i] + a63 * w.k3[i] +
                            a64 * w.k4[i] + a65 * w.k5[i]);
  ev.rhs(w.tmp, w.k6);
  for (std::size_t i = 0; i < n; ++i)
    w.y5[i] = y[i] + dt * (b1 * w.k1[i] + b3 * w.k3[i] + b4 * w.k4[i] +
                           b5 * w.k5[i] + b6 * w.k6[i]);
  ev.rhs(w.y5, w.k7);

  Attempt a;
  double acc = 0.0;
  double mn = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = dt * (e1 * w.k1[i] + e3 * w.k3[i] + e4 * w.k4[i] +
                           e5 * w.k5[i] + e6 * w.k6[i] + e7 * w.k7[i]);
    const double sc =
        cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(w.y5[i]));
    const double r = e / sc;
    acc += r * r;
    mn = std::min(mn, w.y5[i]);
  }
  a.err_norm = std::sqrt(acc / static_cast<double>(n));
  if (!std::isfinite(a.err_norm)) a.err_norm = 1e10;
  a.min_entry = mn;
  return a;
}

double controller_factor(double err_norm, bool accepted) {
  double fac = err_norm > 0.0 ? kSafety * std::pow(err_norm, -0.2) : kGrowMax;
  fac = std::clamp(fac, kShrinkMin, accepted ? kGrowMax : 1.0);
  return fac;
}

void clip_small_negatives(std::vector<double>& y, double floor_value) {
  for (auto& v : y)
    if (v < 0.0 && v > floor_value) v = 0.0;
}

}  // namespace

std::string_view stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::blowup_detected: return "blowup_detected";
    case StopReason::dt_underflow: return "dt_underflow";
    default: return "reached_t_end";
  }
}

IntegratorConfig IntegratorConfig::resolved() const {
  IntegratorConfig c = *this;
  if (!(c.t_end >= 0.0)) throw std::invalid_argument("t_end must be nonnegative");
  if (!(c.rel_tol > 0.0) || !(c.abs_tol > 0.0))
    throw std::invalid_argument("tolerances must be positive");
  if (c.neg_clip < 0.0) throw std::invalid_argument("neg_clip must be nonnegative");
  const double horizon = c.t_end > 0.0 ? c.t_end : 1.0;
  if (c.dt_max == 0.0) c.dt_max = horizon;
  if (c.dt_init == 0.0) c.dt_init = 1e-3 * horizon;
  if (c.dt_min == 0.0) c.dt_min = 1e-13 * std::max(horizon, 1.0);
  if (c.record_every == 0.0) c.record_every = horizon / 100.0;
  c.dt_init = std::min(c.dt_init, c.dt_max);
  if (!(c.dt_min > 0.0 && c.dt_min <= c.dt_init && c.dt_init <= c.dt_max))
    throw std::invalid_argument("step bounds must satisfy 0 < dt_min <= dt_init <= dt_max");
  if (!(c.record_every > 0.0)) throw std::invalid_argument("record_every must be positive");
  return c;
}

StepResult step(const DensityState& state, const Kernel& kernel, double dt,
                const IntegratorConfig& cfg) {
  const IntegratorConfig c = cfg.resolved();
  if (dt < c.dt_min) throw std::invalid_argument("dt below dt_min");
  RhsEvaluator ev(kernel, state.truncation_size());
  Workspace w(state.f.size());
  const Attempt a = try_step(ev, state.f, dt, c, w);

  StepResult res;
  const double scale = std::max(1.0, simd::sum_scalar(state.f.data(), state.f.size()));
  const double floor_value = -c.neg_clip * scale;
  if (a.err_norm <= 1.0 && a.min_entry >= floor_value) {
    res.accepted = true;
    res.state.t = state.t + dt;
    res.state.f = w.y5;
    clip_small_negatives(res.state.f, floor_value);
    res.dt_next = dt * controller_factor(a.err_norm, true);
  } else {
    res.accepted = false;
    res.state = state;
    res.dt_next = a.min_entry < floor_value && a.err_norm <= 1.0
                      ? 0.5 * dt
                      : dt * controller_factor(a.err_norm, false);
  }
  return res;
}

Trajectory integrate(const DensityState& state0, const Kernel& kernel,
                     const IntegratorConfig& cfg,
                     std::span<const double> extra_moment_orders) {
  const IntegratorConfig c = cfg.resolved();
  const std::size_t N = state0.truncation_size();
  RhsEvaluator ev(kernel, N);
  Workspace w(N + 1);

  Trajectory traj;
  traj.moments.orders = {0.0, 1.0, 2.0};
  for (double p : extra_moment_orders) {
    if (p < 0.0) throw std::invalid_argument("tracked moment orders must be nonnegative");
    if (std::find(traj.moments.orders.begin(), traj.moments.orders.end(), p) ==
        traj.moments.orders.end())
      traj.moments.orders.push_back(p);
  }
  std::vector<std::vector<double>> weights;
  for (double p : traj.moments.orders) weights.push_back(moment_weights(N, p));
  const std::vector<double> blowup_w = moment_weights(N, c.blowup_moment_order);

  DensityState y = state0;
  const double t0 = y.t;
  double dt_ctrl = c.dt_init;

  auto record = [&](const DensityState& st, double dt_now) {
    traj.states.push_back(st);
    traj.moments.times.push_back(st.t);
    std::vector<double> row;
    row.reserve(weights.size());
    for (const auto& wcol : weights)
      row.push_back(simd::dot_scalar(wcol.data(), st.f.data(), st.f.size()));
    traj.moments.values.push_back(std::move(row));
    traj.record_dt.push_back(dt_now);
  };

  record(y, dt_ctrl);
  if (c.t_end <= t0) {
    traj.stop_reason = StopReason::reached_t_end;
    traj.step_stats.final_dt = dt_ctrl;
    return traj;
  }

  std::uint64_t next_grid = 1;  // next record point is t0 + next_grid * record_every
  auto next_record_time = [&]() {
    return std::min(t0 + static_cast<double>(next_grid) * c.record_every, c.t_end);
  };

  while (true) {
    const double t_target = next_record_time();
    const double dt_gap = t_target - y.t;
    const bool lands_on_target = dt_ctrl >= dt_gap;
    const double dt = lands_on_target ? dt_gap : dt_ctrl;

    const Attempt a = try_step(ev, y.f, dt, c, w);
    const double scale = std::max(1.0, simd::sum_scalar(y.f.data(), y.f.size()));
    const double floor_value = -c.neg_clip * scale;
    const bool err_ok = a.err_norm <= 1.0;
    const bool pos_ok = a.min_entry >= floor_value;

    if (err_ok && pos_ok) {
      traj.step_stats.accepted += 1;
      y.t = lands_on_target ? t_target : y.t + dt;
      y.f = w.y5;
      clip_small_negatives(y.f, floor_value);
      if (!lands_on_target)
        dt_ctrl = std::min(dt * controller_factor(a.err_norm, true), c.dt_max);

      bool recorded = false;
      if (lands_on_target) {
        record(y, dt_ctrl);
        recorded = true;
        // We landed on min(grid point, t_end); bump the grid index iff it was the grid point.
        if (t0 + static_cast<double>(next_grid) * c.record_every <= y.t) ++next_grid;
      }

      const double bm = simd::dot(blowup_w.data(), y.f.data(), y.f.size());
      if (bm > c.blowup_threshold) {
        if (!recorded) record(y, dt_ctrl);
        traj.stop_reason = StopReason::blowup_detected;
        break;
      }
      if (y.t >= c.t_end) {
        traj.stop_reason = StopReason::reached_t_end;
        break;
      }
    } else {
      traj.step_stats.rejected += 1;
      const double dt_next = (!pos_ok && err_ok)
                                 ? 0.5 * dt
                                 : dt * controller_factor(a.err_norm, false);
      if (dt_next < c.dt_min) {
        traj.stop_reason = StopReason::dt_underflow;
        if (y.t > traj.states.back().t) record(y, dt_next);
        break;
      }
      dt_ctrl = dt_next;
    }
  }

  traj.step_stats.final_dt = dt_ctrl;
  return traj;
}

}  // namespace edg
