#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "edg/dynamics.hpp"
#include "edg/kernel.hpp"
#include "edg/state.hpp"

namespace edg {

struct IntegratorConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double dt_init = 0.0;  // 0: 1e-3 * t_end
  double dt_min = 0.0;   // 0: 1e-13 * max(t_end, 1)
  double dt_max = 0.0;   // 0: t_end
  // Accepted-state entries in (-neg_clip * max(1, M0), 0) are clipped to 0;
  // anything more negative rejects the step and halves dt.
  double neg_clip = 1e-14;
  double blowup_moment_order = 2.0;
  double blowup_threshold = 1e9;
  double t_end = 1.0;
  double record_every = 0.0;  // 0: t_end / 100

  // Defaults applied, invariants checked (0 < dt_min <= dt_init <= dt_max).
  IntegratorConfig resolved() const;
};

enum class StopReason { reached_t_end, blowup_detected, dt_underflow };

std::string_view stop_reason_name(StopReason r);

struct StepStats {
  std::uint64_t accepted = 0;
  std::uint64_t rejected = 0;
  double final_dt = 0.0;
};

struct Trajectory {
  std::vector<DensityState> states;  // first at t = 0, times strictly increasing
  MomentSeries moments;              // orders 0,1,2 plus any extra tracked orders
  std::vector<double> record_dt;     // controller step size at each record
  StepStats step_stats;
  StopReason stop_reason = StopReason::reached_t_end;
};

struct StepResult {
  DensityState state;
  double dt_next = 0.0;
  bool accepted = false;
};

// One embedded 5(4) attempt from state.t with the given dt. Pure apart from
// the returned proposal; does not enforce dt <= t_end.
StepResult step(const DensityState& state, const Kernel& kernel, double dt,
                const IntegratorConfig& cfg);

// Advances until t_end, blow-up (tracked moment order exceeding the
// threshold), or dt underflow. States are recorded at t = 0, on the
// record_every grid (steps land on grid points exactly), and at the terminal
// time. Deterministic: identical inputs give a bit-identical trajectory.
Trajectory integrate(const DensityState& state0, const Kernel& kernel,
                     const IntegratorConfig& cfg,
                     std::span<const double> extra_moment_orders = {});

}  // namespace edg
