#include "edg/csv.hpp"

#include <cstdio>
#include <ostream>

namespace edg {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string moment_column_name(double order) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "M%g", order);
  return buf;
}

void write_moments_csv(std::ostream& os, const Trajectory& traj) {
  os << "t";
  for (double p : traj.moments.orders) os << "," << moment_column_name(p);
  os << ",dt\n";
  for (std::size_t i = 0; i < traj.moments.times.size(); ++i) {
    os << format_double(traj.moments.times[i]);
    for (double v : traj.moments.values[i]) os << "," << format_double(v);
    os << "," << format_double(traj.record_dt[i]) << "\n";
  }
}

void write_states_csv(std::ostream& os, const Trajectory& traj) {
  if (traj.states.empty()) return;
  const std::size_t N = traj.states.front().truncation_size();
  os << "t";
  for (std::size_t j = 0; j <= N; ++j) os << ",f_" << j;
  os << "\n";
  for (const DensityState& st : traj.states) {
    os << format_double(st.t);
    for (double v : st.f) os << "," << format_double(v);
    os << "\n";
  }
}

void write_convergence_csv(std::ostream& os, const ConvergenceReport& rep) {
  os << "N,stop_reason,t_final";
  for (double p : rep.tracked_orders) os << ",sup_diff_" << moment_column_name(p);
  os << "\n";
  for (std::size_t i = 0; i < rep.N_values.size(); ++i) {
    os << rep.N_values[i] << "," << stop_reason_name(rep.stop_reasons[i]) << ","
       << format_double(rep.final_times[i]);
    for (double d : rep.sup_diffs[i]) os << "," << format_double(d);
    os << "\n";
  }
}

}  // namespace edg
