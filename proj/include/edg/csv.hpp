#pragma once

#include <iosfwd>
#include <string>

#include "edg/analysis.hpp"
#include "edg/integrator.hpp"

namespace edg {

// Full-precision decimal (round-trippable, %.17g). All writers emit a header
// row, LF line endings, and byte-identical output for identical inputs.
std::string format_double(double v);

// Column label for a moment order: M0, M1, M2.5, ...
std::string moment_column_name(double order);

void write_moments_csv(std::ostream& os, const Trajectory& traj);
void write_states_csv(std::ostream& os, const Trajectory& traj);
void write_convergence_csv(std::ostream& os, const ConvergenceReport& rep);

}  // namespace edg
