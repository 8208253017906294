#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace edg {

// Batch front door. argv names one of: simulate | gelation | converge |
// verify | oracle-check, plus --config / --seed / --cases flags.
// Exit codes: 0 = all checks pass, 1 = a theorem-level check failed,
// 2 = usage/config/runtime error. Diagnostics go to err.
int run_command(std::span<const std::string> argv, std::ostream& out, std::ostream& err);

}  // namespace edg
