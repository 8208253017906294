#pragma once

#include <cstdint>
#include <iosfwd>

namespace edg {

struct OracleCheckResult {
  int cases = 0;
  int failures = 0;
  double worst_rel_error = 0.0;  // |divergence_form - sum h*rhs| / max(|lhs|,|rhs|)
};

// Randomized check of the divergence-form identity: seeded random symmetric
// kernels from every parametric family (plus symmetric tabulated ones),
// random nonnegative states with N <= 256, random nonnegative weights.
// Each case must satisfy |lhs - rhs| <= 1e-12 * max(|lhs|, |rhs|).
OracleCheckResult run_divergence_oracle(std::uint64_t seed, int cases,
                                        std::ostream* diagnostics = nullptr);

}  // namespace edg
