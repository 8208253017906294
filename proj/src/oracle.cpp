#include "edg/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <vector>

#include "edg/dynamics.hpp"
#include "edg/kernel.hpp"
#include "edg/state.hpp"

namespace edg {

namespace {

// mt19937_64 gives the same stream on every platform; map bits to doubles
// by hand so the distribution is reproducible too.
struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  double uniform() { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t integer(std::uint64_t lo, std::uint64_t hi) {
    return lo + eng() % (hi - lo + 1);
  }
};

Kernel random_symmetric_kernel(Rng& rng, std::size_t N) {
  KernelSpec spec;
  switch (rng.integer(0, 3)) {
    case 0:
      spec.family = KernelFamily::product_power;
      spec.C = rng.uniform(0.1, 2.0);
      spec.mu = rng.uniform(0.0, 2.0);
      spec.nu = rng.uniform(0.0, 2.0);
      spec.zero_receiver_row = rng.integer(0, 3) == 0;
      break;
    case 1:
      spec.family = KernelFamily::homogeneous_eta;
      spec.C = rng.uniform(0.1, 2.0);
      spec.eta = rng.uniform(0.05, 2.0);
      spec.zero_receiver_row = rng.integer(0, 3) == 0;
      break;
    case 2:
      spec.family = KernelFamily::sum_power;
      spec.C = rng.uniform(0.1, 2.0);
      spec.beta = rng.uniform(0.0, 3.0);
      spec.zero_receiver_row = rng.integer(0, 1) == 0;
      break;
    default: {
      spec.family = KernelFamily::tabulated;
      const bool zero_boundary = rng.integer(0, 1) == 0;
      spec.table.assign(N + 1, std::vector<double>(N + 1, 0.0));
      for (std::size_t i = 0; i <= N; ++i)
        for (std::size_t j = i; j <= N; ++j) {
          const bool boundary = i == 0 || j == 0;
          const double v = (zero_boundary && boundary) ? 0.0 : rng.uniform();
          spec.table[i][j] = v;
          spec.table[j][i] = v;
        }
      break;
    }
  }
  return make_kernel(std::move(spec));
}

}  // namespace

OracleCheckResult run_divergence_oracle(std::uint64_t seed, int cases,
                                        std::ostream* diagnostics) {
  Rng rng(seed);
  OracleCheckResult res;
  for (int c = 0; c < cases; ++c) {
    const std::size_t N = rng.integer(4, 256);
    const Kernel kernel = random_symmetric_kernel(rng, N);

    DensityState state;
    state.f.assign(N + 1, 0.0);
    // A quarter of the states get an exactly-zero tail to exercise the
    // truncated-support fast path.
    const std::size_t support =
        rng.integer(0, 3) == 0 ? rng.integer(2, N) : N;
    for (std::size_t j = 0; j <= support; ++j) state.f[j] = rng.uniform();

    std::vector<double> h(N + 1);
    for (auto& v : h) v = rng.uniform();

    const double lhs = divergence_form(state, kernel, h);
    const std::vector<double> df = rhs(state, kernel);
    double rhs_sum = 0.0;
    for (std::size_t j = 0; j <= N; ++j) rhs_sum += h[j] * df[j];

    const double scale = std::max(std::abs(lhs), std::abs(rhs_sum));
    const double err = std::abs(lhs - rhs_sum);
    const double rel = scale > 0.0 ? err / scale : 0.0;
    res.worst_rel_error = std::max(res.worst_rel_error, rel);
    res.cases += 1;
    if (err > 1e-12 * scale) {
      res.failures += 1;
      if (diagnostics)
        *diagnostics << "case " << c << ": N=" << N << " |lhs-rhs|=" << err
                     << " scale=" << scale << "\n";
    }
  }
  return res;
}

}  // namespace edg
