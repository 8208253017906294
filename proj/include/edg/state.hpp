#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace edg {

// Truncated cluster-density vector: f[j] is the density of size-j clusters,
// 0 <= j <= N. Immutable between integration steps; all operations are pure.
struct DensityState {
  double t = 0.0;
  std::vector<double> f;  // size N + 1

  std::size_t truncation_size() const { return f.size() - 1; }  // N
};

enum class InitFamily { monodisperse, delta_at, geometric, custom };

struct InitSpec {
  InitFamily family = InitFamily::monodisperse;
  // Density placed at the target size (monodisperse: size 1, delta_at: size s);
  // for geometric data this is the M0 target of the normalized profile.
  double mass_at_one = 1.0;
  std::size_t s = 1;    // delta_at target size
  double q = 0.5;       // geometric ratio, q in [0,1)
  std::vector<double> values;  // custom densities, length <= N+1
};

// Fills f per family (zero beyond the given data), t = 0. Requires N >= 2.
DensityState make_state(const InitSpec& init, std::size_t N);

// M_p = sum_{j=0}^{N} j^p f_j with 0^0 := 1 (M_0 counts f_0) and 0^p := 0 for p > 0.
double moment(const DensityState& state, double p);

// sum_j h[j] f[j]; h must have length N+1.
double weighted_sum(const DensityState& state, std::span<const double> h);

// sum_{j=m}^{N} j^p f[j]; requires m <= N.
double tail_moment(const DensityState& state, std::size_t m, double p);

// Column of j^p values under the moment convention, usable as a dot-product
// weight against f (bitwise-consistent with moment()).
std::vector<double> moment_weights(std::size_t N, double p);

struct MomentSeries {
  std::vector<double> orders;
  std::vector<double> times;
  std::vector<std::vector<double>> values;  // values[time_index][order_index]
};

}  // namespace edg
