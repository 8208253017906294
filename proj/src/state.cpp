#include "edg/state.hpp"

#include <cmath>
#include <stdexcept>

#include "edg/kernel.hpp"

namespace edg {

DensityState make_state(const InitSpec& init, std::size_t N) {
  if (N < 2) throw std::invalid_argument("truncation size N must be at least 2");
  DensityState st;
  st.t = 0.0;
  st.f.assign(N + 1, 0.0);
  switch (init.family) {
    case InitFamily::monodisperse:
      if (init.mass_at_one < 0.0) throw std::invalid_argument("initial density must be nonnegative");
      st.f[1] = init.mass_at_one;
      break;
    case InitFamily::delta_at:
      if (init.mass_at_one < 0.0) throw std::invalid_argument("initial density must be nonnegative");
      if (init.s > N) throw std::invalid_argument("delta_at size exceeds truncation size");
      st.f[init.s] = init.mass_at_one;
      break;
    case InitFamily::geometric: {
      if (!(init.q >= 0.0 && init.q < 1.0))
        throw std::invalid_argument("geometric ratio q must lie in [0,1)");
      if (init.mass_at_one < 0.0) throw std::invalid_argument("initial density must be nonnegative");
      // Normalized over the truncated range so M0 matches the target exactly.
      double w = 1.0, norm = 0.0;
      for (std::size_t j = 0; j <= N; ++j) {
        st.f[j] = w;
        norm += w;
        w *= init.q;
      }
      const double scale = norm > 0.0 ? init.mass_at_one / norm : 0.0;
      for (auto& v : st.f) v *= scale;
      break;
    }
    case InitFamily::custom: {
      if (init.values.size() > N + 1)
        throw std::invalid_argument("custom initial data longer than N+1");
      for (std::size_t j = 0; j < init.values.size(); ++j) {
        if (init.values[j] < 0.0)
          throw std::invalid_argument("custom initial data must be nonnegative");
        st.f[j] = init.values[j];
      }
      break;
    }
  }
  return st;
}

double moment(const DensityState& state, double p) {
  if (p < 0.0) throw std::invalid_argument("moment order must be nonnegative");
  double s = 0.0;
  if (p == 0.0) {
    for (double v : state.f) s += v;
    return s;
  }
  for (std::size_t j = 1; j < state.f.size(); ++j) s += pow_size(j, p) * state.f[j];
  return s;
}

double weighted_sum(const DensityState& state, std::span<const double> h) {
  if (h.size() != state.f.size())
    throw std::invalid_argument("weight vector length must be N+1");
  double s = 0.0;
  for (std::size_t j = 0; j < h.size(); ++j) s += h[j] * state.f[j];
  return s;
}

double tail_moment(const DensityState& state, std::size_t m, double p) {
  if (p < 0.0) throw std::invalid_argument("moment order must be nonnegative");
  if (m > state.truncation_size())
    throw std::out_of_range("tail start exceeds truncation size");
  double s = 0.0;
  for (std::size_t j = m; j < state.f.size(); ++j) s += pow_size(j, p) * state.f[j];
  return s;
}

std::vector<double> moment_weights(std::size_t N, double p) {
  std::vector<double> w(N + 1);
  for (std::size_t j = 0; j <= N; ++j) w[j] = pow_size(j, p);
  return w;
}

}  // namespace edg
