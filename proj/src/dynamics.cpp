#include "edg/dynamics.hpp"

#include <algorithm>
#include <stdexcept>

#include "edg/simd.hpp"

namespace edg {

namespace {

// Number of leading entries of f that may be nonzero (everything at index
// >= count is exactly zero).
std::size_t nonzero_prefix(std::span<const double> f) {
  std::size_t n = f.size();
  while (n > 0 && f[n - 1] == 0.0) --n;
  return n;
}

}  // namespace

RhsEvaluator::RhsEvaluator(const Kernel& kernel, std::size_t N, RhsPath path)
    : kernel_(kernel), N_(N) {
  if (N < 2) throw std::invalid_argument("truncation size N must be at least 2");
  if (kernel.max_size() < N)
    throw std::invalid_argument("tabulated kernel table does not cover the truncation size");
  const bool has_decomp = kernel.separable().has_value();
  switch (path) {
    case RhsPath::dense: separable_ = false; break;
    case RhsPath::separable:
      if (!has_decomp)
        throw std::invalid_argument("kernel has no separable decomposition");
      separable_ = true;
      break;
    case RhsPath::automatic: separable_ = has_decomp; break;
  }
  if (separable_) {
    const auto& terms = kernel.separable()->terms;
    donor_.resize(terms.size());
    receiver_.resize(terms.size());
    for (std::size_t m = 0; m < terms.size(); ++m) {
      donor_[m].resize(N + 1);
      receiver_[m].resize(N + 1);
      for (std::size_t j = 0; j <= N; ++j) {
        donor_[m][j] = terms[m].donor(j);
        receiver_[m][j] = terms[m].receiver(j);
      }
    }
  }
}

void RhsEvaluator::rates(std::span<const double> f, RateVectors& out) const {
  rates_upto(f, out, N_);
}

void RhsEvaluator::rates_upto(std::span<const double> f, RateVectors& out,
                              std::size_t jhi) const {
  if (f.size() != N_ + 1) throw std::invalid_argument("state length must be N+1");
  out.A.assign(N_ + 1, 0.0);
  out.B.assign(N_ + 1, 0.0);

  const std::size_t act = nonzero_prefix(f);  // f[k] == 0 for k >= act
  if (act == 0) return;

  if (separable_) {
    for (std::size_t m = 0; m < donor_.size(); ++m) {
      // S_m = sum_{k=0}^{N-1} b_m(k) f_k,  T_m = sum_{k=1}^{N} a_m(k) f_k
      const std::size_t nS = std::min(act, N_);          // k = 0 .. N-1
      const std::size_t nT = std::min(act, N_ + 1);      // k = 1 .. N
      const double S = simd::dot(receiver_[m].data(), f.data(), nS);
      const double T = nT > 1 ? simd::dot(donor_[m].data() + 1, f.data() + 1, nT - 1) : 0.0;
      simd::axpy(S, donor_[m].data() + 1, out.A.data() + 1, jhi);            // A[1..jhi]
      simd::axpy(T, receiver_[m].data(), out.B.data(), std::min(jhi + 1, N_));  // B[0..min(jhi,N-1)]
    }
    return;
  }

  // Dense reference path, ascending k. For symmetric kernels one row pass
  // feeds both sums since K(k,j) = K(j,k).
  const std::size_t kA = std::min(act, N_);      // export sum upper count (k <= N-1)
  const std::size_t kB = std::min(act, N_ + 1);  // import sum upper count (k <= N)
  if (kernel_.symmetric()) {
    for (std::size_t j = 0; j <= jhi; ++j) {
      double a = 0.0, b = 0.0;
      const std::size_t kmax = std::max(kA, kB);
      for (std::size_t k = 0; k < kmax; ++k) {
        const double v = kernel_(j, k) * f[k];
        if (j >= 1 && k < kA) a += v;
        if (j < N_ && k >= 1 && k < kB) b += v;
      }
      if (j >= 1) out.A[j] = a;
      if (j < N_) out.B[j] = b;
    }
    return;
  }
  for (std::size_t j = 1; j <= jhi; ++j) {
    double a = 0.0;
    for (std::size_t k = 0; k < kA; ++k) a += kernel_(j, k) * f[k];
    out.A[j] = a;
  }
  const std::size_t bhi = std::min(jhi, N_ - 1);
  for (std::size_t j = 0; j <= bhi; ++j) {
    double b = 0.0;
    for (std::size_t k = 1; k < kB; ++k) b += kernel_(k, j) * f[k];
    out.B[j] = b;
  }
}

void RhsEvaluator::rhs(std::span<const double> f, std::span<double> dfdt) const {
  if (dfdt.size() != N_ + 1) throw std::invalid_argument("derivative length must be N+1");
  const std::size_t act = nonzero_prefix(f);
  // Rates past the populated prefix only multiply exact zeros in the
  // derivative, so restrict the computation window.
  const std::size_t jhi = std::min(act, N_);
  thread_local RateVectors rv;
  rates_upto(f, rv, jhi);
  const auto& A = rv.A;
  const auto& B = rv.B;
  std::fill(dfdt.begin(), dfdt.end(), 0.0);
  if (act == 0) return;
  dfdt[0] = f[1] * A[1] - f[0] * B[0];
  for (std::size_t j = 1; j < std::min(jhi + 1, N_); ++j)
    dfdt[j] = f[j + 1] * A[j + 1] - f[j] * A[j] - f[j] * B[j] + f[j - 1] * B[j - 1];
  if (jhi == N_) dfdt[N_] = -f[N_] * A[N_] + f[N_ - 1] * B[N_ - 1];
}

std::vector<double> export_rates(const DensityState& state, const Kernel& kernel) {
  RhsEvaluator ev(kernel, state.truncation_size());
  RateVectors rv;
  ev.rates(state.f, rv);
  return std::move(rv.A);
}

std::vector<double> import_rates(const DensityState& state, const Kernel& kernel) {
  RhsEvaluator ev(kernel, state.truncation_size());
  RateVectors rv;
  ev.rates(state.f, rv);
  return std::move(rv.B);
}

std::vector<double> rhs(const DensityState& state, const Kernel& kernel) {
  RhsEvaluator ev(kernel, state.truncation_size());
  std::vector<double> df(state.f.size());
  ev.rhs(state.f, df);
  return df;
}

double divergence_form(const DensityState& state, const Kernel& kernel,
                       std::span<const double> h) {
  if (!kernel.symmetric())
    throw std::invalid_argument("divergence form requires a symmetric kernel");
  if (h.size() != state.f.size())
    throw std::invalid_argument("weight vector length must be N+1");
  const std::size_t N = state.truncation_size();
  if (kernel.max_size() < N)
    throw std::invalid_argument("tabulated kernel table does not cover the truncation size");
  const auto& f = state.f;

  // Curvature term: sum_{j=1}^{N-1} (h_{j+1} - 2h_j + h_{j-1}) f_j sum_{k=1}^{N-1} K(j,k) f_k
  double t1 = 0.0;
  for (std::size_t j = 1; j <= N - 1; ++j) {
    double inner = 0.0;
    for (std::size_t k = 1; k <= N - 1; ++k) inner += kernel(j, k) * f[k];
    t1 += (h[j + 1] - 2.0 * h[j] + h[j - 1]) * f[j] * inner;
  }
  // Boundary exchange with size-0 clusters.
  double t2 = 0.0;
  for (std::size_t j = 1; j <= N - 1; ++j)
    t2 += ((h[j - 1] - h[j]) + (h[1] - h[0])) * kernel(j, 0) * f[j] * f[0];
  // Boundary exchange with size-N clusters.
  double t3 = 0.0;
  for (std::size_t j = 1; j <= N - 1; ++j)
    t3 += ((h[j + 1] - h[j]) + (h[N - 1] - h[N])) * f[j] * kernel(N, j) * f[N];
  const double t4 =
      ((h[N - 1] - h[N]) + (h[1] - h[0])) * f[N] * kernel(N, 0) * f[0];
  return t1 + t2 + t3 + t4;
}

}  // namespace edg
