#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "edg/kernel.hpp"
#include "edg/state.hpp"

namespace edg {

// Per-cluster exchange rates for a state of truncation size N:
//   A[j] = sum_{k=0}^{N-1} K(j,k) f[k]   (export rate of size j), valid for 1 <= j <= N
//   B[j] = sum_{k=1}^{N}   K(k,j) f[k]   (import rate onto size j), valid for 0 <= j <= N-1
// The unused slots A[0] and B[N] are kept zero so both vectors have length N+1.
struct RateVectors {
  std::vector<double> A;
  std::vector<double> B;
};

enum class RhsPath { automatic, dense, separable };

// Evaluates the truncated exchange system
//   df0    =  f1 A[1] - f0 B[0]
//   df_j   =  f_{j+1} A[j+1] - f_j A[j] - f_j B[j] + f_{j-1} B[j-1],  1 <= j <= N-1
//   df_N   = -f_N A[N] + f_{N-1} B[N-1]
// which conserves sum_j f_j and sum_j j f_j identically.
//
// The dense path is the scalar O(N^2) reference (kernel evaluated entrywise,
// ascending k). The separable path samples the factor columns once and
// reduces each rate sum to O(terms) dot products; it is selected
// automatically whenever the kernel carries a decomposition. Sums skip the
// exactly-zero tail of f; trailing zeros contribute nothing to any sum.
class RhsEvaluator {
 public:
  RhsEvaluator(const Kernel& kernel, std::size_t N, RhsPath path = RhsPath::automatic);

  // f must have length N+1. Outputs are fully overwritten.
  void rates(std::span<const double> f, RateVectors& out) const;
  void rhs(std::span<const double> f, std::span<double> dfdt) const;

  bool separable_path() const { return separable_; }
  std::size_t truncation_size() const { return N_; }
  const Kernel& kernel() const { return kernel_; }

 private:
  // Fills A[1..jhi] and B[0..min(jhi,N-1)]; everything else is zeroed.
  void rates_upto(std::span<const double> f, RateVectors& out, std::size_t jhi) const;

  Kernel kernel_;
  std::size_t N_;
  bool separable_;
  // Sampled factor columns: donor_[m][j], receiver_[m][k] for 0 <= j,k <= N.
  std::vector<std::vector<double>> donor_;
  std::vector<std::vector<double>> receiver_;
};

// One-shot wrappers over RhsEvaluator (spec operations).
std::vector<double> export_rates(const DensityState& state, const Kernel& kernel);
std::vector<double> import_rates(const DensityState& state, const Kernel& kernel);
std::vector<double> rhs(const DensityState& state, const Kernel& kernel);

// Exact algebraic identity for symmetric kernels: for any weights h,
// sum_j h[j] * rhs[j] equals the four-term expression below. Implemented as
// an independent scalar translation of that expression; used as the test
// oracle for the rate/RHS evaluation paths. Throws if the kernel is not
// symmetric or h has the wrong length.
double divergence_form(const DensityState& state, const Kernel& kernel,
                       std::span<const double> h);

}  // namespace edg
