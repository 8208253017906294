#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace edg {

// Exact integer powers by squaring for integral exponents, std::pow otherwise.
// Convention shared with the moment code: 0^0 := 1, 0^p := 0 for p > 0.
double pow_size(std::size_t x, double e);

enum class KernelFamily {
  product_power,    // K = C (j^mu k^nu + j^nu k^mu)
  sum_power,        // K = C (j^beta + k^beta)
  homogeneous_eta,  // K = C (jk)^eta for eta > 0, C (1 - delta_{j,0}) for eta = 0
  tabulated,        // K = table[j][k]
  separable_custom  // K = sum_m a_m(j) b_m(k)
};

struct SeparableTerm {
  std::function<double(std::size_t)> donor;     // a_m, evaluated at the exporting size
  std::function<double(std::size_t)> receiver;  // b_m, evaluated at the importing size
};

// K(j,k) = sum_m donor_m(j) * receiver_m(k). Collapses the O(N^2) rate sums
// to O(N * terms) per evaluation.
struct SeparableDecomposition {
  std::vector<SeparableTerm> terms;
  double reconstruct(std::size_t j, std::size_t k) const;
};

struct KernelSpec {
  KernelFamily family = KernelFamily::product_power;
  double C = 1.0;   // overall rate coefficient, C >= 0
  double mu = 0.0;  // product_power
  double nu = 0.0;  // product_power
  double eta = 0.0; // homogeneous_eta
  double beta = 0.0;// sum_power
  double C1 = 0.0;  // optional gelation lower-bound constant (> 0 when asserted)
  bool zero_receiver_row = false;  // forces K(j,0) = 0 for all j
  std::vector<std::vector<double>> table;  // tabulated: square, nonnegative
  std::vector<SeparableTerm> custom_terms; // separable_custom
};

enum class Regime {
  global_existence,
  local_existence,
  finite_gelation,
  instantaneous_gelation,
  unknown
};

struct RegimeClass {
  Regime regime = Regime::unknown;
  std::string citation;  // human-readable condition -> conclusion
};

std::string_view regime_name(Regime r);

// Immutable after construction; evaluation is pure and safe to share across
// threads. Copies are cheap (tabulated data is shared).
class Kernel {
 public:
  double operator()(std::size_t j, std::size_t k) const;

  bool symmetric() const { return symmetric_; }
  const KernelSpec& spec() const { return spec_; }
  const std::optional<SeparableDecomposition>& separable() const { return separable_; }
  // Largest size covered by a tabulated kernel; SIZE_MAX for parametric families.
  std::size_t max_size() const;

 private:
  friend Kernel make_kernel(KernelSpec spec);
  KernelSpec spec_;
  bool symmetric_ = false;
  bool zero_cross_ = false;  // zero_receiver_row on a formula-symmetric family: K(0,.) = 0 too
  std::shared_ptr<const std::vector<std::vector<double>>> table_;
  std::optional<SeparableDecomposition> separable_;
};

// Validates the spec, fixes the symmetry flag, and attaches a separable
// decomposition when the family admits one (product_power -> 2 terms,
// homogeneous_eta -> 1, sum_power -> 2). Throws std::invalid_argument on a
// malformed spec.
Kernel make_kernel(KernelSpec spec);

inline double kernel_eval(const Kernel& kernel, std::size_t j, std::size_t k) {
  return kernel(j, k);
}

inline const std::optional<SeparableDecomposition>& separable_terms(const Kernel& kernel) {
  return kernel.separable();
}

// Pure function of the spec. Tabulated and custom kernels classify as unknown.
RegimeClass classify_regime(const Kernel& kernel);

}  // namespace edg
