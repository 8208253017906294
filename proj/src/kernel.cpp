#include "edg/kernel.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace edg {

double pow_size(std::size_t x, double e) {
  if (e == 0.0) return 1.0;  // includes 0^0 := 1
  if (x == 0) return 0.0;
  if (x == 1) return 1.0;
  double ip;
  if (e > 0.0 && e <= 64.0 && std::modf(e, &ip) == 0.0) {
    double base = static_cast<double>(x);
    double r = 1.0;
    for (auto n = static_cast<std::uint64_t>(e); n != 0; n >>= 1) {
      if (n & 1) r *= base;
      base *= base;
    }
    return r;
  }
  return std::pow(static_cast<double>(x), e);
}

double SeparableDecomposition::reconstruct(std::size_t j, std::size_t k) const {
  double s = 0.0;
  for (const auto& t : terms) s += t.donor(j) * t.receiver(k);
  return s;
}

std::string_view regime_name(Regime r) {
  switch (r) {
    case Regime::global_existence: return "global_existence";
    case Regime::local_existence: return "local_existence";
    case Regime::finite_gelation: return "finite_gelation";
    case Regime::instantaneous_gelation: return "instantaneous_gelation";
    default: return "unknown";
  }
}

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// Symmetry probe for custom separable kernels: exact symmetry cannot be read
// off opaque factors, so sample a grid of small and large sizes.
bool probe_symmetry(const Kernel& k) {
  static constexpr std::size_t probes[] = {0, 1, 2, 3, 4, 5, 7, 8, 13, 16,
                                           31, 64, 100, 511, 1024, 4096, 10000};
  for (std::size_t a : probes) {
    for (std::size_t b : probes) {
      const double x = k(a, b);
      const double y = k(b, a);
      const double scale = std::max(std::abs(x), std::abs(y));
      if (std::abs(x - y) > 1e-12 * scale) return false;
    }
  }
  return true;
}

}  // namespace

double Kernel::operator()(std::size_t j, std::size_t k) const {
  if (spec_.family == KernelFamily::tabulated) {
    const auto& t = *table_;  // zero receiver column already folded in
    if (j >= t.size() || k >= t.size())
      throw std::out_of_range("tabulated kernel evaluated outside table bounds");
    return t[j][k];
  }
  if (spec_.zero_receiver_row && k == 0) return 0.0;
  if (zero_cross_ && j == 0) return 0.0;
  switch (spec_.family) {
    case KernelFamily::product_power:
      return spec_.C * (pow_size(j, spec_.mu) * pow_size(k, spec_.nu) +
                        pow_size(j, spec_.nu) * pow_size(k, spec_.mu));
    case KernelFamily::sum_power:
      return spec_.C * (pow_size(j, spec_.beta) + pow_size(k, spec_.beta));
    case KernelFamily::homogeneous_eta:
      if (spec_.eta == 0.0) return j == 0 ? 0.0 : spec_.C;
      return spec_.C * (pow_size(j, spec_.eta) * pow_size(k, spec_.eta));
    case KernelFamily::separable_custom: {
      double s = 0.0;
      for (const auto& term : spec_.custom_terms) s += term.donor(j) * term.receiver(k);
      return s;
    }
    case KernelFamily::tabulated:
      break;  // handled above
  }
  return 0.0;
}

std::size_t Kernel::max_size() const {
  if (spec_.family == KernelFamily::tabulated) return table_->size() - 1;
  return std::numeric_limits<std::size_t>::max();
}

Kernel make_kernel(KernelSpec spec) {
  require(spec.C >= 0.0, "kernel coefficient C must be nonnegative");
  require(spec.C1 >= 0.0, "kernel lower-bound constant C1 must be nonnegative");
  require(std::isfinite(spec.C) && std::isfinite(spec.C1), "kernel coefficients must be finite");

  Kernel k;
  switch (spec.family) {
    case KernelFamily::product_power:
      require(spec.mu >= 0.0 && spec.nu >= 0.0, "product_power exponents must be nonnegative");
      break;
    case KernelFamily::sum_power:
      require(spec.beta >= 0.0, "sum_power exponent beta must be nonnegative");
      break;
    case KernelFamily::homogeneous_eta:
      require(spec.eta >= 0.0, "homogeneous exponent eta must be nonnegative");
      break;
    case KernelFamily::tabulated: {
      require(!spec.table.empty(), "tabulated kernel requires a nonempty table");
      const std::size_t n = spec.table.size();
      for (const auto& row : spec.table) {
        require(row.size() == n, "tabulated kernel table must be square");
        for (double v : row) require(v >= 0.0, "tabulated kernel entries must be nonnegative");
      }
      break;
    }
    case KernelFamily::separable_custom:
      for (const auto& t : spec.custom_terms)
        require(static_cast<bool>(t.donor) && static_cast<bool>(t.receiver),
                "separable_custom terms must provide both factors");
      break;
  }

  const bool formula_symmetric = spec.family == KernelFamily::product_power ||
                                 spec.family == KernelFamily::sum_power ||
                                 spec.family == KernelFamily::homogeneous_eta;
  k.zero_cross_ = spec.zero_receiver_row && formula_symmetric;

  if (spec.family == KernelFamily::tabulated) {
    auto table = std::make_shared<std::vector<std::vector<double>>>(spec.table);
    if (spec.zero_receiver_row)
      for (auto& row : *table) row[0] = 0.0;
    k.table_ = std::move(table);
  }

  k.spec_ = std::move(spec);
  const KernelSpec& s = k.spec_;

  // Symmetry flag: analytic for the parametric families, entrywise for
  // tabulated, sampled for custom factors.
  switch (s.family) {
    case KernelFamily::product_power:
    case KernelFamily::sum_power:
      k.symmetric_ = true;
      break;
    case KernelFamily::homogeneous_eta:
      // eta = 0 gives 1 - delta_{j,0}, asymmetric at the boundary unless the
      // zero receiver row zeroes the cross.
      k.symmetric_ = s.eta > 0.0 || s.zero_receiver_row;
      break;
    case KernelFamily::tabulated: {
      const auto& t = *k.table_;
      bool sym = true;
      for (std::size_t i = 0; i < t.size() && sym; ++i)
        for (std::size_t j2 = i + 1; j2 < t.size(); ++j2)
          if (t[i][j2] != t[j2][i]) { sym = false; break; }
      k.symmetric_ = sym;
      break;
    }
    case KernelFamily::separable_custom:
      k.symmetric_ = probe_symmetry(k);
      break;
  }

  // Separable decomposition, with the zero-row mask folded into the factors
  // so that reconstruction matches eval exactly where it matters.
  const bool zr = s.zero_receiver_row;
  const bool zc = k.zero_cross_;
  auto mask_donor = [zc](auto f) {
    return [zc, f](std::size_t j) { return (zc && j == 0) ? 0.0 : f(j); };
  };
  auto mask_receiver = [zr](auto f) {
    return [zr, f](std::size_t j) { return (zr && j == 0) ? 0.0 : f(j); };
  };
  switch (s.family) {
    case KernelFamily::product_power: {
      const double C = s.C, mu = s.mu, nu = s.nu;
      SeparableDecomposition d;
      d.terms.push_back({mask_donor([C, mu](std::size_t j) { return C * pow_size(j, mu); }),
                         mask_receiver([nu](std::size_t j) { return pow_size(j, nu); })});
      d.terms.push_back({mask_donor([C, nu](std::size_t j) { return C * pow_size(j, nu); }),
                         mask_receiver([mu](std::size_t j) { return pow_size(j, mu); })});
      k.separable_ = std::move(d);
      break;
    }
    case KernelFamily::sum_power: {
      const double C = s.C, beta = s.beta;
      SeparableDecomposition d;
      d.terms.push_back({mask_donor([C, beta](std::size_t j) { return C * pow_size(j, beta); }),
                         mask_receiver([](std::size_t) { return 1.0; })});
      d.terms.push_back({mask_donor([C](std::size_t) { return C; }),
                         mask_receiver([beta](std::size_t j) { return pow_size(j, beta); })});
      k.separable_ = std::move(d);
      break;
    }
    case KernelFamily::homogeneous_eta: {
      const double C = s.C, eta = s.eta;
      SeparableDecomposition d;
      if (eta == 0.0) {
        d.terms.push_back({mask_donor([C](std::size_t j) { return j == 0 ? 0.0 : C; }),
                           mask_receiver([](std::size_t) { return 1.0; })});
      } else {
        d.terms.push_back({mask_donor([C, eta](std::size_t j) { return C * pow_size(j, eta); }),
                           mask_receiver([eta](std::size_t j) { return pow_size(j, eta); })});
      }
      k.separable_ = std::move(d);
      break;
    }
    case KernelFamily::separable_custom: {
      SeparableDecomposition d;
      for (const auto& t : s.custom_terms)
        d.terms.push_back({mask_donor(t.donor), mask_receiver(t.receiver)});
      k.separable_ = std::move(d);
      break;
    }
    case KernelFamily::tabulated:
      break;  // no structure assumed
  }

  return k;
}

RegimeClass classify_regime(const Kernel& kernel) {
  const KernelSpec& s = kernel.spec();
  switch (s.family) {
    case KernelFamily::product_power: {
      if (s.mu > 2.0 || s.nu > 2.0)
        return {Regime::unknown, "product-power growth exponent above 2: outside the classified regimes"};
      if (s.mu + s.nu <= 3.0)
        return {Regime::global_existence,
                "symmetric kernel bounded by C(j^mu k^nu + j^nu k^mu) with mu,nu <= 2 and "
                "mu+nu <= 3: global mild solutions exist"};
      const double alpha = std::min(s.mu, s.nu);
      if (s.C1 > 0.0 && alpha > 1.0)
        return {Regime::finite_gelation,
                "kernel sandwiched between C1(j^2 k^a + j^a k^2) and C j^2 k^2 with "
                "1 < a <= 2: the second moment blows up in finite time"};
      return {Regime::local_existence,
              "kernel bounded by C j^2 k^2 without a matching lower bound: solutions exist "
              "at least up to 1/(2 M2(0) C)"};
    }
    case KernelFamily::homogeneous_eta: {
      if (s.eta <= 1.5)
        return {Regime::global_existence,
                "homogeneous kernel (jk)^eta with eta <= 3/2: global mild solutions exist"};
      if (s.eta < 2.0)
        return {Regime::local_existence,
                "homogeneous kernel (jk)^eta with 3/2 < eta < 2 is bounded by C j^2 k^2: "
                "solutions exist at least up to 1/(2 M2(0) C)"};
      if (s.eta == 2.0)
        return {Regime::finite_gelation,
                "K = C j^2 k^2: gelation occurs at exactly 1/(2 M2(0) C)"};
      return {Regime::instantaneous_gelation,
              "homogeneous kernel (jk)^eta with eta > 2 dominates (C/2)(j^eta + k^eta) and "
              "vanishes on the zero row: gelation occurs immediately"};
    }
    case KernelFamily::sum_power: {
      if (s.beta > 2.0 && s.zero_receiver_row)
        return {Regime::instantaneous_gelation,
                "K >= C(j^beta + k^beta) with beta > 2 and K(j,0) = 0: gelation occurs "
                "immediately"};
      if (s.beta <= 2.0)
        return {Regime::global_existence,
                "sum kernel C(j^beta + k^beta) with beta <= 2 fits the product-power class "
                "with exponents (beta, 0): global mild solutions exist"};
      return {Regime::unknown,
              "super-quadratic sum kernel without the zero receiver row: unclassified"};
    }
    case KernelFamily::tabulated:
      return {Regime::unknown, kernel.symmetric()
                                   ? "tabulated kernel: no parametric classification"
                                   : "non-symmetric tabulated kernel: unclassified"};
    case KernelFamily::separable_custom:
      return {Regime::unknown, "custom separable kernel: no parametric classification"};
  }
  return {Regime::unknown, "unclassified"};
}

}  // namespace edg
