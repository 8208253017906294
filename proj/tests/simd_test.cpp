#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "edg/simd.hpp"

using namespace edg;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = double(rng() >> 11) * 0x1.0p-53 - 0.5;
  return v;
}

}  // namespace

TEST_CASE("dispatched primitives match the scalar reference") {
  std::mt19937_64 rng(19);
  for (std::size_t n : {0ul, 1ul, 3ul, 4ul, 7ul, 8ul, 9ul, 15ul, 64ul, 1000ul, 4097ul}) {
    const auto x = random_vec(rng, n);
    const auto y = random_vec(rng, n);

    const double d_ref = simd::dot_scalar(x.data(), y.data(), n);
    const double d = simd::dot(x.data(), y.data(), n);
    double abs_budget = 0.0;
    for (std::size_t i = 0; i < n; ++i) abs_budget += std::abs(x[i] * y[i]);
    CHECK(std::abs(d - d_ref) <= 1e-13 * (abs_budget + 1.0));

    const double s_ref = simd::sum_scalar(x.data(), n);
    const double s = simd::sum(x.data(), n);
    double sum_budget = 0.0;
    for (double v : x) sum_budget += std::abs(v);
    CHECK(std::abs(s - s_ref) <= 1e-13 * (sum_budget + 1.0));

    auto y1 = y, y2 = y;
    simd::axpy_scalar(0.7, x.data(), y1.data(), n);
    simd::axpy(0.7, x.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(std::abs(y1[i] - y2[i]) <= 1e-15 * (std::abs(y1[i]) + 1.0));
  }
}

#if defined(__x86_64__) || defined(_M_X64)
TEST_CASE("avx2 variants agree with scalar when available") {
  if (!__builtin_cpu_supports("avx2") || !__builtin_cpu_supports("fma")) return;
  std::mt19937_64 rng(23);
  for (std::size_t n : {5ul, 8ul, 33ul, 4096ul}) {
    const auto x = random_vec(rng, n);
    const auto y = random_vec(rng, n);
    double budget = 0.0;
    for (std::size_t i = 0; i < n; ++i) budget += std::abs(x[i] * y[i]);
    CHECK(std::abs(simd::dot_avx2(x.data(), y.data(), n) -
                   simd::dot_scalar(x.data(), y.data(), n)) <= 1e-13 * (budget + 1.0));
  }
}
#endif

TEST_CASE("primitives are deterministic call to call") {
  std::mt19937_64 rng(29);
  const auto x = random_vec(rng, 1537);
  const auto y = random_vec(rng, 1537);
  const double a = simd::dot(x.data(), y.data(), x.size());
  const double b = simd::dot(x.data(), y.data(), x.size());
  CHECK(a == b);
}

TEST_CASE("trailing zeros do not change scalar reductions") {
  std::mt19937_64 rng(31);
  auto x = random_vec(rng, 100);
  auto y = random_vec(rng, 100);
  const double base = simd::dot_scalar(x.data(), y.data(), 60);
  for (std::size_t i = 60; i < 100; ++i) y[i] = 0.0;
  CHECK(simd::dot_scalar(x.data(), y.data(), 100) == base);
}
