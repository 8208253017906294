#pragma once

#include <cstddef>
#include <string_view>

// Small data-parallel primitives used by the rate-sum fast path and moment
// tracking. Every primitive exists as a scalar reference (single accumulator,
// ascending index) plus vector variants selected once at startup from the CPU
// (override with EDG_SIMD=scalar|avx2|neon). The vector variants use fixed
// lane blocking, so results are deterministic for a given build and machine;
// they may differ from the scalar reference by reassociation roundoff only.
namespace edg::simd {

enum class Isa { scalar, avx2, neon };

Isa active();
std::string_view isa_name(Isa isa);

// Scalar references.
double dot_scalar(const double* x, const double* y, std::size_t n);
double sum_scalar(const double* x, std::size_t n);
void axpy_scalar(double a, const double* x, double* y, std::size_t n);

#if defined(__x86_64__) || defined(_M_X64)
double dot_avx2(const double* x, const double* y, std::size_t n);
double sum_avx2(const double* x, std::size_t n);
void axpy_avx2(double a, const double* x, double* y, std::size_t n);
#endif

#if defined(__aarch64__)
double dot_neon(const double* x, const double* y, std::size_t n);
double sum_neon(const double* x, std::size_t n);
void axpy_neon(double a, const double* x, double* y, std::size_t n);
#endif

// Dispatched entry points.
double dot(const double* x, const double* y, std::size_t n);
double sum(const double* x, std::size_t n);
// y[i] += a * x[i]
void axpy(double a, const double* x, double* y, std::size_t n);

}  // namespace edg::simd
