#pragma once

#include <cstddef>
#include <span>

// Data-parallel arithmetic kernels used by the Monte Carlo and bootstrap
// inner loops. Every kernel has a scalar reference implementation and an
// AVX2+FMA variant; the backend is picked once at startup from cpuid and
// can be forced with YLAB_SIMD=scalar|avx2|auto. Variants are equivalence
// tested against each other in tests/test_simd.cpp.
//
// The dispatch is resolved once per process, so a given machine always runs
// the same code path and reruns are bit-identical.

namespace ylab::simd {

enum class Backend { scalar, avx2 };

Backend active_backend();
const char* backend_name();

// sum_i x_i * y_i
double dot(std::span<const double> x, std::span<const double> y);

// sum_i x_i
double sum(std::span<const double> x);

// sum_i x_i^2
double sumsq(std::span<const double> x);

// sum_i |x_i|
double l1(std::span<const double> x);

// max_i |x_i|, 0 for empty input
double linf(std::span<const double> x);

// y_i += a * x_i
void axpy(double a, std::span<const double> x, std::span<double> y);

// x_i *= a
void scale(double a, std::span<double> x);

// Rank-1 update of the upper triangle of a row-major dim x dim matrix:
// A(i,j) += alpha * x_i * x_j for j >= i.
void syr_upper(double alpha, std::span<const double> x, double* a, std::size_t dim);

namespace detail {

struct Kernels {
  double (*dot)(const double*, const double*, std::size_t);
  double (*sum)(const double*, std::size_t);
  double (*sumsq)(const double*, std::size_t);
  double (*l1)(const double*, std::size_t);
  double (*linf)(const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*scale)(double, double*, std::size_t);
  void (*syr_upper)(double, const double*, double*, std::size_t);
};

extern const Kernels scalar_kernels;
extern const Kernels avx2_kernels;
bool cpu_has_avx2();

}  // namespace detail

}  // namespace ylab::simd
