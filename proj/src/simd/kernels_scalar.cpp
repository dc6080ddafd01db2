#include "ylab/simd/kernels.hpp"

#include <cmath>

// Reference kernels. Plain loops, kept branch-free where it matters so the
// compiler can still autovectorize without changing summation order relative
// to the AVX2 variants more than reassociation already does.

namespace ylab::simd::detail {

namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double sum_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

double sumsq_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
  return acc;
}

double l1_scalar(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::fabs(x[i]);
  return acc;
}

double linf_scalar(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(x[i]));
  return m;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale_scalar(double a, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void syr_upper_scalar(double alpha, const double* x, double* a, std::size_t dim) {
  for (std::size_t i = 0; i < dim; ++i) {
    const double axi = alpha * x[i];
    double* row = a + i * dim;
    for (std::size_t j = i; j < dim; ++j) row[j] += axi * x[j];
  }
}

}  // namespace

const Kernels scalar_kernels = {
    dot_scalar, sum_scalar,   sumsq_scalar,    l1_scalar,
    linf_scalar, axpy_scalar, scale_scalar, syr_upper_scalar,
};

}  // namespace ylab::simd::detail
