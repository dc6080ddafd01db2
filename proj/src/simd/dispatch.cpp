#include "ylab/simd/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace ylab::simd {

namespace detail {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

Backend select_backend() {
  const char* env = std::getenv("YLAB_SIMD");
  if (env != nullptr) {
    if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
    if (std::strcmp(env, "avx2") == 0 && cpu_has_avx2()) return Backend::avx2;
    // "auto" or anything unrecognized falls through to detection.
  }
  return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

struct Dispatch {
  Backend backend;
  const Kernels* k;
  Dispatch() : backend(select_backend()) {
    k = backend == Backend::avx2 ? &avx2_kernels : &scalar_kernels;
  }
};

const Dispatch& dispatch() {
  static const Dispatch d;
  return d;
}

}  // namespace
}  // namespace detail

Backend active_backend() { return detail::dispatch().backend; }

const char* backend_name() {
  return active_backend() == Backend::avx2 ? "avx2" : "scalar";
}

double dot(std::span<const double> x, std::span<const double> y) {
  return detail::dispatch().k->dot(x.data(), y.data(), x.size());
}

double sum(std::span<const double> x) {
  return detail::dispatch().k->sum(x.data(), x.size());
}

double sumsq(std::span<const double> x) {
  return detail::dispatch().k->sumsq(x.data(), x.size());
}

double l1(std::span<const double> x) {
  return detail::dispatch().k->l1(x.data(), x.size());
}

double linf(std::span<const double> x) {
  return detail::dispatch().k->linf(x.data(), x.size());
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  detail::dispatch().k->axpy(a, x.data(), y.data(), x.size());
}

void scale(double a, std::span<double> x) {
  detail::dispatch().k->scale(a, x.data(), x.size());
}

void syr_upper(double alpha, std::span<const double> x, double* a, std::size_t dim) {
  detail::dispatch().k->syr_upper(alpha, x.data(), a, dim);
}

}  // namespace ylab::simd
