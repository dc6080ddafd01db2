#include "ylab/pnorm.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "ylab/errors.hpp"
#include "ylab/simd/kernels.hpp"

namespace ylab {

PNorm PNorm::finite(double p) {
  if (!(p >= 1.0) || !std::isfinite(p))
    throw invalid_input_error("PNorm: p must be finite and >= 1, got " + std::to_string(p));
  return PNorm(p, false);
}

PNorm PNorm::inf() { return PNorm(0.0, true); }

PNorm PNorm::parse(const std::string& text) {
  std::string t = text;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "inf" || t == "infinity") return inf();
  try {
    return finite(std::stod(t));
  } catch (const std::exception&) {
    throw invalid_input_error("PNorm: cannot parse '" + text + "'");
  }
}

std::string PNorm::to_string() const {
  if (inf_) return "inf";
  if (p_ == static_cast<long long>(p_)) return std::to_string(static_cast<long long>(p_));
  return std::to_string(p_);
}

double lp_norm(std::span<const double> v, const PNorm& p) {
  if (p.is_inf()) return simd::linf(v);
  const double pv = p.value();
  if (pv == 1.0) return simd::l1(v);
  if (pv == 2.0) return std::sqrt(simd::sumsq(v));
  double acc = 0.0;
  for (double x : v) acc += std::pow(std::fabs(x), pv);
  return std::pow(acc, 1.0 / pv);
}

double phi_p(const PNorm& p, std::size_t d) {
  if (d < 1) throw invalid_input_error("phi_p: d must be >= 1");
  const double dd = static_cast<double>(d);
  if (p.is_inf()) return std::sqrt(2.0 * std::log(2.0 * dd));
  return std::sqrt(p.value() * std::pow(dd, 2.0 / p.value()));
}

double matrix_opnorm(std::span<const double> a, std::size_t dim, const PNorm& p) {
  auto col_sum_max = [&] {
    double m = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < dim; ++i) s += std::fabs(a[i * dim + j]);
      m = std::max(m, s);
    }
    return m;
  };
  auto row_sum_max = [&] {
    double m = 0.0;
    for (std::size_t i = 0; i < dim; ++i) m = std::max(m, simd::l1(a.subspan(i * dim, dim)));
    return m;
  };

  if (p.is_inf()) return row_sum_max();
  const double pv = p.value();
  if (pv == 1.0) return col_sum_max();
  if (pv == 2.0) {
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(
        a.data(), static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    return svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
  }
  // Interpolation upper bound for the remaining p.
  const double n1 = col_sum_max();
  const double ninf = row_sum_max();
  if (n1 == 0.0 || ninf == 0.0) return 0.0;
  return std::pow(n1, 1.0 / pv) * std::pow(ninf, 1.0 - 1.0 / pv);
}

}  // namespace ylab
