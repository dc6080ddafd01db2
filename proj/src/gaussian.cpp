#include "ylab/gaussian.hpp"

#include <cmath>
#include <vector>

#include "ylab/errors.hpp"

namespace ylab {

GaussianLaw::GaussianLaw(PsdMatrix cov) : cov_(std::move(cov)), factor_(cov_.sampling_factor()) {}

void GaussianLaw::sample(Rng& rng, std::span<double> out) const {
  const std::size_t d = dim();
  if (out.size() != d) throw invalid_input_error("GaussianLaw::sample: output size mismatch");
  std::vector<double> z(d);
  for (std::size_t i = 0; i < d; ++i) z[i] = rng.gaussian();
  for (std::size_t i = 0; i < d; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < d; ++k) acc += factor_(i, k) * z[k];
    out[i] = acc;
  }
}

double dim_power(const PNorm& p, std::size_t d) {
  if (p.is_inf()) return 1.0;
  return std::pow(static_cast<double>(d), 2.0 / p.value());
}

double gaussian_pnorm_mean_bound(const PsdMatrix& cov, const PNorm& p) {
  double max_var = 0.0;
  for (std::size_t j = 0; j < cov.dim(); ++j) max_var = std::max(max_var, cov(j, j));
  return phi_p(p, cov.dim()) * std::sqrt(max_var);
}

double gaussian_gaussian_tail_bound(const PsdMatrix& s1, const PsdMatrix& s2, const PNorm& p,
                                    double t) {
  if (s1.dim() != s2.dim())
    throw invalid_input_error("gaussian_gaussian_tail_bound: dimension mismatch");
  if (!(t > 0.0)) throw invalid_input_error("gaussian_gaussian_tail_bound: t must be > 0");
  const std::size_t d = s1.dim();
  const PsdMatrix r1 = psd_sqrt(s1);
  const PsdMatrix r2 = psd_sqrt(s2);
  Matrix diff(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) diff(i, j) = r1(i, j) - r2(i, j);
  const double gap = symmetric_spectral_norm(diff);
  if (gap == 0.0) return 0.0;  // exponent is -inf by convention
  const double expo = -t * t / (2.0 * dim_power(p, d) * gap * gap);
  return std::min(1.0, 2.0 * static_cast<double>(d) * std::exp(expo));
}

}  // namespace ylab
