#pragma once

#include <span>

#include "ylab/pnorm.hpp"
#include "ylab/psd_matrix.hpp"
#include "ylab/rng.hpp"

namespace ylab {

// Zero-mean multivariate Gaussian with a cached sampling factor.
class GaussianLaw {
 public:
  explicit GaussianLaw(PsdMatrix cov);

  std::size_t dim() const { return cov_.dim(); }
  const PsdMatrix& cov() const { return cov_; }

  // Fills out with one draw, consuming dim() gaussians from rng.
  void sample(Rng& rng, std::span<double> out) const;

 private:
  PsdMatrix cov_;
  Matrix factor_;
};

// phi_p(d) * max_j sqrt(cov_jj); an upper bound for E||X||_p, X ~ N(0, cov).
double gaussian_pnorm_mean_bound(const PsdMatrix& cov, const PNorm& p);

// Tail bound for ||(s1^(1/2) - s2^(1/2)) Z||_p:
// min(1, 2d exp(-t^2 / (2 d^(2/p) ||s1^(1/2) - s2^(1/2)||_2^2))),
// with the convention that identical covariances give 0.
double gaussian_gaussian_tail_bound(const PsdMatrix& s1, const PsdMatrix& s2, const PNorm& p,
                                    double t);

// d^(2/p) with the p = inf limit equal to 1.
double dim_power(const PNorm& p, std::size_t d);

}  // namespace ylab
