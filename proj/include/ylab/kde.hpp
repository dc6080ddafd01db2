#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ylab/psd_matrix.hpp"

namespace ylab {

// Mesh study configuration for the uniform-data Gaussian-kernel density
// estimator on [a, 1-a]: mesh points x_j = a + (j-1) delta,
// N = floor(1 + (1 - 2a)/delta).
struct KdeGrid {
  KdeGrid(double a, double h, double delta, std::size_t n);

  double a;
  double h;
  double delta;
  std::size_t n;  // sample size
  std::vector<double> points;

  std::size_t mesh_size() const { return points.size(); }
};

struct KdeCovariance {
  KdeGrid grid;
  PsdMatrix exact;  // n h Var[S(X_delta)]
  std::optional<PsdMatrix> simulated;
  std::size_t resamples = 0;
};

// Closed-form scaled covariance: entry (j, l) equals
//   (1/2pi) exp(-(x_j - x_l)^2 / 4h^2) * int_{-(x_j+x_l)/2h}^{(2-x_j-x_l)/2h} e^{-t^2} dt
//   - h I(x_j) I(x_l),
// with I(x) = (1/sqrt(2 pi)) int_{-x/h}^{(1-x)/h} e^{-t^2/2} dt. Both
// integrals reduce to error functions.
KdeCovariance exact_cov(const KdeGrid& grid);

// Empirical covariance of sqrt(nh) (g_hat(x_j) - mean) across resamples of n
// iid Unif[0,1] samples. Resample r uses Rng(seed).substream(r).
PsdMatrix simulate_cov(const KdeGrid& grid, std::size_t resamples, std::uint64_t seed);

// 2 exp(-h^2/delta^2) + (h / (pi a delta)) exp(-a^2/h^2), the analytic upper
// bound on the minimum eigenvalue of the exact covariance.
double eigen_upper_bound(const KdeGrid& grid);

// sup_x |E g_hat(x) - 1| <= (h/a) sqrt(2/pi) exp(-a^2 / (2h^2)).
double bias_bound(const KdeGrid& grid);

struct MinEigenReport {
  double lambda_min_sim = 0.0;
  double lambda_min_exact = 0.0;
  double upper_bound = 0.0;
  double sim_se = 0.0;       // delta-method MC standard error of lambda_min_sim
  std::size_t rank_sim = 0;  // rank of the simulated covariance
  bool sim_exceeds_bound = false;  // lambda_min_sim > upper_bound + 3 se
};

MinEigenReport min_eigen_report(const KdeGrid& grid, std::size_t resamples, std::uint64_t seed);

}  // namespace ylab
