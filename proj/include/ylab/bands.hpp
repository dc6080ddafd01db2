#pragma once

#include <cstddef>
#include <vector>

namespace ylab {

// Uniform confidence band on an evaluation grid. upper - lower equals
// 2 q_tau sqrt(rho_diag) pointwise.
struct BandResult {
  std::vector<double> eval_grid;
  std::vector<double> mu_hat;
  std::vector<double> rho_diag;  // estimated pointwise variance rho_hat(w, w)
  std::vector<double> lower;
  std::vector<double> upper;
  double q_tau = 0.0;
  double tau = 0.0;
  std::size_t bootstrap_draws = 0;
};

// Inverted-ECDF empirical quantile: smallest t with P_hat(X <= t) >= tau.
// Sorts a copy of values.
double empirical_quantile(std::vector<double> values, double tau);

// 101 equispaced points on [lo, hi], the default band discretization.
std::vector<double> default_eval_grid(double lo = 0.05, double hi = 0.95,
                                      std::size_t count = 101);

}  // namespace ylab
