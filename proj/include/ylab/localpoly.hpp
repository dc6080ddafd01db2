#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ylab/bands.hpp"
#include "ylab/matrix.hpp"

namespace ylab {

enum class KernelKind { epanechnikov, triangular };

double kernel_value(KernelKind kind, double u);

struct LocalPolySpec {
  int gamma = 1;      // polynomial order >= 1
  double h = 0.1;     // bandwidth > 0
  KernelKind kernel = KernelKind::epanechnikov;
};

// Local polynomial fit at a fixed evaluation grid. The estimator is linear
// in Y; the per-point weight vectors are exposed (in sorted-sample order,
// restricted to the kernel window) so the multiplier bootstrap can reuse
// them. Residual-based sigma_hat at the sample points comes from a
// kernel-weighted average of squared residuals over the same windows.
class LocalPolyFit {
 public:
  LocalPolyFit(std::span<const double> w, std::span<const double> y, const LocalPolySpec& spec,
               std::span<const double> eval_grid);

  const LocalPolySpec& spec() const { return spec_; }
  std::span<const double> eval_grid() const { return eval_grid_; }
  std::span<const double> mu_hat() const { return mu_hat_; }
  std::span<const double> rho_diag() const { return rho_diag_; }

  // Residuals and fitted values in the original sample order.
  std::span<const double> residuals() const { return residuals_; }
  std::span<const double> fitted() const { return fitted_; }

  std::size_t sample_size() const { return sorted_w_.size(); }

  // Weight row j covers sorted samples [window_begin(j), window_end(j)).
  std::span<const double> weight_row(std::size_t j) const;
  std::size_t window_begin(std::size_t j) const { return window_begin_[j]; }
  std::size_t window_end(std::size_t j) const { return window_end_[j]; }
  std::span<const double> sigma_at_sorted() const { return sigma_sorted_; }

 private:
  LocalPolySpec spec_;
  std::vector<double> eval_grid_;
  std::vector<double> sorted_w_;
  std::vector<double> sorted_y_;
  std::vector<std::uint32_t> original_index_;
  std::vector<double> mu_hat_;
  std::vector<double> rho_diag_;
  std::vector<double> residuals_;
  std::vector<double> fitted_;
  std::vector<double> sigma_sorted_;
  std::vector<double> weights_;  // g rows, row j occupies its window extent
  std::vector<std::size_t> weight_offset_, window_begin_, window_end_;
};

LocalPolyFit fit_localpoly(std::span<const double> w, std::span<const double> y,
                           const LocalPolySpec& spec, std::span<const double> eval_grid);

// Multiplier bootstrap on the exposed linear weights, Studentized by
// sqrt(rho_hat(w, w)); same conventions as band_series.
BandResult band_localpoly(const LocalPolyFit& fit, double tau, std::size_t bootstrap_draws,
                          std::uint64_t seed);

}  // namespace ylab
