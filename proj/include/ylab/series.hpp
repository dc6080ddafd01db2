#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ylab/bands.hpp"
#include "ylab/matrix.hpp"

namespace ylab {

// Piecewise-polynomial basis on a uniform partition of [0, 1]: each of the
// k_cells cells carries an indicator (degree 0) and optionally a local
// coordinate scaled to [-1, 1] (degree 1), so the k = k_cells (degree+1)
// functions are locally supported and bounded by 1.
struct PartitionBasis {
  std::size_t cells = 10;
  int degree = 0;

  std::size_t size() const { return cells * static_cast<std::size_t>(degree + 1); }
  std::size_t cell_of(double w) const;
  // Writes the degree+1 local function values at w into vals.
  void evaluate(double w, double* vals) const;
};

// n E[p(W) p(W)^T] for W ~ Unif[0, 1]: block diagonal with per-cell blocks
// (1/cells) diag(1, 1/3). Used as the population H in tests and as the
// population score variance (times sigma^2) for homoskedastic designs.
Matrix population_gram(const PartitionBasis& basis, std::size_t n);

// Exact least squares on the partition basis. All per-cell blocks are kept
// factored; dense H_hat and Var_hat[S] are exposed for diagnostics.
class SeriesFit {
 public:
  SeriesFit(std::span<const double> w, std::span<const double> y, const PartitionBasis& basis);

  const PartitionBasis& basis() const { return basis_; }
  std::size_t sample_size() const { return cell_index_.size(); }
  std::span<const double> coefficients() const { return coef_; }
  std::span<const double> residuals() const { return residuals_; }
  std::span<const double> cell_sigma2() const { return sigma2_cell_; }

  double mu_hat(double w) const;
  // rho_hat(w, w) = p(w)' Hinv Var_hat[S] Hinv p(w)
  double rho_diag(double w) const;
  double sigma_at(double w) const;

  Matrix dense_h_hat() const;
  Matrix dense_var_s_hat() const;

  // Per-sample data needed by the multiplier bootstrap.
  std::span<const std::uint32_t> cell_index() const { return cell_index_; }
  const Matrix& sample_basis() const { return sample_basis_; }  // n x (degree+1)

  // Solves H_cell x = rhs for the cell's local block.
  void solve_cell(std::size_t cell, const double* rhs, double* x) const;

 private:
  PartitionBasis basis_;
  std::vector<std::uint32_t> cell_index_;
  Matrix sample_basis_;
  std::vector<double> coef_;
  std::vector<double> h_blocks_;     // cells x s x s, s = degree + 1
  std::vector<double> vars_blocks_;  // Var_hat[S] blocks, same layout
  std::vector<double> residuals_;
  std::vector<double> sigma2_cell_;
};

SeriesFit fit_series(std::span<const double> w, std::span<const double> y,
                     const PartitionBasis& basis);

// Gaussian multiplier bootstrap band: draws
//   G_b(w) = p(w)' Hinv sum_i p(W_i) sigma_hat(W_i) xi_bi,
// Studentizes by sqrt(rho_hat(w, w)), and inverts the empirical law of the
// supremum. Draw b uses Rng(seed).substream(b).
BandResult band_series(const SeriesFit& fit, double tau, std::span<const double> eval_grid,
                       std::size_t bootstrap_draws, std::uint64_t seed);

}  // namespace ylab
