#pragma once

#include <span>
#include <vector>

#include "ylab/matrix.hpp"

namespace ylab {

// Symmetric positive semi-definite matrix with a cached eigendecomposition.
//
// Construction validates symmetry to 1e-12 relative and finiteness, then
// eigendecomposes. Eigenvalues in [-1e-10 * lambda_max, 0) are clamped to 0;
// anything more negative is rejected. Eigenvalues are stored descending and
// each eigenvector's first nonzero entry is made positive, so the
// decomposition (and hence the square root) is reproducible.
class PsdMatrix {
 public:
  explicit PsdMatrix(Matrix entries);

  static PsdMatrix identity(std::size_t dim);
  static PsdMatrix zero(std::size_t dim);
  static PsdMatrix diagonal(std::span<const double> diag);

  std::size_t dim() const { return entries_.rows(); }
  const Matrix& entries() const { return entries_; }
  double operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }

  // Descending, clamped to [0, inf).
  std::span<const double> eigenvalues() const { return eigenvalues_; }
  // Column j corresponds to eigenvalues()[j].
  const Matrix& eigenvectors() const { return eigenvectors_; }

  double min_eigenvalue() const { return eigenvalues_.back(); }
  double max_eigenvalue() const { return eigenvalues_.front(); }
  // For a PSD matrix the spectral norm is the top eigenvalue.
  double spectral_norm() const { return eigenvalues_.empty() ? 0.0 : eigenvalues_.front(); }
  double frobenius() const;

  // Number of eigenvalues above 1e-12 * lambda_max.
  std::size_t rank() const;

  // A factor A with A A^T equal to this matrix, for sampling N(0, Sigma):
  // the Cholesky factor when positive definite, else V sqrt(Lambda).
  // Cholesky is preferred because chol(D M D) = D chol(M) for diagonal D > 0,
  // which some invariance tests rely on.
  Matrix sampling_factor() const;

 private:
  PsdMatrix() = default;
  Matrix entries_;
  std::vector<double> eigenvalues_;
  Matrix eigenvectors_;
};

// Unique PSD square root via the cached eigendecomposition.
PsdMatrix psd_sqrt(const PsdMatrix& m);

// Plain dense Cholesky; returns false when the matrix is not positive
// definite. Cheaper than going through PsdMatrix for small per-step
// variance matrices.
bool cholesky_lower(const Matrix& a, Matrix& lower);

// A factor A with A A^T = sym: the Cholesky factor when positive definite,
// otherwise V sqrt(Lambda) from the clamped eigendecomposition.
Matrix gaussian_factor(const Matrix& sym);

// Spectral norm of a symmetric matrix given as a dense row-major buffer.
double symmetric_spectral_norm(const Matrix& a);

// ||(Sigma + nu^2 I)^(1/2) - Sigma^(1/2)||_2, computed through the matrix
// square roots. Always <= nu.
double sqrt_perturbation_check(const PsdMatrix& sigma, double nu);

}  // namespace ylab
