#include "ylab/psd_matrix.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "ylab/errors.hpp"
#include "ylab/simd/kernels.hpp"

namespace ylab {

namespace {

using EigenRowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const EigenRowMajor> map_of(const Matrix& m) {
  return Eigen::Map<const EigenRowMajor>(m.data(), static_cast<Eigen::Index>(m.rows()),
                                         static_cast<Eigen::Index>(m.cols()));
}

}  // namespace

PsdMatrix::PsdMatrix(Matrix entries) {
  const std::size_t d = entries.rows();
  if (d == 0 || entries.cols() != d)
    throw invalid_input_error("PsdMatrix: entries must be square and nonempty");

  double scale = 0.0;
  for (double v : entries.span()) {
    if (!std::isfinite(v)) throw invalid_input_error("PsdMatrix: non-finite entry");
    scale = std::max(scale, std::fabs(v));
  }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j)
      if (std::fabs(entries(i, j) - entries(j, i)) > 1e-12 * std::max(scale, 1e-300))
        throw invalid_input_error("PsdMatrix: not symmetric to 1e-12 relative");

  // Symmetrize exactly before decomposing.
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) {
      const double v = 0.5 * (entries(i, j) + entries(j, i));
      entries(i, j) = v;
      entries(j, i) = v;
    }
  entries_ = std::move(entries);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(map_of(entries_));
  if (solver.info() != Eigen::Success)
    throw numeric_error("PsdMatrix: eigendecomposition failed");

  // Eigen returns ascending order; store descending.
  eigenvalues_.resize(d);
  eigenvectors_ = Matrix(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    const Eigen::Index src = static_cast<Eigen::Index>(d - 1 - j);
    eigenvalues_[j] = solver.eigenvalues()(src);
    for (std::size_t i = 0; i < d; ++i)
      eigenvectors_(i, j) = solver.eigenvectors()(static_cast<Eigen::Index>(i), src);
  }

  const double lambda_max = std::max(eigenvalues_.front(), 0.0);
  const double floor = -1e-10 * lambda_max;
  for (double& lambda : eigenvalues_) {
    if (lambda < floor)
      throw invalid_input_error("PsdMatrix: eigenvalue " + std::to_string(lambda) +
                                " below the PSD tolerance");
    if (lambda < 0.0) lambda = 0.0;
  }

  // Sign convention: first nonzero entry of each eigenvector positive.
  for (std::size_t j = 0; j < d; ++j) {
    double colmax = 0.0;
    for (std::size_t i = 0; i < d; ++i) colmax = std::max(colmax, std::fabs(eigenvectors_(i, j)));
    for (std::size_t i = 0; i < d; ++i) {
      if (std::fabs(eigenvectors_(i, j)) > 1e-12 * colmax) {
        if (eigenvectors_(i, j) < 0.0)
          for (std::size_t r = 0; r < d; ++r) eigenvectors_(r, j) = -eigenvectors_(r, j);
        break;
      }
    }
  }
}

PsdMatrix PsdMatrix::identity(std::size_t dim) { return PsdMatrix(Matrix::identity(dim)); }

PsdMatrix PsdMatrix::zero(std::size_t dim) { return PsdMatrix(Matrix(dim, dim, 0.0)); }

PsdMatrix PsdMatrix::diagonal(std::span<const double> diag) {
  Matrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return PsdMatrix(std::move(m));
}

double PsdMatrix::frobenius() const { return std::sqrt(simd::sumsq(entries_.span())); }

std::size_t PsdMatrix::rank() const {
  const double tol = 1e-12 * max_eigenvalue();
  std::size_t r = 0;
  for (double lambda : eigenvalues_)
    if (lambda > tol) ++r;
  return r;
}

Matrix PsdMatrix::sampling_factor() const {
  const std::size_t d = dim();
  Eigen::LLT<Eigen::MatrixXd> llt(map_of(entries_));
  Matrix out(d, d);
  if (llt.info() == Eigen::Success) {
    Eigen::MatrixXd lower = llt.matrixL();
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j <= i; ++j)
        out(i, j) = lower(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return out;
  }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      out(i, j) = eigenvectors_(i, j) * std::sqrt(eigenvalues_[j]);
  return out;
}

PsdMatrix psd_sqrt(const PsdMatrix& m) {
  const std::size_t d = m.dim();
  // V sqrt(Lambda) V^T, assembled through the clamped decomposition.
  Matrix out(d, d);
  const Matrix& vec = m.eigenvectors();
  std::vector<double> sqrt_ev(d);
  for (std::size_t j = 0; j < d; ++j) sqrt_ev[j] = std::sqrt(m.eigenvalues()[j]);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < d; ++k) acc += vec(i, k) * sqrt_ev[k] * vec(j, k);
      out(i, j) = acc;
      out(j, i) = acc;
    }
  return PsdMatrix(std::move(out));
}

bool cholesky_lower(const Matrix& a, Matrix& lower) {
  const std::size_t d = a.rows();
  lower = Matrix(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    double diag = a(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= lower(j, k) * lower(j, k);
    if (!(diag > 0.0)) return false;
    const double root = std::sqrt(diag);
    lower(j, j) = root;
    for (std::size_t i = j + 1; i < d; ++i) {
      double acc = a(i, j);
      for (std::size_t k = 0; k < j; ++k) acc -= lower(i, k) * lower(j, k);
      lower(i, j) = acc / root;
    }
  }
  return true;
}

Matrix gaussian_factor(const Matrix& sym) {
  Matrix lower;
  if (cholesky_lower(sym, lower)) return lower;
  const PsdMatrix psd{Matrix(sym)};
  const std::size_t d = psd.dim();
  Matrix out(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      out(i, j) = psd.eigenvectors()(i, j) * std::sqrt(psd.eigenvalues()[j]);
  return out;
}

double symmetric_spectral_norm(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(map_of(a), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw numeric_error("symmetric_spectral_norm: eigendecomposition failed");
  double m = 0.0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i)
    m = std::max(m, std::fabs(solver.eigenvalues()(i)));
  return m;
}

double sqrt_perturbation_check(const PsdMatrix& sigma, double nu) {
  if (!(nu > 0.0)) throw invalid_input_error("sqrt_perturbation_check: nu must be > 0");
  const std::size_t d = sigma.dim();
  Matrix shifted = sigma.entries();
  for (std::size_t i = 0; i < d; ++i) shifted(i, i) += nu * nu;
  const PsdMatrix root_shifted = psd_sqrt(PsdMatrix(std::move(shifted)));
  const PsdMatrix root = psd_sqrt(sigma);
  Matrix diff(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) diff(i, j) = root_shifted(i, j) - root(i, j);
  return symmetric_spectral_norm(diff);
}

}  // namespace ylab
