#include "ylab/series.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "ylab/errors.hpp"
#include "ylab/parallel.hpp"
#include "ylab/rng.hpp"

namespace ylab {

std::size_t PartitionBasis::cell_of(double w) const {
  const double scaled = w * static_cast<double>(cells);
  auto cell = static_cast<std::size_t>(scaled);
  return std::min(cell, cells - 1);
}

void PartitionBasis::evaluate(double w, double* vals) const {
  vals[0] = 1.0;
  if (degree == 1) {
    const std::size_t c = cell_of(w);
    const double width = 1.0 / static_cast<double>(cells);
    const double center = (static_cast<double>(c) + 0.5) * width;
    vals[1] = (w - center) / (0.5 * width);
  }
}

Matrix population_gram(const PartitionBasis& basis, std::size_t n) {
  const std::size_t k = basis.size();
  const std::size_t s = static_cast<std::size_t>(basis.degree + 1);
  Matrix h(k, k);
  const double mass = static_cast<double>(n) / static_cast<double>(basis.cells);
  for (std::size_t c = 0; c < basis.cells; ++c) {
    h(c * s, c * s) = mass;
    if (basis.degree == 1) h(c * s + 1, c * s + 1) = mass / 3.0;
  }
  return h;
}

SeriesFit::SeriesFit(std::span<const double> w, std::span<const double> y,
                     const PartitionBasis& basis)
    : basis_(basis) {
  const std::size_t n = w.size();
  if (n != y.size() || n == 0) throw invalid_input_error("fit_series: bad data shape");
  if (basis.cells == 0 || (basis.degree != 0 && basis.degree != 1))
    throw invalid_input_error("fit_series: basis must have cells >= 1 and degree in {0, 1}");
  for (double wi : w)
    if (!(wi >= 0.0 && wi <= 1.0))
      throw invalid_input_error("fit_series: regressors must lie in [0, 1]");

  const std::size_t s = static_cast<std::size_t>(basis.degree + 1);
  const std::size_t k = basis.size();

  cell_index_.resize(n);
  sample_basis_ = Matrix(n, s);
  std::vector<std::set<double>> distinct(basis.cells);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = basis.cell_of(w[i]);
    cell_index_[i] = static_cast<std::uint32_t>(c);
    basis.evaluate(w[i], sample_basis_.data() + i * s);
    if (distinct[c].size() <= s) distinct[c].insert(w[i]);
  }
  for (std::size_t c = 0; c < basis.cells; ++c)
    if (distinct[c].size() < s)
      throw numeric_error("fit_series: cell " + std::to_string(c) + " has " +
                          std::to_string(distinct[c].size()) +
                          " distinct regressor value(s), needs " + std::to_string(s));

  // Assemble per-cell normal equations.
  h_blocks_.assign(basis.cells * s * s, 0.0);
  std::vector<double> rhs(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = cell_index_[i];
    const double* p = sample_basis_.data() + i * s;
    double* block = h_blocks_.data() + c * s * s;
    for (std::size_t a = 0; a < s; ++a) {
      for (std::size_t b = 0; b < s; ++b) block[a * s + b] += p[a] * p[b];
      rhs[c * s + a] += p[a] * y[i];
    }
  }

  coef_.resize(k);
  for (std::size_t c = 0; c < basis.cells; ++c) solve_cell(c, rhs.data() + c * s, coef_.data() + c * s);

  residuals_.resize(n);
  sigma2_cell_.assign(basis.cells, 0.0);
  std::vector<std::size_t> counts(basis.cells, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = cell_index_[i];
    const double* p = sample_basis_.data() + i * s;
    double fitted = 0.0;
    for (std::size_t a = 0; a < s; ++a) fitted += p[a] * coef_[c * s + a];
    residuals_[i] = y[i] - fitted;
    sigma2_cell_[c] += residuals_[i] * residuals_[i];
    ++counts[c];
  }
  for (std::size_t c = 0; c < basis.cells; ++c)
    sigma2_cell_[c] /= static_cast<double>(counts[c]);

  // Plug-in Var_hat[S] = sum_i p(W_i) p(W_i)' sigma_hat^2(W_i); sigma_hat is
  // the per-cell local-constant estimator, so this is blockwise too.
  vars_blocks_.assign(basis.cells * s * s, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = cell_index_[i];
    const double* p = sample_basis_.data() + i * s;
    double* block = vars_blocks_.data() + c * s * s;
    const double s2 = sigma2_cell_[c];
    for (std::size_t a = 0; a < s; ++a)
      for (std::size_t b = 0; b < s; ++b) block[a * s + b] += p[a] * p[b] * s2;
  }
}

void SeriesFit::solve_cell(std::size_t cell, const double* rhs, double* x) const {
  const std::size_t s = static_cast<std::size_t>(basis_.degree + 1);
  const double* block = h_blocks_.data() + cell * s * s;
  if (s == 1) {
    if (block[0] == 0.0)
      throw numeric_error("fit_series: cell " + std::to_string(cell) + " is empty");
    x[0] = rhs[0] / block[0];
    return;
  }
  const double det = block[0] * block[3] - block[1] * block[2];
  if (det == 0.0)
    throw numeric_error("fit_series: singular normal equations in cell " + std::to_string(cell));
  x[0] = (block[3] * rhs[0] - block[1] * rhs[1]) / det;
  x[1] = (block[0] * rhs[1] - block[2] * rhs[0]) / det;
}

double SeriesFit::mu_hat(double w) const {
  const std::size_t s = static_cast<std::size_t>(basis_.degree + 1);
  const std::size_t c = basis_.cell_of(w);
  double p[2];
  basis_.evaluate(w, p);
  double acc = 0.0;
  for (std::size_t a = 0; a < s; ++a) acc += p[a] * coef_[c * s + a];
  return acc;
}

double SeriesFit::rho_diag(double w) const {
  const std::size_t s = static_cast<std::size_t>(basis_.degree + 1);
  const std::size_t c = basis_.cell_of(w);
  double p[2];
  basis_.evaluate(w, p);
  double hp[2];
  solve_cell(c, p, hp);
  const double* vb = vars_blocks_.data() + c * s * s;
  double acc = 0.0;
  for (std::size_t a = 0; a < s; ++a)
    for (std::size_t b = 0; b < s; ++b) acc += hp[a] * vb[a * s + b] * hp[b];
  return acc;
}

double SeriesFit::sigma_at(double w) const {
  return std::sqrt(sigma2_cell_[basis_.cell_of(w)]);
}

Matrix SeriesFit::dense_h_hat() const {
  const std::size_t s = static_cast<std::size_t>(basis_.degree + 1);
  Matrix h(basis_.size(), basis_.size());
  for (std::size_t c = 0; c < basis_.cells; ++c)
    for (std::size_t a = 0; a < s; ++a)
      for (std::size_t b = 0; b < s; ++b)
        h(c * s + a, c * s + b) = h_blocks_[c * s * s + a * s + b];
  return h;
}

Matrix SeriesFit::dense_var_s_hat() const {
  const std::size_t s = static_cast<std::size_t>(basis_.degree + 1);
  Matrix v(basis_.size(), basis_.size());
  for (std::size_t c = 0; c < basis_.cells; ++c)
    for (std::size_t a = 0; a < s; ++a)
      for (std::size_t b = 0; b < s; ++b)
        v(c * s + a, c * s + b) = vars_blocks_[c * s * s + a * s + b];
  return v;
}

SeriesFit fit_series(std::span<const double> w, std::span<const double> y,
                     const PartitionBasis& basis) {
  return SeriesFit(w, y, basis);
}

BandResult band_series(const SeriesFit& fit, double tau, std::span<const double> eval_grid,
                       std::size_t bootstrap_draws, std::uint64_t seed) {
  if (!(tau > 0.0 && tau < 1.0)) throw invalid_input_error("band_series: tau must lie in (0, 1)");
  if (bootstrap_draws < 100)
    throw invalid_input_error("band_series: bootstrap_draws must be >= 100");
  if (eval_grid.empty()) throw invalid_input_error("band_series: empty eval grid");

  const PartitionBasis& basis = fit.basis();
  const std::size_t s = static_cast<std::size_t>(basis.degree + 1);
  const std::size_t g = eval_grid.size();
  const std::size_t n = fit.sample_size();

  BandResult out;
  out.tau = tau;
  out.bootstrap_draws = bootstrap_draws;
  out.eval_grid.assign(eval_grid.begin(), eval_grid.end());
  out.mu_hat.resize(g);
  out.rho_diag.resize(g);

  // Per grid point: Hinv p(w) and the Studentizing scale.
  std::vector<double> hinv_p(g * s);
  std::vector<std::uint32_t> grid_cell(g);
  for (std::size_t j = 0; j < g; ++j) {
    const double w = eval_grid[j];
    out.mu_hat[j] = fit.mu_hat(w);
    out.rho_diag[j] = fit.rho_diag(w);
    if (!(out.rho_diag[j] > 0.0))
      throw numeric_error("band_series: degenerate variance at w = " + std::to_string(w));
    grid_cell[j] = static_cast<std::uint32_t>(basis.cell_of(w));
    double p[2];
    basis.evaluate(w, p);
    fit.solve_cell(grid_cell[j], p, hinv_p.data() + j * s);
  }

  // sigma_hat(W_i) p(W_i), flattened per sample.
  std::vector<double> scaled_basis(n * s);
  for (std::size_t i = 0; i < n; ++i) {
    const double sig = std::sqrt(fit.cell_sigma2()[fit.cell_index()[i]]);
    for (std::size_t a = 0; a < s; ++a)
      scaled_basis[i * s + a] = sig * fit.sample_basis()(i, a);
  }

  std::vector<double> sup(bootstrap_draws);
  const Rng base(seed);
  const std::size_t k = basis.size();
  parallel_for(bootstrap_draws, [&](std::size_t b) {
    Rng rng = base.substream(b);
    std::vector<double> score(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double xi = rng.gaussian();
      const std::size_t c = fit.cell_index()[i];
      for (std::size_t a = 0; a < s; ++a) score[c * s + a] += scaled_basis[i * s + a] * xi;
    }
    double worst = 0.0;
    for (std::size_t j = 0; j < g; ++j) {
      const double* hp = hinv_p.data() + j * s;
      const double* sc = score.data() + grid_cell[j] * s;
      double val = 0.0;
      for (std::size_t a = 0; a < s; ++a) val += hp[a] * sc[a];
      worst = std::max(worst, std::fabs(val) / std::sqrt(out.rho_diag[j]));
    }
    sup[b] = worst;
  });

  out.q_tau = empirical_quantile(std::move(sup), tau);
  out.lower.resize(g);
  out.upper.resize(g);
  for (std::size_t j = 0; j < g; ++j) {
    const double half = out.q_tau * std::sqrt(out.rho_diag[j]);
    out.lower[j] = out.mu_hat[j] - half;
    out.upper[j] = out.mu_hat[j] + half;
  }
  return out;
}

}  // namespace ylab
