#include "ylab/localpoly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ylab/errors.hpp"
#include "ylab/parallel.hpp"
#include "ylab/rng.hpp"
#include "ylab/simd/kernels.hpp"

namespace ylab {

double kernel_value(KernelKind kind, double u) {
  const double au = std::fabs(u);
  if (au >= 1.0) return 0.0;
  switch (kind) {
    case KernelKind::epanechnikov:
      return 0.75 * (1.0 - u * u);
    case KernelKind::triangular:
      return 1.0 - au;
  }
  return 0.0;
}

namespace {

// Solves the symmetric positive definite system a x = e1 in place;
// a is s x s row-major. Returns false when not positive definite.
bool solve_spd_e1(std::vector<double>& a, std::size_t s, std::vector<double>& x) {
  // In-place Cholesky.
  for (std::size_t j = 0; j < s; ++j) {
    double diag = a[j * s + j];
    for (std::size_t k = 0; k < j; ++k) diag -= a[j * s + k] * a[j * s + k];
    if (!(diag > 0.0)) return false;
    const double root = std::sqrt(diag);
    a[j * s + j] = root;
    for (std::size_t i = j + 1; i < s; ++i) {
      double acc = a[i * s + j];
      for (std::size_t k = 0; k < j; ++k) acc -= a[i * s + k] * a[j * s + k];
      a[i * s + j] = acc / root;
    }
  }
  x.assign(s, 0.0);
  // Forward solve L z = e1, then backward solve L^T x = z.
  for (std::size_t i = 0; i < s; ++i) {
    double acc = i == 0 ? 1.0 : 0.0;
    for (std::size_t k = 0; k < i; ++k) acc -= a[i * s + k] * x[k];
    x[i] = acc / a[i * s + i];
  }
  for (std::size_t ii = s; ii-- > 0;) {
    double acc = x[ii];
    for (std::size_t k = ii + 1; k < s; ++k) acc -= a[k * s + ii] * x[k];
    x[ii] = acc / a[ii * s + ii];
  }
  return true;
}

}  // namespace

LocalPolyFit::LocalPolyFit(std::span<const double> w, std::span<const double> y,
                           const LocalPolySpec& spec, std::span<const double> eval_grid)
    : spec_(spec), eval_grid_(eval_grid.begin(), eval_grid.end()) {
  const std::size_t n = w.size();
  if (n == 0 || n != y.size()) throw invalid_input_error("fit_localpoly: bad data shape");
  if (spec.gamma < 1) throw invalid_input_error("fit_localpoly: gamma must be >= 1");
  if (!(spec.h > 0.0)) throw invalid_input_error("fit_localpoly: h must be > 0");
  if (eval_grid_.empty()) throw invalid_input_error("fit_localpoly: empty eval grid");

  original_index_.resize(n);
  std::iota(original_index_.begin(), original_index_.end(), 0u);
  std::sort(original_index_.begin(), original_index_.end(),
            [&](std::uint32_t a, std::uint32_t b) { return w[a] < w[b]; });
  sorted_w_.resize(n);
  sorted_y_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    sorted_w_[i] = w[original_index_[i]];
    sorted_y_[i] = y[original_index_[i]];
  }

  const std::size_t s = static_cast<std::size_t>(spec.gamma + 1);
  const double h = spec.h;

  // Inverse factorials for the monomial basis u^j / j!.
  std::vector<double> inv_fact(s, 1.0);
  for (std::size_t j = 1; j < s; ++j) inv_fact[j] = inv_fact[j - 1] / static_cast<double>(j);

  std::vector<double> gram(s * s);
  std::vector<double> e1_row(s);
  std::vector<double> basis(s);

  // Linear smoother at an arbitrary point: fills weights over the window
  // [begin, end) of sorted samples and returns the fitted value.
  auto smooth_at = [&](double point, std::size_t& begin, std::size_t& end,
                       double* weight_out) -> double {
    begin = static_cast<std::size_t>(
        std::lower_bound(sorted_w_.begin(), sorted_w_.end(), point - h) - sorted_w_.begin());
    end = static_cast<std::size_t>(
        std::upper_bound(sorted_w_.begin(), sorted_w_.end(), point + h) - sorted_w_.begin());

    std::size_t effective = 0;
    std::fill(gram.begin(), gram.end(), 0.0);
    for (std::size_t i = begin; i < end; ++i) {
      const double u = (sorted_w_[i] - point) / h;
      const double kw = kernel_value(spec_.kernel, u) / h;
      if (kw <= 0.0) continue;
      ++effective;
      double pw = 1.0;
      for (std::size_t a = 0; a < s; ++a) {
        basis[a] = pw * inv_fact[a];
        pw *= u;
      }
      for (std::size_t a = 0; a < s; ++a)
        for (std::size_t b = a; b < s; ++b) gram[a * s + b] += kw * basis[a] * basis[b];
    }
    for (std::size_t a = 0; a < s; ++a)
      for (std::size_t b = 0; b < a; ++b) gram[a * s + b] = gram[b * s + a];

    if (effective < s)
      throw numeric_error("fit_localpoly: window at w = " + std::to_string(point) + " holds " +
                          std::to_string(effective) + " point(s), needs " + std::to_string(s));
    if (!solve_spd_e1(gram, s, e1_row))
      throw numeric_error("fit_localpoly: singular local system at w = " + std::to_string(point));

    double fitted = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      const double u = (sorted_w_[i] - point) / h;
      const double kw = kernel_value(spec_.kernel, u) / h;
      double acc = 0.0;
      double pw = 1.0;
      for (std::size_t a = 0; a < s; ++a) {
        acc += e1_row[a] * pw * inv_fact[a];
        pw *= u;
      }
      const double weight = acc * kw;
      if (weight_out != nullptr) weight_out[i - begin] = weight;
      fitted += weight * sorted_y_[i];
    }
    return fitted;
  };

  // Pass 1: fitted values and residuals at the sample points.
  std::vector<double> resid_sorted(n);
  fitted_.resize(n);
  residuals_.resize(n);
  std::size_t b0, e0;
  for (std::size_t i = 0; i < n; ++i) {
    const double fit_i = smooth_at(sorted_w_[i], b0, e0, nullptr);
    resid_sorted[i] = sorted_y_[i] - fit_i;
    fitted_[original_index_[i]] = fit_i;
    residuals_[original_index_[i]] = sorted_y_[i] - fit_i;
  }

  // Pass 2: kernel-weighted local mean of squared residuals.
  sigma_sorted_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t begin = static_cast<std::size_t>(
        std::lower_bound(sorted_w_.begin(), sorted_w_.end(), sorted_w_[i] - h) - sorted_w_.begin());
    const std::size_t end = static_cast<std::size_t>(
        std::upper_bound(sorted_w_.begin(), sorted_w_.end(), sorted_w_[i] + h) - sorted_w_.begin());
    double num = 0.0, den = 0.0;
    for (std::size_t j = begin; j < end; ++j) {
      const double kw = kernel_value(spec_.kernel, (sorted_w_[j] - sorted_w_[i]) / h);
      num += kw * resid_sorted[j] * resid_sorted[j];
      den += kw;
    }
    sigma_sorted_[i] = den > 0.0 ? std::sqrt(num / den) : 0.0;
  }

  // Pass 3: weights and curve on the evaluation grid.
  const std::size_t g = eval_grid_.size();
  mu_hat_.resize(g);
  rho_diag_.resize(g);
  window_begin_.resize(g);
  window_end_.resize(g);
  weight_offset_.resize(g);
  std::vector<double> row(n);
  for (std::size_t j = 0; j < g; ++j) {
    std::size_t begin, end;
    mu_hat_[j] = smooth_at(eval_grid_[j], begin, end, row.data());
    window_begin_[j] = begin;
    window_end_[j] = end;
    weight_offset_[j] = weights_.size();
    weights_.insert(weights_.end(), row.begin(), row.begin() + (end - begin));
    double rho = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      const double ws = row[i - begin] * sigma_sorted_[i];
      rho += ws * ws;
    }
    rho_diag_[j] = rho;
  }
}

std::span<const double> LocalPolyFit::weight_row(std::size_t j) const {
  return std::span<const double>(weights_).subspan(weight_offset_[j],
                                                   window_end_[j] - window_begin_[j]);
}

LocalPolyFit fit_localpoly(std::span<const double> w, std::span<const double> y,
                           const LocalPolySpec& spec, std::span<const double> eval_grid) {
  return LocalPolyFit(w, y, spec, eval_grid);
}

BandResult band_localpoly(const LocalPolyFit& fit, double tau, std::size_t bootstrap_draws,
                          std::uint64_t seed) {
  if (!(tau > 0.0 && tau < 1.0))
    throw invalid_input_error("band_localpoly: tau must lie in (0, 1)");
  if (bootstrap_draws < 100)
    throw invalid_input_error("band_localpoly: bootstrap_draws must be >= 100");

  const std::size_t g = fit.eval_grid().size();
  const std::size_t n = fit.sample_size();

  BandResult out;
  out.tau = tau;
  out.bootstrap_draws = bootstrap_draws;
  out.eval_grid.assign(fit.eval_grid().begin(), fit.eval_grid().end());
  out.mu_hat.assign(fit.mu_hat().begin(), fit.mu_hat().end());
  out.rho_diag.assign(fit.rho_diag().begin(), fit.rho_diag().end());
  for (std::size_t j = 0; j < g; ++j)
    if (!(out.rho_diag[j] > 0.0))
      throw numeric_error("band_localpoly: degenerate variance at w = " +
                          std::to_string(out.eval_grid[j]));

  // sigma-scaled weight rows, reused by every draw.
  std::vector<double> scaled;
  std::vector<std::size_t> offset(g);
  for (std::size_t j = 0; j < g; ++j) {
    offset[j] = scaled.size();
    const auto row = fit.weight_row(j);
    const std::size_t begin = fit.window_begin(j);
    for (std::size_t i = 0; i < row.size(); ++i)
      scaled.push_back(row[i] * fit.sigma_at_sorted()[begin + i]);
  }

  std::vector<double> sup(bootstrap_draws);
  const Rng base(seed);
  parallel_for(bootstrap_draws, [&](std::size_t b) {
    Rng rng = base.substream(b);
    std::vector<double> xi(n);
    for (std::size_t i = 0; i < n; ++i) xi[i] = rng.gaussian();
    double worst = 0.0;
    for (std::size_t j = 0; j < g; ++j) {
      const std::size_t len = fit.window_end(j) - fit.window_begin(j);
      const double val =
          simd::dot(std::span<const double>(scaled).subspan(offset[j], len),
                    std::span<const double>(xi).subspan(fit.window_begin(j), len));
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
