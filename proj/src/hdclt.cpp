#include "ylab/hdclt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ylab/bands.hpp"
#include "ylab/errors.hpp"
#include "ylab/gaussian.hpp"
#include "ylab/rng.hpp"

namespace ylab {

namespace {

double invertible_inverse_frobenius(const PsdMatrix& sigma) {
  double acc = 0.0;
  for (double lambda : sigma.eigenvalues()) {
    if (!(lambda > 0.0))
      throw invalid_input_error("delta_perimetric: convex class requires invertible Sigma");
    acc += 1.0 / (lambda * lambda);
  }
  return std::sqrt(acc);
}

}  // namespace

std::string SetClassSpec::name() const {
  switch (kind_) {
    case Kind::convex:
      return "convex";
    case Kind::rectangles:
      return "rectangles";
    case Kind::lp_balls:
      return "lp_balls(" + ball_p_.to_string() + ")";
  }
  return "unknown";
}

double gamma_p(const MomentInputs& m, double eta) {
  if (!(eta > 0.0)) throw invalid_input_error("gamma_p: eta must be > 0");
  const double phi = phi_p(m.p, m.d);
  return 24.0 * std::cbrt(m.beta_p2 * phi * phi / (eta * eta * eta)) +
         17.0 * std::cbrt(m.omega_mean_norm * phi * phi / (eta * eta));
}

double lp_norm_variance_mc(const PsdMatrix& sigma, const PNorm& p, std::size_t draws,
                           std::uint64_t seed) {
  if (draws < 2) throw invalid_input_error("lp_norm_variance_mc: draws must be >= 2");
  const GaussianLaw law{PsdMatrix(sigma)};
  Rng rng(seed, {0x76617200u});
  std::vector<double> x(sigma.dim());
  double sum = 0.0, sumsq = 0.0;
  for (std::size_t s = 0; s < draws; ++s) {
    law.sample(rng, x);
    const double v = lp_norm(x, p);
    sum += v;
    sumsq += v * v;
  }
  const double r = static_cast<double>(draws);
  return std::max(0.0, (sumsq - sum * sum / r) / (r - 1.0));
}

double delta_perimetric(const SetClassSpec& cls, const PsdMatrix& sigma, double eta) {
  if (!(eta > 0.0)) throw invalid_input_error("delta_perimetric: eta must be > 0");
  switch (cls.kind()) {
    case SetClassSpec::Kind::convex:
      return eta * std::sqrt(invertible_inverse_frobenius(sigma));
    case SetClassSpec::Kind::rectangles: {
      double min_diag = sigma(0, 0);
      for (std::size_t j = 1; j < sigma.dim(); ++j) min_diag = std::min(min_diag, sigma(j, j));
      if (!(min_diag > 0.0))
        throw invalid_input_error("delta_perimetric: rectangles require min_j Sigma_jj > 0");
      const double d = static_cast<double>(sigma.dim());
      return eta * (std::sqrt(2.0 * std::log(d)) + 2.0) / std::sqrt(min_diag);
    }
    case SetClassSpec::Kind::lp_balls: {
      const double var = lp_norm_variance_mc(sigma, cls.ball_p(), cls.var_draws(), cls.seed());
      return eta / std::sqrt(var + eta * eta);
    }
  }
  throw invalid_input_error("delta_perimetric: unknown class");
}

std::vector<double> default_eta_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2)
    throw invalid_input_error("default_eta_grid: need 0 < lo < hi and count >= 2");
  std::vector<double> grid(count);
  const double step = std::log(hi / lo) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) grid[i] = lo * std::exp(step * static_cast<double>(i));
  return grid;
}

namespace {

struct Route {
  const MomentInputs* m;
  SetClassSpec delta_class;
};

// Admissible (candidate, anti-concentration formula) pairs for the class.
std::vector<Route> admissible_routes(std::span<const MomentInputs> candidates,
                                     const PsdMatrix& sigma, const SetClassSpec& cls) {
  const bool invertible = sigma.min_eigenvalue() > 0.0;
  std::vector<Route> routes;
  for (const MomentInputs& m : candidates) {
    const bool p_is_two = !m.p.is_inf() && m.p.value() == 2.0;
    switch (cls.kind()) {
      case SetClassSpec::Kind::convex:
        if (p_is_two) routes.push_back({&m, SetClassSpec::convex()});
        break;
      case SetClassSpec::Kind::rectangles:
        if (m.p.is_inf()) routes.push_back({&m, SetClassSpec::rectangles()});
        if (p_is_two && invertible) routes.push_back({&m, SetClassSpec::convex()});
        break;
      case SetClassSpec::Kind::lp_balls:
        if (m.p == cls.ball_p()) routes.push_back({&m, cls});
        break;
    }
  }
  if (routes.empty())
    throw invalid_input_error(
        "clt_bound: no candidate MomentInputs admissible for class " + cls.name());
  return routes;
}

CltBoundReport minimize_over_grid(std::span<const MomentInputs> candidates,
                                  const PsdMatrix& sigma, const SetClassSpec& cls,
                                  std::span<const double> eta_grid, double bootstrap_gap,
                                  bool bootstrap) {
  if (eta_grid.empty()) throw invalid_input_error("clt_bound: empty eta grid");
  const auto routes = admissible_routes(candidates, sigma, cls);
  const double d = static_cast<double>(sigma.dim());

  CltBoundReport best;
  best.total = std::numeric_limits<double>::infinity();
  for (const Route& route : routes) {
    // The lp-ball variance is eta-independent; hoist its MC estimate.
    double lp_var = 0.0;
    if (route.delta_class.kind() == SetClassSpec::Kind::lp_balls)
      lp_var = lp_norm_variance_mc(sigma, route.delta_class.ball_p(),
                                   route.delta_class.var_draws(), route.delta_class.seed());
    for (double eta : eta_grid) {
      const double gamma = gamma_p(*route.m, eta);
      double delta;
      if (route.delta_class.kind() == SetClassSpec::Kind::lp_balls)
        delta = eta / std::sqrt(lp_var + eta * eta);
      else
        delta = delta_perimetric(route.delta_class, sigma, eta);
      double boot = 0.0;
      if (bootstrap) {
        delta *= 2.0;
        if (bootstrap_gap > 0.0) {
          const double expo =
              -eta * eta / (2.0 * dim_power(route.m->p, sigma.dim()) * bootstrap_gap * bootstrap_gap);
          boot = 2.0 * d * std::exp(expo);
        }
      }
      const double total = gamma + delta + boot;
      if (total < best.total) {
        best.total = total;
        best.eta_star = eta;
        best.gamma_term = gamma;
        best.perimetric_term = delta;
        best.bootstrap_term = boot;
        best.p_used = route.m->p;
      }
    }
  }
  best.set_class = cls.name();
  return best;
}

}  // namespace

CltBoundReport clt_bound(std::span<const MomentInputs> candidates, const PsdMatrix& sigma,
                         const SetClassSpec& cls, std::span<const double> eta_grid) {
  return minimize_over_grid(candidates, sigma, cls, eta_grid, 0.0, false);
}

CltBoundReport clt_bound(const MomentInputs& m, const PsdMatrix& sigma, const SetClassSpec& cls,
                         std::span<const double> eta_grid) {
  return clt_bound(std::span<const MomentInputs>(&m, 1), sigma, cls, eta_grid);
}

CltBoundReport bootstrap_bound(std::span<const MomentInputs> candidates, const PsdMatrix& sigma,
                               const PsdMatrix& sigma_hat, const SetClassSpec& cls,
                               std::span<const double> eta_grid) {
  if (sigma.dim() != sigma_hat.dim())
    throw invalid_input_error("bootstrap_bound: dimension mismatch");
  const std::size_t d = sigma.dim();
  const PsdMatrix r1 = psd_sqrt(sigma_hat);
  const PsdMatrix r2 = psd_sqrt(sigma);
  Matrix diff(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) diff(i, j) = r1(i, j) - r2(i, j);
  const double gap = symmetric_spectral_norm(diff);

  Matrix raw_diff(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) raw_diff(i, j) = sigma_hat(i, j) - sigma(i, j);
  const double relaxed = std::sqrt(symmetric_spectral_norm(raw_diff));

  CltBoundReport report = minimize_over_grid(candidates, sigma, cls, eta_grid, gap, true);
  report.sqrt_gap = gap;
  report.sqrt_gap_relaxed = relaxed;
  return report;
}

CltBoundReport bootstrap_bound(const MomentInputs& m, const PsdMatrix& sigma,
                               const PsdMatrix& sigma_hat, const SetClassSpec& cls,
                               std::span<const double> eta_grid) {
  return bootstrap_bound(std::span<const MomentInputs>(&m, 1), sigma, sigma_hat, cls, eta_grid);
}

namespace {

// Two-sample KS distance by merging sorted samples.
double two_sample_ks(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double best = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    best = std::max(best,
                    std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return best;
}

}  // namespace

KsEstimate mc_ks(const Matrix& sums, const PsdMatrix& sigma, KsClass cls, const PNorm& p,
                 std::size_t mc_draws, std::uint64_t seed) {
  const std::size_t replicates = sums.rows();
  const std::size_t d = sums.cols();
  if (replicates < 500) throw contract_error("mc_ks: at least 500 replicates required");
  if (d != sigma.dim()) throw invalid_input_error("mc_ks: dimension mismatch");
  if (mc_draws < 2) throw invalid_input_error("mc_ks: mc_draws must be >= 2");

  const GaussianLaw law{PsdMatrix(sigma)};
  Rng rng(seed, {0x6d636b73u});
  KsEstimate out;
  out.mc_draws = mc_draws;
  out.se = std::sqrt(0.25 / static_cast<double>(replicates)) +
           std::sqrt(0.25 / static_cast<double>(mc_draws));

  if (cls == KsClass::lp_balls) {
    out.set_class = "lp_balls(" + p.to_string() + ")";
    std::vector<double> s_norms(replicates);
    for (std::size_t r = 0; r < replicates; ++r) s_norms[r] = lp_norm(sums.row(r), p);
    std::vector<double> t_norms(mc_draws);
    std::vector<double> x(d);
    for (std::size_t s = 0; s < mc_draws; ++s) {
      law.sample(rng, x);
      t_norms[s] = lp_norm(x, p);
    }
    out.statistic = two_sample_ks(std::move(s_norms), std::move(t_norms));
    return out;
  }

  out.set_class = "rectangles_halfinfinite";
  constexpr std::size_t kLevels = 199;  // quantile levels k/200
  const std::size_t bins = kLevels + 1;  // sentinel bin for "beyond every threshold"
  double cells = 1.0;
  for (std::size_t j = 0; j < d; ++j) cells *= static_cast<double>(bins);
  if (cells > 7e7)
    throw invalid_input_error("mc_ks: rectangle grid infeasible for dimension " +
                              std::to_string(d));
  const std::size_t total_cells = static_cast<std::size_t>(cells);

  // Per-coordinate thresholds: empirical quantiles of the replicate sums.
  Matrix thresholds(d, kLevels);
  {
    std::vector<double> col(replicates);
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t r = 0; r < replicates; ++r) col[r] = sums(r, j);
      std::sort(col.begin(), col.end());
      for (std::size_t k = 1; k <= kLevels; ++k) {
        const double tau = static_cast<double>(k) / 200.0;
        std::size_t idx = static_cast<std::size_t>(
            std::ceil(tau * static_cast<double>(replicates)));
        if (idx == 0) idx = 1;
        thresholds(j, k - 1) = col[idx - 1];
      }
    }
  }

  auto bin_of = [&](double value, std::size_t j) -> std::size_t {
    // Smallest k with value <= threshold_k, 0-based; kLevels = beyond all.
    const double* row = thresholds.data() + j * kLevels;
    return static_cast<std::size_t>(std::lower_bound(row, row + kLevels, value) - row);
  };

  std::vector<std::int64_t> hist_s(total_cells, 0), hist_t(total_cells, 0);
  std::vector<std::size_t> stride(d);
  stride[d - 1] = 1;
  for (std::size_t j = d - 1; j-- > 0;) stride[j] = stride[j + 1] * bins;

  for (std::size_t r = 0; r < replicates; ++r) {
    std::size_t cell = 0;
    for (std::size_t j = 0; j < d; ++j) cell += stride[j] * bin_of(sums(r, j), j);
    ++hist_s[cell];
  }
  {
    std::vector<double> x(d);
    for (std::size_t s = 0; s < mc_draws; ++s) {
      law.sample(rng, x);
      std::size_t cell = 0;
      for (std::size_t j = 0; j < d; ++j) cell += stride[j] * bin_of(x[j], j);
      ++hist_t[cell];
    }
  }

  // Prefix sums along each axis turn histograms into dominance counts.
  auto prefix = [&](std::vector<std::int64_t>& hist) {
    for (std::size_t axis = 0; axis < d; ++axis) {
      const std::size_t st = stride[axis];
      const std::size_t block = st * bins;
      for (std::size_t base = 0; base < total_cells; base += block)
        for (std::size_t offset = 0; offset < st; ++offset)
          for (std::size_t k = 1; k < bins; ++k) {
            const std::size_t idx = base + offset + k * st;
            hist[idx] += hist[idx - st];
          }
    }
  };
  prefix(hist_s);
  prefix(hist_t);

  // Sup over threshold combinations, i.e. cells avoiding every sentinel.
  double best = 0.0;
  const double inv_r = 1.0 / static_cast<double>(replicates);
  const double inv_m = 1.0 / static_cast<double>(mc_draws);
  for (std::size_t flat = 0; flat < total_cells; ++flat) {
    bool sentinel = false;
    std::size_t rem = flat;
    for (std::size_t j = 0; j < d; ++j) {
      const std::size_t dj = rem / stride[j];
      rem %= stride[j];
      if (dj == kLevels) {
        sentinel = true;
        break;
      }
    }
    if (sentinel) continue;
    const double diff = std::fabs(static_cast<double>(hist_s[flat]) * inv_r -
                                  static_cast<double>(hist_t[flat]) * inv_m);
    best = std::max(best, diff);
  }
  out.statistic = best;
  return out;
}

double lp_quantile_bootstrap(const PsdMatrix& sigma_hat, const PNorm& p, double tau,
                             std::size_t draws, std::uint64_t seed) {
  if (draws < 100) throw invalid_input_error("lp_quantile_bootstrap: draws must be >= 100");
  if (!(tau > 0.0 && tau < 1.0))
    throw invalid_input_error("lp_quantile_bootstrap: tau must lie in (0, 1)");
  const GaussianLaw law{PsdMatrix(sigma_hat)};
  Rng rng(seed, {0x6c707162u});
  std::vector<double> x(sigma_hat.dim());
  std::vector<double> norms(draws);
  for (std::size_t s = 0; s < draws; ++s) {
    law.sample(rng, x);
    norms[s] = lp_norm(x, p);
  }
  return empirical_quantile(std::move(norms), tau);
}

}  // namespace ylab
