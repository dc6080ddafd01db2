#include "ylab/dgp.hpp"

#include <cmath>

#include "ylab/errors.hpp"

namespace ylab {

namespace {

double draw_noise(Rng& rng, bool symmetric) {
  return symmetric ? rng.gaussian() : rng.centered_exponential();
}

Matrix draw_loading(const FactorModelSpec& spec, Rng& rng) {
  if (spec.loading) {
    if (spec.loading->rows() != spec.d || spec.loading->cols() != spec.m)
      throw invalid_input_error("simulate_factor: loading must be d x m");
    return *spec.loading;
  }
  Matrix l(spec.d, spec.m);
  for (std::size_t i = 0; i < spec.d; ++i)
    for (std::size_t j = 0; j < spec.m; ++j) l(i, j) = rng.gaussian();
  return l;
}

// V = s2 * L L^T + idio^2 * I
Matrix factor_variance(const Matrix& l, double s2, double idio) {
  const std::size_t d = l.rows();
  const std::size_t m = l.cols();
  Matrix v(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < m; ++k) acc += l(i, k) * l(j, k);
      v(i, j) = v(j, i) = s2 * acc;
    }
  for (std::size_t i = 0; i < d; ++i) v(i, i) += idio * idio;
  return v;
}

void validate_factor_spec(const FactorModelSpec& spec) {
  if (spec.d == 0 || spec.m == 0) throw invalid_input_error("simulate_factor: d, m must be >= 1");
  if (!(spec.factor_noise_scale >= 0.0) || !(spec.idiosyncratic_scale >= 0.0))
    throw invalid_input_error("simulate_factor: scales must be nonnegative");
  if (spec.regime == FactorRegime::ar_mixingale) {
    if (!spec.ar_matrix) throw invalid_input_error("simulate_factor: ar_matrix required");
    if (spec.ar_matrix->rows() != spec.m || spec.ar_matrix->cols() != spec.m)
      throw invalid_input_error("simulate_factor: ar_matrix must be m x m");
    if (matrix_opnorm(spec.ar_matrix->span(), spec.m, PNorm::finite(2.0)) >= 1.0)
      throw invalid_input_error("simulate_factor: ||A||_2 >= 1, AR factor process unstable");
  } else if (spec.ar_matrix) {
    throw invalid_input_error("simulate_factor: ar_matrix only valid for ar_mixingale");
  }
}

MartingalePath simulate_one(const FactorModelSpec& spec, std::size_t n, Rng rng) {
  const std::size_t d = spec.d;
  const std::size_t m = spec.m;
  const double fscale = spec.factor_noise_scale;
  const double idio = spec.idiosyncratic_scale;
  const Matrix l = draw_loading(spec, rng);

  Matrix increments(n, d);
  std::vector<double> f(m, 0.0);

  auto emit_step = [&](std::size_t i) {
    for (std::size_t r = 0; r < d; ++r) {
      double acc = 0.0;
      for (std::size_t k = 0; k < m; ++k) acc += l(r, k) * f[k];
      increments(i, r) = acc + idio * draw_noise(rng, spec.symmetric_noise);
    }
  };

  switch (spec.regime) {
    case FactorRegime::independent: {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < m; ++k) f[k] = fscale * draw_noise(rng, spec.symmetric_noise);
        emit_step(i);
      }
      const Matrix v = factor_variance(l, fscale * fscale, idio);
      return MartingalePath(std::move(increments), v);
    }
    case FactorRegime::martingale: {
      // Pool entries: 0 = base scale, 1 = low, 2 = high modulation.
      const double s2_base = fscale * fscale;
      std::vector<Matrix> pool = {factor_variance(l, s2_base, idio),
                                  factor_variance(l, 0.6 * s2_base, idio),
                                  factor_variance(l, 1.4 * s2_base, idio)};
      std::vector<std::uint32_t> index(n, 0u);
      std::uint32_t state = 0;  // step 1 uses the base scale
      for (std::size_t i = 0; i < n; ++i) {
        index[i] = state;
        const double s2 = state == 0 ? s2_base : (state == 1 ? 0.6 * s2_base : 1.4 * s2_base);
        const double s = std::sqrt(s2);
        for (std::size_t k = 0; k < m; ++k) f[k] = s * draw_noise(rng, spec.symmetric_noise);
        emit_step(i);
        state = rng.uniform() > 0.5 ? 2u : 1u;  // modulation for the next step
      }
      // Sigma = sum_i E[V_i | L]: the modulation is centered, so every step
      // past the first contributes the base-scale variance exactly.
      Matrix sigma_entries(d, d);
      const Matrix base = factor_variance(l, s2_base, idio);
      for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c)
          sigma_entries(r, c) = static_cast<double>(n) * base(r, c);
      return MartingalePath(std::move(increments), std::move(pool), std::move(index),
                            PsdMatrix(std::move(sigma_entries)));
    }
    case FactorRegime::ar_mixingale: {
      const Matrix& a = *spec.ar_matrix;
      std::vector<double> next(m);
      for (std::size_t k = 0; k < m; ++k) f[k] = fscale * draw_noise(rng, spec.symmetric_noise);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t r = 0; r < m; ++r) {
          double acc = 0.0;
          for (std::size_t k = 0; k < m; ++k) acc += a(r, k) * f[k];
          next[r] = acc + fscale * draw_noise(rng, spec.symmetric_noise);
        }
        f = next;
        emit_step(i);
      }
      // Sigma left at the empirical sum of the raw V_i; the approximating
      // martingale's quadratic variation is not available in closed form.
      const Matrix v = factor_variance(l, fscale * fscale, idio);
      return MartingalePath(std::move(increments), v);
    }
  }
  throw invalid_input_error("simulate_factor: unknown regime");
}

}  // namespace

std::vector<MartingalePath> simulate_factor(const FactorModelSpec& spec, std::size_t n,
                                            std::size_t replicates, std::uint64_t seed) {
  validate_factor_spec(spec);
  if (n == 0 || replicates == 0)
    throw invalid_input_error("simulate_factor: n and replicates must be >= 1");
  std::vector<MartingalePath> out;
  out.reserve(replicates);
  const Rng base(seed);
  for (std::size_t r = 0; r < replicates; ++r) out.push_back(simulate_one(spec, n, base.substream(r)));
  return out;
}

double mixingale_zeta(const FactorModelSpec& spec, std::size_t n, const PNorm& p, double c_bound) {
  if (spec.regime != FactorRegime::ar_mixingale)
    throw invalid_input_error("mixingale_zeta: spec must use the ar_mixingale regime");
  if (!(c_bound >= 0.0)) throw invalid_input_error("mixingale_zeta: c_bound must be nonnegative");
  const double anorm = matrix_opnorm(spec.ar_matrix->span(), spec.m, p);
  if (anorm >= 1.0)
    throw invalid_input_error("mixingale_zeta: ||A||_p >= 1 for the requested p");
  // 6 sum_i c (zeta_i + zeta_{n-i+1}^{fwd}) with zeta_r = ||A||_p^r and all
  // forward coefficients zero.
  double geo = 0.0;
  double power = 1.0;
  for (std::size_t i = 1; i <= n; ++i) {
    power *= anorm;
    geo += power;
  }
  return 6.0 * c_bound * geo;
}

double mc_c_bound(const FactorModelSpec& spec, const PNorm& p, std::size_t draws,
                  std::uint64_t seed) {
  if (draws == 0) throw invalid_input_error("mc_c_bound: draws must be >= 1");
  Rng rng(seed, {0x006c6600u});
  std::vector<double> x(spec.d);
  double acc = 0.0;
  for (std::size_t s = 0; s < draws; ++s) {
    Rng local = rng.substream(s);
    const Matrix l = draw_loading(spec, local);
    for (std::size_t r = 0; r < spec.d; ++r) {
      double v = 0.0;
      for (std::size_t k = 0; k < spec.m; ++k)
        v += l(r, k) * spec.factor_noise_scale * draw_noise(local, spec.symmetric_noise);
      x[r] = v;
    }
    acc += lp_norm(x, p);
  }
  return acc / static_cast<double>(draws);
}

double RegressionDgpSpec::mu_value(double w) const {
  switch (mu) {
    case MuKind::sin2pi:
      return std::sin(2.0 * 3.14159265358979323846 * w);
    case MuKind::poly3: {
      const double c = w - 0.5;
      return 5.0 * c * c * c;
    }
    case MuKind::constant:
      return 0.0;
  }
  return 0.0;
}

double RegressionDgpSpec::sigma_value(double w) const {
  switch (sigma_fn) {
    case SigmaFnKind::constant:
      return sigma_scale;
    case SigmaFnKind::bump: {
      const double c = w - 0.5;
      return sigma_scale * (0.5 + std::exp(-c * c / 0.02));
    }
  }
  return sigma_scale;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.70710678118654752440); }

RegressionData simulate_regression(const RegressionDgpSpec& spec, std::uint64_t seed) {
  if (spec.n < 10) throw invalid_input_error("simulate_regression: n must be >= 10");
  if (spec.w_dependence == WDependence::ar_copula && !(std::fabs(spec.rho) < 1.0))
    throw invalid_input_error("simulate_regression: rho must lie in (-1, 1)");
  if (!(spec.sigma_scale >= 0.0))
    throw invalid_input_error("simulate_regression: sigma_scale must be nonnegative");

  const Rng base(seed);
  Rng w_rng = base.substream(0);
  Rng e_rng = base.substream(1);

  RegressionData data;
  data.w.resize(spec.n);
  data.y.resize(spec.n);

  if (spec.w_dependence == WDependence::iid_uniform) {
    for (std::size_t i = 0; i < spec.n; ++i) data.w[i] = w_rng.uniform();
  } else {
    const double rho = spec.rho;
    const double innov = std::sqrt(1.0 - rho * rho);
    double g = w_rng.gaussian();  // stationary start
    data.w[0] = normal_cdf(g);
    for (std::size_t i = 1; i < spec.n; ++i) {
      g = rho * g + innov * w_rng.gaussian();
      data.w[i] = normal_cdf(g);
    }
  }

  for (std::size_t i = 0; i < spec.n; ++i) {
    const double e =
        spec.noise == NoiseKind::gaussian ? e_rng.gaussian() : e_rng.rademacher();
    data.y[i] = spec.mu_value(data.w[i]) + spec.sigma_value(data.w[i]) * e;
  }
  return data;
}

}  // namespace ylab
