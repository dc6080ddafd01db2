#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ylab/coupling.hpp"
#include "ylab/matrix.hpp"
#include "ylab/pnorm.hpp"

namespace ylab {

enum class FactorRegime { independent, martingale, ar_mixingale };

// X_i = L f_i + eps_i. The loading L is drawn once per replicate (it is the
// H_0 information); regimes differ in the law of the latent factors:
//   independent:  f_i iid, scale * z_i
//   martingale:   f_i = s_i z_i with s_i^2 = scale^2 (1 + 0.8 (1{U_{i-1} > 1/2} - 1/2)),
//                 a bounded centered modulation so E[V_i | H_0] is exact
//   ar_mixingale: f_i = A f_{i-1} + scale * u_i
// symmetric_noise selects symmetric innovations (Gaussian) versus centered
// exponential ones; symmetry forces all conditional third moments to vanish.
struct FactorModelSpec {
  std::size_t d = 1;
  std::size_t m = 1;
  FactorRegime regime = FactorRegime::independent;
  std::optional<Matrix> loading;  // fixed d x m; absent -> iid N(0,1) entries per replicate
  double factor_noise_scale = 1.0;
  double idiosyncratic_scale = 1.0;
  std::optional<Matrix> ar_matrix;  // m x m, required iff regime == ar_mixingale
  bool symmetric_noise = true;
};

// Simulates `replicates` paths of length n. Replicate r is driven by
// Rng(seed).substream(r), so output is reproducible and independent of
// threading. Stability of the AR matrix (||A||_2 < 1) is checked here;
// mixingale_zeta checks the caller's chosen p.
std::vector<MartingalePath> simulate_factor(const FactorModelSpec& spec, std::size_t n,
                                            std::size_t replicates, std::uint64_t seed);

// zeta = 6 sum_{i=1..n} c_bound * ||A||_p^i; the forward mixingale
// coefficients vanish for the AR factor regime (f_i is H_n-measurable).
double mixingale_zeta(const FactorModelSpec& spec, std::size_t n, const PNorm& p, double c_bound);

// Monte Carlo estimate of E||L f_0||_p, the natural c_bound for the AR
// factor regime.
double mc_c_bound(const FactorModelSpec& spec, const PNorm& p, std::size_t draws,
                  std::uint64_t seed);

enum class MuKind { sin2pi, poly3, constant };
enum class SigmaFnKind { constant, bump };
enum class WDependence { iid_uniform, ar_copula };
enum class NoiseKind { gaussian, rademacher };

// Y_i = mu(W_i) + sigma(W_i) e_i with e_i iid, independent of all W, so the
// residuals are martingale differences by construction. Regressors are iid
// Unif[0,1] or a Gaussian AR(1) copula (latent AR mapped through Phi), which
// is geometrically alpha-mixing.
//
// Catalog: sin2pi(w) = sin(2 pi w); poly3(w) = 5 (w - 1/2)^3; constant = 0.
// sigma shapes: constant = 1; bump(w) = 0.5 + exp(-(w - 1/2)^2 / 0.02).
// Both sigma shapes are multiplied by sigma_scale.
struct RegressionDgpSpec {
  std::size_t n = 1000;
  MuKind mu = MuKind::sin2pi;
  SigmaFnKind sigma_fn = SigmaFnKind::constant;
  double sigma_scale = 1.0;
  WDependence w_dependence = WDependence::iid_uniform;
  double rho = 0.0;  // AR copula parameter, |rho| < 1
  NoiseKind noise = NoiseKind::gaussian;

  double mu_value(double w) const;
  double sigma_value(double w) const;
};

struct RegressionData {
  std::vector<double> w;
  std::vector<double> y;
};

RegressionData simulate_regression(const RegressionDgpSpec& spec, std::uint64_t seed);

// Standard normal CDF (used by the copula map and by test oracles).
double normal_cdf(double x);

}  // namespace ylab
