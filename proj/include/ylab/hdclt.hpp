#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ylab/coupling.hpp"
#include "ylab/matrix.hpp"
#include "ylab/pnorm.hpp"
#include "ylab/psd_matrix.hpp"

namespace ylab {

// Set classes for the CLT bounds. Anti-concentration constants: rectangles
// and the bootstrap exponential use the literature's explicit constants;
// convex and lp-ball formulas have unspecified universal constants which are
// set to 1 here, so those outputs are order-of-magnitude devices.
class SetClassSpec {
 public:
  enum class Kind { convex, rectangles, lp_balls };

  static SetClassSpec convex() { return SetClassSpec(Kind::convex, PNorm::finite(2.0)); }
  static SetClassSpec rectangles() { return SetClassSpec(Kind::rectangles, PNorm::inf()); }
  static SetClassSpec lp_balls(const PNorm& p, std::size_t var_draws = 100000,
                               std::uint64_t seed = 1) {
    SetClassSpec s(Kind::lp_balls, p);
    s.var_draws_ = var_draws;
    s.seed_ = seed;
    return s;
  }

  Kind kind() const { return kind_; }
  const PNorm& ball_p() const { return ball_p_; }
  std::size_t var_draws() const { return var_draws_; }
  std::uint64_t seed() const { return seed_; }
  std::string name() const;

 private:
  SetClassSpec(Kind kind, PNorm p) : kind_(kind), ball_p_(p) {}
  Kind kind_;
  PNorm ball_p_;
  std::size_t var_draws_ = 100000;
  std::uint64_t seed_ = 1;
};

struct CltBoundReport {
  std::string set_class;
  double eta_star = 0.0;
  double gamma_term = 0.0;
  double perimetric_term = 0.0;
  double bootstrap_term = 0.0;
  double total = 0.0;  // raw, may exceed 1
  PNorm p_used = PNorm::inf();
  // Populated by bootstrap_bound only: exact sqrt gap and its Bhatia
  // relaxation ||Sigma_hat - Sigma||_2^(1/2).
  double sqrt_gap = 0.0;
  double sqrt_gap_relaxed = 0.0;
};

struct KsEstimate {
  double statistic = 0.0;
  std::size_t mc_draws = 0;
  double se = 0.0;
  std::string set_class;
};

// Gamma_p(eta) = 24 (beta_p2 phi^2 / eta^3)^(1/3)
//              + 17 (E||Omega|| phi^2 / eta^2)^(1/3).
double gamma_p(const MomentInputs& m, double eta);

// MC estimate of Var[||T||_p] for T ~ N(0, sigma).
double lp_norm_variance_mc(const PsdMatrix& sigma, const PNorm& p, std::size_t draws,
                           std::uint64_t seed);

// Anti-concentration formulas:
//   convex:     eta sqrt(||Sigma^{-1}||_F)          (constant-1 order bound)
//   rectangles: eta (sqrt(2 log d) + 2) / sigma_min
//   lp_balls:   eta / sqrt(Var||T||_p + eta^2)      (constant-1 order bound)
double delta_perimetric(const SetClassSpec& cls, const PsdMatrix& sigma, double eta);

// Log-spaced eta search grid, default 400 points over [1e-6, 1e6].
std::vector<double> default_eta_grid(double lo = 1e-6, double hi = 1e6, std::size_t count = 400);

// Minimizes Gamma + Delta over the eta grid and over the admissible
// (candidate, formula) pairs. Candidates carry their own p (beta moments are
// p-specific); admissibility: convex takes p = 2; rectangles take p = inf
// (Nazarov) and also p = 2 through the convex relaxation when Sigma is
// invertible; lp_balls(q) takes p = q.
CltBoundReport clt_bound(std::span<const MomentInputs> candidates, const PsdMatrix& sigma,
                         const SetClassSpec& cls, std::span<const double> eta_grid);

CltBoundReport clt_bound(const MomentInputs& m, const PsdMatrix& sigma, const SetClassSpec& cls,
                         std::span<const double> eta_grid);

// Bootstrap variant: Gamma + 2 Delta + 2d exp(-eta^2 / (2 d^(2/p) gap^2))
// with gap = ||Sigma_hat^(1/2) - Sigma^(1/2)||_2 computed exactly.
CltBoundReport bootstrap_bound(std::span<const MomentInputs> candidates, const PsdMatrix& sigma,
                               const PsdMatrix& sigma_hat, const SetClassSpec& cls,
                               std::span<const double> eta_grid);

CltBoundReport bootstrap_bound(const MomentInputs& m, const PsdMatrix& sigma,
                               const PsdMatrix& sigma_hat, const SetClassSpec& cls,
                               std::span<const double> eta_grid);

enum class KsClass { rectangles_halfinfinite, lp_balls };

// Monte Carlo Kolmogorov-Smirnov estimate between replicate sums (rows of
// `sums`) and N(0, sigma).
//   rectangles_halfinfinite: sup over the product grid of per-coordinate
//     199-point empirical-quantile thresholds of |ECDF_S - ECDF_T|; a lower
//     bound on the true rectangle sup.
//   lp_balls: classical two-sample KS between ||S||_p and ||T||_p.
// se is the DKW sub-Gaussian scale sqrt(1/4R) + sqrt(1/4M).
KsEstimate mc_ks(const Matrix& sums, const PsdMatrix& sigma, KsClass cls, const PNorm& p,
                 std::size_t mc_draws, std::uint64_t seed);

// MC tau-quantile of ||T_hat||_p with T_hat ~ N(0, sigma_hat); inverted-ECDF
// convention.
double lp_quantile_bootstrap(const PsdMatrix& sigma_hat, const PNorm& p, double tau,
                             std::size_t draws, std::uint64_t seed);

}  // namespace ylab
