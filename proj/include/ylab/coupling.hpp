#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ylab/matrix.hpp"
#include "ylab/pnorm.hpp"
#include "ylab/psd_matrix.hpp"
#include "ylab/rng.hpp"

namespace ylab {

// Scalar ingredients of the coupling bounds. beta moments are tied to the
// stored p. u_tail, when set, maps a coupling level eta to a bound on
// P(||U||_p > eta / 6); when absent the mixingale constant zeta stands in
// (zeta = 0 for exact martingales).
struct MomentInputs {
  double beta_p2 = 0.0;
  std::optional<double> beta_p3;
  double pi3 = 0.0;
  double omega_mean_norm = 0.0;  // E||Omega||_2
  double zeta = 0.0;
  std::function<double(double)> u_tail;
  std::size_t d = 1;
  PNorm p = PNorm::inf();

  // Monte Carlo standard errors, populated by estimate_moments.
  double beta_p2_se = 0.0;
  double beta_p3_se = 0.0;
  double pi3_se = 0.0;
  double omega_se = 0.0;

  double tail_term(double eta) const;
};

// One evaluated coupling bound. probability_bound is reported raw (the
// inequalities are often vacuous at desk scale); clamped() is min(1, raw).
struct CouplingBound {
  double eta = 0.0;
  double probability_bound = 0.0;
  int order = 2;
  struct Terms {
    double beta = 0.0;
    double omega = 0.0;
    double tail = 0.0;
  } terms;
  double rate_inflation = 0.0;  // R_n bookkeeping from optimize_bound

  double clamped() const { return probability_bound < 1.0 ? probability_bound : 1.0; }
};

// Ordered increments X_i with per-step conditional variances V_i (temporal
// order is the filtration order). Distinct variance matrices are pooled and
// referenced per step, since simulated regimes reuse a handful of V values
// across thousands of steps.
class MartingalePath {
 public:
  MartingalePath(Matrix increments, std::vector<Matrix> variance_pool,
                 std::vector<std::uint32_t> variance_index,
                 std::optional<PsdMatrix> sigma = std::nullopt);

  // Every step shares one conditional variance.
  MartingalePath(Matrix increments, Matrix cond_variance,
                 std::optional<PsdMatrix> sigma = std::nullopt);

  std::size_t steps() const { return increments_.rows(); }
  std::size_t dim() const { return increments_.cols(); }
  const Matrix& increments() const { return increments_; }
  std::span<const double> increment(std::size_t i) const { return increments_.row(i); }
  const Matrix& cond_variance(std::size_t i) const { return variance_pool_[variance_index_[i]]; }
  const std::vector<Matrix>& variance_pool() const { return variance_pool_; }
  std::span<const std::uint32_t> variance_index() const { return variance_index_; }

  // The target Sigma; defaults to sum_i V_i when not supplied.
  const PsdMatrix& sigma() const { return *sigma_; }

  // sum_i X_i
  std::vector<double> sum() const;

 private:
  Matrix increments_;
  std::vector<Matrix> variance_pool_;
  std::vector<std::uint32_t> variance_index_;
  std::optional<PsdMatrix> sigma_;
};

// Explicit-parameter form of the main bound (M = nu^2 I):
//   2 phi_p(d)/t + min(beta_p2 t^2/eta^3, beta_p3 t^3/eta^4 + pi3 t^3/eta^3)
//   + 2 E||Omega||/nu^2 + 2 phi_p(d) nu/eta + phi_p(d) sqrt(E||Omega||)/eta
//   + u_tail(6 eta).
// The minimum uses only the second-order branch when beta_p3 is absent.
double general_bound(const MomentInputs& m, double eta, double t, double nu);

// Optimized form:
//   order 2: 24 (beta_p2 phi^2 / eta^3)^(1/3) + 17 (E||Omega|| phi^2 / eta^2)^(1/3) + tail
//   order 3: 24 (beta_p3 phi^3 / eta^4)^(1/4) + same omega term + tail
// where tail is u_tail(eta) when set, else zeta / eta. Order 3 requires
// pi3 = 0 and beta_p3 present.
CouplingBound simplified_bound(const MomentInputs& m, double eta, int order);

// Smallest eta (bisection to 1e-10 relative over [1e-12, 1e18]) with
// simplified_bound(m, eta, order) <= target; rate_inflation = 1 / target.
CouplingBound optimize_bound(const MomentInputs& m, double target, int order);

enum class CorollaryKind { mixingale, martingale, independent };

// Dispatches to simplified_bound with the corollary's tail term. martingale
// requires zeta = 0 and no u_tail; independent additionally requires
// omega_mean_norm = 0.
CouplingBound corollary_bound(CorollaryKind kind, const MomentInputs& m, double eta, int order);

// Streaming moment estimator over path replicates. Each replicate r draws
// its Gaussians from base_rng.substream(r), so accumulation order and
// threading cannot change the result.
class MomentAccumulator {
 public:
  MomentAccumulator(const PNorm& p, std::size_t steps, std::size_t dim);

  void add_path(const MartingalePath& path, Rng replicate_rng);

  std::size_t replicates() const { return replicates_; }

  // Requires >= 2 replicates (no variance estimate otherwise).
  MomentInputs finalize() const;

 private:
  PNorm p_;
  std::size_t steps_;
  std::size_t dim_;
  std::size_t replicates_ = 0;
  double sum_b2_ = 0.0, sumsq_b2_ = 0.0;
  double sum_b3_ = 0.0, sumsq_b3_ = 0.0;
  double sum_omega_ = 0.0, sumsq_omega_ = 0.0;
  std::vector<std::size_t> kappa_a_, kappa_b_, kappa_c_;  // |kappa| = 3 triples
  std::vector<double> kappa_sum_, kappa_sumsq_;           // steps x #kappa running sums
};

// Convenience wrapper over MomentAccumulator for in-memory replicate lists.
MomentInputs estimate_moments(std::span<const MartingalePath> paths, const PNorm& p,
                              const Rng& base_rng);

}  // namespace ylab
