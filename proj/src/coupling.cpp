#include "ylab/coupling.hpp"

#include <cmath>
#include <limits>

#include "ylab/errors.hpp"
#include "ylab/simd/kernels.hpp"

namespace ylab {

namespace {

double cbrt_pos(double x) { return std::cbrt(x); }

void check_order(int order) {
  if (order != 2 && order != 3)
    throw invalid_input_error("coupling bound order must be 2 or 3");
}

}  // namespace

double MomentInputs::tail_term(double eta) const {
  if (u_tail) return u_tail(eta);
  return eta > 0.0 && zeta > 0.0 ? zeta / eta : 0.0;
}

MartingalePath::MartingalePath(Matrix increments, std::vector<Matrix> variance_pool,
                               std::vector<std::uint32_t> variance_index,
                               std::optional<PsdMatrix> sigma)
    : increments_(std::move(increments)),
      variance_pool_(std::move(variance_pool)),
      variance_index_(std::move(variance_index)),
      sigma_(std::move(sigma)) {
  const std::size_t n = increments_.rows();
  const std::size_t d = increments_.cols();
  if (n == 0 || d == 0) throw invalid_input_error("MartingalePath: empty increments");
  if (variance_index_.size() != n)
    throw invalid_input_error("MartingalePath: one variance index per step required");
  for (std::uint32_t idx : variance_index_)
    if (idx >= variance_pool_.size())
      throw invalid_input_error("MartingalePath: variance index out of range");
  for (const Matrix& v : variance_pool_)
    if (v.rows() != d || v.cols() != d)
      throw invalid_input_error("MartingalePath: variance dimension mismatch");
  if (sigma_ && sigma_->dim() != d)
    throw invalid_input_error("MartingalePath: sigma dimension mismatch");

  if (!sigma_) {
    Matrix total(d, d);
    for (std::size_t i = 0; i < n; ++i) {
      const Matrix& v = cond_variance(i);
      for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) total(r, c) += v(r, c);
    }
    sigma_.emplace(std::move(total));
  }
}

MartingalePath::MartingalePath(Matrix increments, Matrix cond_variance,
                               std::optional<PsdMatrix> sigma)
    : MartingalePath(std::move(increments), std::vector<Matrix>{std::move(cond_variance)},
                     std::vector<std::uint32_t>(increments.rows(), 0u), std::move(sigma)) {}

std::vector<double> MartingalePath::sum() const {
  const std::size_t d = dim();
  std::vector<double> s(d, 0.0);
  for (std::size_t i = 0; i < steps(); ++i) simd::axpy(1.0, increment(i), s);
  return s;
}

double general_bound(const MomentInputs& m, double eta, double t, double nu) {
  if (!(eta > 0.0) || !(t > 0.0) || !(nu > 0.0))
    throw invalid_input_error("general_bound: eta, t, nu must be > 0");
  const double phi = phi_p(m.p, m.d);

  const double second = m.beta_p2 * t * t / (eta * eta * eta);
  double moment = second;
  if (m.beta_p3) {
    const double third =
        *m.beta_p3 * t * t * t / (eta * eta * eta * eta) + m.pi3 * t * t * t / (eta * eta * eta);
    moment = std::min(second, third);
  }

  const double omega_regularization =
      m.omega_mean_norm > 0.0 ? 2.0 * m.omega_mean_norm / (nu * nu) : 0.0;
  return 2.0 * phi / t + moment + omega_regularization + 2.0 * phi * nu / eta +
         phi * std::sqrt(m.omega_mean_norm) / eta + m.tail_term(6.0 * eta);
}

CouplingBound simplified_bound(const MomentInputs& m, double eta, int order) {
  check_order(order);
  if (!(eta > 0.0)) throw invalid_input_error("simplified_bound: eta must be > 0");
  if (order == 3) {
    if (m.pi3 != 0.0)
      throw contract_error("simplified_bound: order 3 requires pi3 = 0, got " +
                           std::to_string(m.pi3));
    if (!m.beta_p3) throw contract_error("simplified_bound: order 3 requires beta_p3");
  }
  const double phi = phi_p(m.p, m.d);

  CouplingBound out;
  out.eta = eta;
  out.order = order;
  if (order == 2) {
    out.terms.beta = 24.0 * cbrt_pos(m.beta_p2 * phi * phi / (eta * eta * eta));
  } else {
    out.terms.beta =
        24.0 * std::pow(*m.beta_p3 * phi * phi * phi / (eta * eta * eta * eta), 0.25);
  }
  out.terms.omega = 17.0 * cbrt_pos(m.omega_mean_norm * phi * phi / (eta * eta));
  out.terms.tail = m.tail_term(eta);
  out.probability_bound = out.terms.beta + out.terms.omega + out.terms.tail;
  return out;
}

CouplingBound optimize_bound(const MomentInputs& m, double target, int order) {
  check_order(order);
  if (!(target > 0.0 && target < 1.0))
    throw invalid_input_error("optimize_bound: target must lie in (0, 1)");

  const double lo_bracket = 1e-12;
  const double hi_bracket = 1e18;

  auto value = [&](double eta) { return simplified_bound(m, eta, order).probability_bound; };

  if (value(lo_bracket) <= target) {
    CouplingBound out = simplified_bound(m, lo_bracket, order);
    out.rate_inflation = 1.0 / target;
    return out;
  }
  if (value(hi_bracket) > target)
    throw numeric_error("optimize_bound: bound exceeds target for all eta <= 1e18");

  double lo = lo_bracket;  // bound(lo) > target
  double hi = hi_bracket;  // bound(hi) <= target
  for (int iter = 0; iter < 200 && (hi - lo) > 1e-10 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (value(mid) <= target)
      hi = mid;
    else
      lo = mid;
  }
  CouplingBound out = simplified_bound(m, hi, order);
  out.rate_inflation = 1.0 / target;
  return out;
}

CouplingBound corollary_bound(CorollaryKind kind, const MomentInputs& m, double eta, int order) {
  MomentInputs adjusted = m;
  switch (kind) {
    case CorollaryKind::mixingale:
      // Tail term zeta / eta regardless of any user-supplied u_tail.
      adjusted.u_tail = nullptr;
      break;
    case CorollaryKind::martingale:
      if (m.zeta != 0.0 || m.u_tail)
        throw contract_error("corollary_bound: martingale kind requires zeta = 0 and no u_tail");
      break;
    case CorollaryKind::independent:
      if (m.zeta != 0.0 || m.u_tail)
        throw contract_error("corollary_bound: independent kind requires zeta = 0 and no u_tail");
      if (m.omega_mean_norm != 0.0)
        throw contract_error("corollary_bound: independent kind requires omega_mean_norm = 0");
      break;
  }
  return simplified_bound(adjusted, eta, order);
}

MomentAccumulator::MomentAccumulator(const PNorm& p, std::size_t steps, std::size_t dim)
    : p_(p), steps_(steps), dim_(dim) {
  if (steps == 0 || dim == 0) throw invalid_input_error("MomentAccumulator: empty shape");
  for (std::size_t a = 0; a < dim; ++a)
    for (std::size_t b = a; b < dim; ++b)
      for (std::size_t c = b; c < dim; ++c) {
        kappa_a_.push_back(a);
        kappa_b_.push_back(b);
        kappa_c_.push_back(c);
      }
  kappa_sum_.assign(steps * kappa_a_.size(), 0.0);
  kappa_sumsq_.assign(steps * kappa_a_.size(), 0.0);
}

void MomentAccumulator::add_path(const MartingalePath& path, Rng rng) {
  if (path.steps() != steps_ || path.dim() != dim_)
    throw invalid_input_error("MomentAccumulator: replicate dimensions differ");

  std::vector<Matrix> factors;
  factors.reserve(path.variance_pool().size());
  for (const Matrix& v : path.variance_pool()) factors.push_back(gaussian_factor(v));

  const std::size_t kcount = kappa_a_.size();
  std::vector<double> z(dim_), y(dim_);
  double b2 = 0.0, b3 = 0.0;

  for (std::size_t i = 0; i < steps_; ++i) {
    const std::span<const double> x = path.increment(i);
    const double x2 = std::sqrt(simd::sumsq(x));
    const double xp = lp_norm(x, p_);
    b2 += x2 * x2 * xp;
    b3 += x2 * x2 * x2 * xp;

    // One fresh Gaussian draw V_i^(1/2) Z_i per step, through the pooled factor.
    for (std::size_t k = 0; k < dim_; ++k) z[k] = rng.gaussian();
    const Matrix& factor = factors[path.variance_index()[i]];
    for (std::size_t r = 0; r < dim_; ++r) {
      double acc = 0.0;
      for (std::size_t k = 0; k <= r; ++k) acc += factor(r, k) * z[k];
      // Eigen-based fallback factors are dense, finish the row.
      for (std::size_t k = r + 1; k < dim_; ++k) acc += factor(r, k) * z[k];
      y[r] = acc;
    }
    const double y2 = std::sqrt(simd::sumsq(y));
    const double yp = lp_norm(y, p_);
    b2 += y2 * y2 * yp;
    b3 += y2 * y2 * y2 * yp;

    double* ks = kappa_sum_.data() + i * kcount;
    double* kq = kappa_sumsq_.data() + i * kcount;
    for (std::size_t t = 0; t < kcount; ++t) {
      const double v = x[kappa_a_[t]] * x[kappa_b_[t]] * x[kappa_c_[t]];
      ks[t] += v;
      kq[t] += v * v;
    }
  }

  sum_b2_ += b2;
  sumsq_b2_ += b2 * b2;
  sum_b3_ += b3;
  sumsq_b3_ += b3 * b3;

  Matrix qv(dim_, dim_);
  std::vector<std::size_t> pool_count(path.variance_pool().size(), 0);
  for (std::uint32_t idx : path.variance_index()) ++pool_count[idx];
  for (std::size_t e = 0; e < pool_count.size(); ++e) {
    if (pool_count[e] == 0) continue;
    const double w = static_cast<double>(pool_count[e]);
    const Matrix& v = path.variance_pool()[e];
    for (std::size_t r = 0; r < dim_; ++r)
      for (std::size_t c = 0; c < dim_; ++c) qv(r, c) += w * v(r, c);
  }
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c) qv(r, c) -= path.sigma()(r, c);
  const double omega = symmetric_spectral_norm(qv);
  sum_omega_ += omega;
  sumsq_omega_ += omega * omega;

  ++replicates_;
}

MomentInputs MomentAccumulator::finalize() const {
  if (replicates_ < 2)
    throw contract_error("estimate_moments: at least 2 replicates required");
  const double r = static_cast<double>(replicates_);

  auto mean_se = [&](double sum, double sumsq, double& mean, double& se) {
    mean = sum / r;
    const double var = std::max(0.0, (sumsq - sum * sum / r) / (r - 1.0));
    se = std::sqrt(var / r);
  };

  MomentInputs out;
  out.p = p_;
  out.d = dim_;
  mean_se(sum_b2_, sumsq_b2_, out.beta_p2, out.beta_p2_se);
  double b3 = 0.0, b3_se = 0.0;
  mean_se(sum_b3_, sumsq_b3_, b3, b3_se);
  out.beta_p3 = b3;
  out.beta_p3_se = b3_se;
  mean_se(sum_omega_, sumsq_omega_, out.omega_mean_norm, out.omega_se);

  // Unconditional third-moment proxy: |mean across replicates| per (step,
  // kappa), summed. Only a lower proxy for the conditional pi3; exact
  // symmetry must be asserted by the DGP, not inferred from this.
  const std::size_t kcount = kappa_a_.size();
  double pi3 = 0.0, pi3_se = 0.0;
  for (std::size_t i = 0; i < steps_; ++i)
    for (std::size_t t = 0; t < kcount; ++t) {
      const double sum = kappa_sum_[i * kcount + t];
      const double sumsq = kappa_sumsq_[i * kcount + t];
      pi3 += std::fabs(sum / r);
      const double var = std::max(0.0, (sumsq - sum * sum / r) / (r - 1.0));
      pi3_se += std::sqrt(var / r);
    }
  out.pi3 = pi3;
  out.pi3_se = pi3_se;
  return out;
}

MomentInputs estimate_moments(std::span<const MartingalePath> paths, const PNorm& p,
                              const Rng& base_rng) {
  if (paths.size() < 2) throw contract_error("estimate_moments: at least 2 replicates required");
  MomentAccumulator acc(p, paths.front().steps(), paths.front().dim());
  for (std::size_t r = 0; r < paths.size(); ++r)
    acc.add_path(paths[r], base_rng.substream(r));
  return acc.finalize();
}

}  // namespace ylab
