#include "ylab/kde.hpp"

#include <cmath>

#include "ylab/errors.hpp"
#include "ylab/parallel.hpp"
#include "ylab/rng.hpp"
#include "ylab/simd/kernels.hpp"

namespace ylab {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// (1/sqrt(2 pi)) int_{-x/h}^{(1-x)/h} e^{-t^2/2} dt
double boundary_mass(double x, double h) {
  const double hi = (1.0 - x) / h;
  const double lo = -x / h;
  return 0.5 * (std::erf(hi * kInvSqrt2) - std::erf(lo * kInvSqrt2));
}

}  // namespace

KdeGrid::KdeGrid(double a_in, double h_in, double delta_in, std::size_t n_in)
    : a(a_in), h(h_in), delta(delta_in), n(n_in) {
  if (!(a > 0.0 && a <= 0.25)) throw invalid_input_error("KdeGrid: a must lie in (0, 1/4]");
  if (!(h > 0.0 && h <= 1.0)) throw invalid_input_error("KdeGrid: h must lie in (0, 1]");
  if (!(delta > 0.0 && delta < 0.5))
    throw invalid_input_error("KdeGrid: delta must lie in (0, 1/2)");
  if (n == 0) throw invalid_input_error("KdeGrid: n must be >= 1");
  const std::size_t mesh = static_cast<std::size_t>(std::floor(1.0 + (1.0 - 2.0 * a) / delta));
  points.resize(mesh);
  for (std::size_t j = 0; j < mesh; ++j) points[j] = a + static_cast<double>(j) * delta;
}

KdeCovariance exact_cov(const KdeGrid& grid) {
  const std::size_t mesh = grid.mesh_size();
  const double h = grid.h;
  Matrix cov(mesh, mesh);
  std::vector<double> mass(mesh);
  for (std::size_t j = 0; j < mesh; ++j) mass[j] = boundary_mass(grid.points[j], h);

  for (std::size_t j = 0; j < mesh; ++j) {
    for (std::size_t l = j; l < mesh; ++l) {
      const double xj = grid.points[j];
      const double xl = grid.points[l];
      const double gap = (xj - xl) / h;
      const double lo = -(xj + xl) / (2.0 * h);
      const double hi = (2.0 - xj - xl) / (2.0 * h);
      const double integral = 0.5 * std::sqrt(kPi) * (std::erf(hi) - std::erf(lo));
      const double value = std::exp(-0.25 * gap * gap) * integral / (2.0 * kPi) -
                           h * mass[j] * mass[l];
      cov(j, l) = value;
      cov(l, j) = value;
    }
  }
  return KdeCovariance{grid, PsdMatrix(std::move(cov)), std::nullopt, 0};
}

PsdMatrix simulate_cov(const KdeGrid& grid, std::size_t resamples, std::uint64_t seed) {
  if (resamples < 2) throw invalid_input_error("simulate_cov: resamples must be >= 2");
  const std::size_t mesh = grid.mesh_size();
  const std::size_t n = grid.n;
  const double h = grid.h;
  const double scale = std::sqrt(static_cast<double>(n) * h);

  Matrix draws(resamples, mesh);
  const Rng base(seed);
  parallel_for(resamples, [&](std::size_t r) {
    Rng rng = base.substream(r);
    double* row = draws.data() + r * mesh;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = rng.uniform();
      for (std::size_t j = 0; j < mesh; ++j) {
        const double u = (x - grid.points[j]) / h;
        row[j] += std::exp(-0.5 * u * u);
      }
    }
    const double norm = scale * kInvSqrt2Pi / (static_cast<double>(n) * h);
    for (std::size_t j = 0; j < mesh; ++j) row[j] *= norm;
  });

  std::vector<double> mean(mesh, 0.0);
  for (std::size_t r = 0; r < resamples; ++r) simd::axpy(1.0, draws.row(r), mean);
  simd::scale(1.0 / static_cast<double>(resamples), mean);

  Matrix cov(mesh, mesh);
  std::vector<double> centered(mesh);
  for (std::size_t r = 0; r < resamples; ++r) {
    for (std::size_t j = 0; j < mesh; ++j) centered[j] = draws(r, j) - mean[j];
    simd::syr_upper(1.0 / static_cast<double>(resamples - 1), centered, cov.data(), mesh);
  }
  for (std::size_t i = 0; i < mesh; ++i)
    for (std::size_t j = 0; j < i; ++j) cov(i, j) = cov(j, i);
  return PsdMatrix(std::move(cov));
}

double eigen_upper_bound(const KdeGrid& grid) {
  const double h = grid.h;
  const double d = grid.delta;
  const double a = grid.a;
  return 2.0 * std::exp(-h * h / (d * d)) +
         h / (kPi * a * d) * std::exp(-a * a / (h * h));
}

double bias_bound(const KdeGrid& grid) {
  const double h = grid.h;
  const double a = grid.a;
  return h / a * std::sqrt(2.0 / kPi) * std::exp(-a * a / (2.0 * h * h));
}

MinEigenReport min_eigen_report(const KdeGrid& grid, std::size_t resamples, std::uint64_t seed) {
  MinEigenReport report;
  report.upper_bound = eigen_upper_bound(grid);
  report.lambda_min_exact = exact_cov(grid).exact.min_eigenvalue();

  const PsdMatrix sim = simulate_cov(grid, resamples, seed);
  report.lambda_min_sim = sim.min_eigenvalue();
  report.rank_sim = sim.rank();

  // Delta-method SE: lambda_min = mean of (v' y_r)^2 over centered draws y_r
  // at the fixed minimizing eigenvector v. Rerun the draws to get the
  // per-resample quadratic forms without storing the full draw matrix twice.
  const std::size_t mesh = grid.mesh_size();
  std::vector<double> v(mesh);
  for (std::size_t i = 0; i < mesh; ++i) v[i] = sim.eigenvectors()(i, mesh - 1);
  const Rng base(seed);
  const double scale = std::sqrt(static_cast<double>(grid.n) * grid.h);
  std::vector<double> proj(resamples, 0.0);
  parallel_for(resamples, [&](std::size_t r) {
    Rng rng = base.substream(r);
    double acc = 0.0;
    for (std::size_t i = 0; i < grid.n; ++i) {
      const double x = rng.uniform();
      for (std::size_t j = 0; j < mesh; ++j) {
        const double u = (x - grid.points[j]) / grid.h;
        acc += std::exp(-0.5 * u * u) * v[j];
      }
    }
    proj[r] = acc * scale * kInvSqrt2Pi / (static_cast<double>(grid.n) * grid.h);
  });
  const double pmean = simd::sum(proj) / static_cast<double>(resamples);
  double qsum = 0.0, qsumsq = 0.0;
  for (double pr : proj) {
    const double q = (pr - pmean) * (pr - pmean);
    qsum += q;
    qsumsq += q * q;
  }
  const double rr = static_cast<double>(resamples);
  const double qvar = std::max(0.0, (qsumsq - qsum * qsum / rr) / (rr - 1.0));
  report.sim_se = std::sqrt(qvar / rr);
  report.sim_exceeds_bound =
      report.lambda_min_sim > report.upper_bound + 3.0 * report.sim_se;
  return report;
}

}  // namespace ylab
