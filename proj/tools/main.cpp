// ylab command line: reproducible experiments over the library with CSV/JSON
// artifacts. Exit codes: 0 success, 2 validation error, 3 numerical error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "ylab/bands.hpp"
#include "ylab/coupling.hpp"
#include "ylab/dgp.hpp"
#include "ylab/errors.hpp"
#include "ylab/hdclt.hpp"
#include "ylab/io.hpp"
#include "ylab/kde.hpp"
#include "ylab/localpoly.hpp"
#include "ylab/parallel.hpp"
#include "ylab/rng.hpp"
#include "ylab/serialize.hpp"
#include "ylab/series.hpp"

namespace {

using nlohmann::json;

struct GridSpec {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
};

GridSpec parse_grid(const std::string& text) {
  GridSpec g;
  const auto first = text.find(':');
  const auto second = text.find(':', first + 1);
  if (first == std::string::npos || second == std::string::npos)
    throw ylab::invalid_input_error("grid must be lo:hi:count, got '" + text + "'");
  try {
    g.lo = std::stod(text.substr(0, first));
    g.hi = std::stod(text.substr(first + 1, second - first - 1));
    g.count = std::stoul(text.substr(second + 1));
  } catch (const std::exception&) {
    throw ylab::invalid_input_error("grid must be lo:hi:count, got '" + text + "'");
  }
  if (g.count == 0) throw ylab::invalid_input_error("grid count must be >= 1");
  if (g.count > 1 && !(g.hi > g.lo))
    throw ylab::invalid_input_error("grid needs hi > lo for count > 1");
  return g;
}

std::vector<double> linspace(const GridSpec& g) {
  std::vector<double> v(g.count);
  if (g.count == 1) {
    v[0] = g.lo;
    return v;
  }
  for (std::size_t i = 0; i < g.count; ++i)
    v[i] = g.lo + (g.hi - g.lo) * static_cast<double>(i) / static_cast<double>(g.count - 1);
  return v;
}

void emit(const std::string& path, const std::string& content, const std::string& summary) {
  ylab::atomic_write(path, content);
  std::cout << summary << "\n";
}

std::string json_text(const json& j) { return j.dump(2) + "\n"; }

// One-row CSV flattening for scalar reports, so --format csv and json carry
// identical values.
std::string one_row_csv(const std::vector<std::pair<std::string, double>>& fields) {
  std::vector<std::string> cols;
  std::vector<double> vals;
  for (const auto& [name, value] : fields) {
    cols.push_back(name);
    vals.push_back(value);
  }
  ylab::CsvWriter w(cols);
  w.add_row(vals);
  return w.str();
}

struct DgpFlags {
  std::string mu = "sin2pi";
  std::string sigma_fn = "constant";
  double sigma_scale = 1.0;
  std::string w_dep = "iid";
  double rho = 0.0;
  std::string noise = "gaussian";

  ylab::RegressionDgpSpec build(std::size_t n) const {
    ylab::RegressionDgpSpec spec;
    spec.n = n;
    if (mu == "sin2pi")
      spec.mu = ylab::MuKind::sin2pi;
    else if (mu == "poly3")
      spec.mu = ylab::MuKind::poly3;
    else if (mu == "constant")
      spec.mu = ylab::MuKind::constant;
    else
      throw ylab::invalid_input_error("--mu must be sin2pi, poly3 or constant");
    if (sigma_fn == "constant")
      spec.sigma_fn = ylab::SigmaFnKind::constant;
    else if (sigma_fn == "bump")
      spec.sigma_fn = ylab::SigmaFnKind::bump;
    else
      throw ylab::invalid_input_error("--sigma-fn must be constant or bump");
    spec.sigma_scale = sigma_scale;
    if (w_dep == "iid")
      spec.w_dependence = ylab::WDependence::iid_uniform;
    else if (w_dep == "ar")
      spec.w_dependence = ylab::WDependence::ar_copula;
    else
      throw ylab::invalid_input_error("--w-dep must be iid or ar");
    spec.rho = rho;
    if (noise == "gaussian")
      spec.noise = ylab::NoiseKind::gaussian;
    else if (noise == "rademacher")
      spec.noise = ylab::NoiseKind::rademacher;
    else
      throw ylab::invalid_input_error("--noise must be gaussian or rademacher");
    return spec;
  }
};

void add_dgp_flags(CLI::App* cmd, DgpFlags& flags) {
  cmd->add_option("--mu", flags.mu, "regression function: sin2pi, poly3, constant");
  cmd->add_option("--sigma-fn", flags.sigma_fn, "conditional sd shape: constant, bump");
  cmd->add_option("--sigma-scale", flags.sigma_scale, "conditional sd scale");
  cmd->add_option("--w-dep", flags.w_dep, "regressor dependence: iid, ar");
  cmd->add_option("--rho", flags.rho, "AR copula parameter in (-1, 1)");
  cmd->add_option("--noise", flags.noise, "residual law: gaussian, rademacher");
}

void write_band_outputs(const ylab::BandResult& band, const std::string& out,
                        const std::string& format, std::uint64_t seed,
                        const std::string& command) {
  if (format == "json") {
    json j = ylab::to_json(band);
    j["seed"] = seed;
    emit(out, json_text(j),
         command + ": q_tau = " + ylab::format_double(band.q_tau) + ", wrote " + out);
    return;
  }
  ylab::CsvWriter csv({"w", "mu_hat", "lower", "upper", "rho_hat"});
  for (std::size_t i = 0; i < band.eval_grid.size(); ++i)
    csv.add_row({band.eval_grid[i], band.mu_hat[i], band.lower[i], band.upper[i],
                 band.rho_diag[i]});
  ylab::atomic_write(out, csv.str());
  json side{{"q_tau", band.q_tau},
            {"tau", band.tau},
            {"bootstrap_draws", band.bootstrap_draws},
            {"seed", seed}};
  emit(out + ".json", json_text(side),
       command + ": q_tau = " + ylab::format_double(band.q_tau) + ", wrote " + out + " and " +
           out + ".json");
}

ylab::PNorm parse_p(const std::string& p_text) { return ylab::PNorm::parse(p_text); }

ylab::FactorRegime parse_regime(const std::string& regime) {
  if (regime == "independent") return ylab::FactorRegime::independent;
  if (regime == "martingale") return ylab::FactorRegime::martingale;
  if (regime == "ar-mixingale" || regime == "ar_mixingale")
    return ylab::FactorRegime::ar_mixingale;
  throw ylab::invalid_input_error("--regime must be independent, martingale or ar-mixingale");
}

// Fixed loading used by the lp-ks and factor demos when --fixed-loading is
// requested: scale * ones(d, m) / sqrt(m), so Sigma is non-random.
ylab::Matrix fixed_loading(std::size_t d, std::size_t m, double scale) {
  ylab::Matrix l(d, m);
  const double v = scale / std::sqrt(static_cast<double>(m));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < m; ++j) l(i, j) = v;
  return l;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Coupling-bound calculators, dependence-regime simulators and "
               "uniform confidence bands for nonparametric regression"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print help");
  app.set_config("--config", "", "key=value config file ([subcommand] sections)");
  app.allow_config_extras(false);

  auto add_command = [&](const std::string& name, const std::string& desc) {
    CLI::App* cmd = app.add_subcommand(name, desc);
    cmd->set_help_flag("--help", "print help");  // frees -h for bandwidth flags
    return cmd;
  };

  // ---------------------------------------------------------------- kde-eig
  auto* kde = add_command("kde-eig", "KDE covariance minimum-eigenvalue study");
  struct {
    double h = 0.03, a = 0.2;
    std::size_t n = 100, resamples = 100;
    std::string delta_grid = "0.005:0.1:20";
    std::uint64_t seed = 0;
    std::string out = "kde-eig.csv", format = "csv";
  } kde_opt;
  kde->add_option("--h", kde_opt.h, "bandwidth in (0, 1]")->required();
  kde->add_option("--a", kde_opt.a, "boundary inset in (0, 1/4]");
  kde->add_option("--n", kde_opt.n, "sample size");
  kde->add_option("--resamples", kde_opt.resamples, "covariance resamples");
  kde->add_option("--delta-grid", kde_opt.delta_grid, "mesh spacings lo:hi:count");
  kde->add_option("--seed", kde_opt.seed, "RNG seed")->required();
  kde->add_option("--out", kde_opt.out, "output path");
  kde->add_option("--format", kde_opt.format, "csv or json");
  kde->callback([&] {
    const auto deltas = linspace(parse_grid(kde_opt.delta_grid));
    ylab::CsvWriter csv({"delta", "h", "n", "a", "N", "lambda_min_sim", "lambda_min_exact",
                         "upper_bound", "rank_sim"});
    json rows = json::array();
    for (double delta : deltas) {
      const ylab::KdeGrid grid(kde_opt.a, kde_opt.h, delta, kde_opt.n);
      const auto report = ylab::min_eigen_report(grid, kde_opt.resamples, kde_opt.seed);
      csv.add_row({delta, kde_opt.h, static_cast<double>(kde_opt.n), kde_opt.a,
                   static_cast<double>(grid.mesh_size()), report.lambda_min_sim,
                   report.lambda_min_exact, report.upper_bound,
                   static_cast<double>(report.rank_sim)});
      rows.push_back({{"delta", delta},
                      {"h", kde_opt.h},
                      {"n", kde_opt.n},
                      {"a", kde_opt.a},
                      {"N", grid.mesh_size()},
                      {"lambda_min_sim", report.lambda_min_sim},
                      {"lambda_min_exact", report.lambda_min_exact},
                      {"upper_bound", report.upper_bound},
                      {"rank_sim", report.rank_sim}});
    }
    const std::string content =
        kde_opt.format == "json" ? json_text(rows) : csv.str();
    emit(kde_opt.out, content,
         "kde-eig: " + std::to_string(deltas.size()) + " grid points, wrote " + kde_opt.out);
  });

  // --------------------------------------------------------- coupling-bound
  auto* cb = add_command("coupling-bound", "evaluate or invert the coupling bound");
  struct {
    double beta2 = 0.0;
    std::optional<double> beta3;
    double pi3 = 0.0, omega = 0.0, zeta = 0.0;
    std::size_t d = 1;
    std::string p = "inf";
    int order = 2;
    std::optional<double> eta, target;
    std::string out = "coupling-bound.json", format = "json";
  } cb_opt;
  cb->add_option("--beta2", cb_opt.beta2, "beta_{p,2} moment")->required();
  cb->add_option("--beta3", cb_opt.beta3, "beta_{p,3} moment");
  cb->add_option("--pi3", cb_opt.pi3, "third conditional moment sum");
  cb->add_option("--omega", cb_opt.omega, "E||Omega||_2");
  cb->add_option("--zeta", cb_opt.zeta, "mixingale tail constant");
  cb->add_option("--d", cb_opt.d, "dimension")->required();
  cb->add_option("--p", cb_opt.p, "lp index (number or inf)")->required();
  cb->add_option("--order", cb_opt.order, "2 or 3");
  cb->add_option("--eta", cb_opt.eta, "evaluate the bound at this eta");
  cb->add_option("--target", cb_opt.target, "invert: smallest eta with bound <= target");
  cb->add_option("--out", cb_opt.out, "output path");
  cb->add_option("--format", cb_opt.format, "csv or json");
  cb->callback([&] {
    if (cb_opt.eta.has_value() == cb_opt.target.has_value())
      throw ylab::invalid_input_error("coupling-bound: give exactly one of --eta, --target");
    ylab::MomentInputs m;
    m.beta_p2 = cb_opt.beta2;
    m.beta_p3 = cb_opt.beta3;
    m.pi3 = cb_opt.pi3;
    m.omega_mean_norm = cb_opt.omega;
    m.zeta = cb_opt.zeta;
    m.d = cb_opt.d;
    m.p = parse_p(cb_opt.p);
    const ylab::CouplingBound bound =
        cb_opt.eta ? ylab::simplified_bound(m, *cb_opt.eta, cb_opt.order)
                   : ylab::optimize_bound(m, *cb_opt.target, cb_opt.order);
    if (cb_opt.format == "json") {
      json j{{"moments", ylab::to_json(m)}, {"bound", ylab::to_json(bound)}};
      emit(cb_opt.out, json_text(j),
           "coupling-bound: eta = " + ylab::format_double(bound.eta) +
               ", bound = " + ylab::format_double(bound.probability_bound) + ", wrote " +
               cb_opt.out);
    } else {
      emit(cb_opt.out,
           one_row_csv({{"eta", bound.eta},
                        {"probability_bound", bound.probability_bound},
                        {"order", bound.order},
                        {"beta_term", bound.terms.beta},
                        {"omega_term", bound.terms.omega},
                        {"tail_term", bound.terms.tail},
                        {"rate_inflation", bound.rate_inflation}}),
           "coupling-bound: eta = " + ylab::format_double(bound.eta) + ", wrote " + cb_opt.out);
    }
  });

  // ------------------------------------------------------------ factor-demo
  auto* fd = add_command("factor-demo",
                                "simulate a factor regime, estimate moments, bound the coupling");
  struct {
    std::string regime = "martingale";
    std::size_t d = 3, m = 1, n = 500, replicates = 1000;
    double factor_scale = 1.0, idio_scale = 1.0, ar = 0.5;
    bool asymmetric = false, fixed_load = false;
    std::string p = "inf";
    int order = 2;
    double target = 0.5;
    std::uint64_t seed = 0;
    std::string out = "factor-demo.json", format = "json";
  } fd_opt;
  fd->add_option("--regime", fd_opt.regime, "independent, martingale, ar-mixingale");
  fd->add_option("--d", fd_opt.d, "observation dimension");
  fd->add_option("--m", fd_opt.m, "factor dimension");
  fd->add_option("--n", fd_opt.n, "steps per path");
  fd->add_option("--replicates", fd_opt.replicates, "path replicates");
  fd->add_option("--factor-scale", fd_opt.factor_scale, "factor innovation scale");
  fd->add_option("--idio-scale", fd_opt.idio_scale, "idiosyncratic scale");
  fd->add_option("--ar", fd_opt.ar, "AR coefficient (A = ar * I_m)");
  fd->add_flag("--asymmetric", fd_opt.asymmetric, "centered-exponential innovations");
  fd->add_flag("--fixed-loading", fd_opt.fixed_load, "non-random loading (Sigma non-random)");
  fd->add_option("--p", fd_opt.p, "lp index");
  fd->add_option("--order", fd_opt.order, "2 or 3 (3 needs symmetric noise)");
  fd->add_option("--target", fd_opt.target, "probability target for eta inversion");
  fd->add_option("--seed", fd_opt.seed, "RNG seed")->required();
  fd->add_option("--out", fd_opt.out, "output path");
  fd->add_option("--format", fd_opt.format, "csv or json");
  fd->callback([&] {
    ylab::FactorModelSpec spec;
    spec.regime = parse_regime(fd_opt.regime);
    spec.d = fd_opt.d;
    spec.m = fd_opt.m;
    spec.factor_noise_scale = fd_opt.factor_scale;
    spec.idiosyncratic_scale = fd_opt.idio_scale;
    spec.symmetric_noise = !fd_opt.asymmetric;
    if (fd_opt.fixed_load) spec.loading = fixed_loading(fd_opt.d, fd_opt.m, 1.0);
    if (spec.regime == ylab::FactorRegime::ar_mixingale) {
      ylab::Matrix a(fd_opt.m, fd_opt.m);
      for (std::size_t i = 0; i < fd_opt.m; ++i) a(i, i) = fd_opt.ar;
      spec.ar_matrix = a;
    }
    const auto paths = ylab::simulate_factor(spec, fd_opt.n, fd_opt.replicates, fd_opt.seed);
    const ylab::PNorm p = parse_p(fd_opt.p);
    ylab::MomentInputs m = ylab::estimate_moments(paths, p, ylab::Rng(fd_opt.seed, {1}));
    const double pi3_proxy = m.pi3;
    ylab::CorollaryKind kind = ylab::CorollaryKind::martingale;
    if (spec.regime == ylab::FactorRegime::independent) {
      kind = ylab::CorollaryKind::independent;
      m.omega_mean_norm = 0.0;  // identically zero for this regime
    } else if (spec.regime == ylab::FactorRegime::ar_mixingale) {
      kind = ylab::CorollaryKind::mixingale;
      const double c_bound = ylab::mc_c_bound(spec, p, 20000, fd_opt.seed);
      m.zeta = ylab::mixingale_zeta(spec, fd_opt.n, p, c_bound);
    }
    if (fd_opt.order == 3) {
      if (!spec.symmetric_noise)
        throw ylab::invalid_input_error(
            "factor-demo: order 3 requires symmetric innovations (pi3 = 0 by symmetry)");
      m.pi3 = 0.0;  // asserted by the symmetric DGP, not inferred
    }
    // Invert the corollary bound at the target.
    ylab::MomentInputs bound_inputs = m;
    if (kind == ylab::CorollaryKind::mixingale) bound_inputs.u_tail = nullptr;
    const ylab::CouplingBound bound =
        ylab::optimize_bound(bound_inputs, fd_opt.target, fd_opt.order);
    json j{{"regime", fd_opt.regime},
           {"moments", ylab::to_json(m)},
           {"pi3_unconditional_proxy", pi3_proxy},
           {"bound", ylab::to_json(bound)},
           {"corollary", fd_opt.regime}};
    if (fd_opt.format == "json") {
      emit(fd_opt.out, json_text(j),
           "factor-demo: eta = " + ylab::format_double(bound.eta) + ", wrote " + fd_opt.out);
    } else {
      emit(fd_opt.out,
           one_row_csv({{"eta", bound.eta},
                        {"probability_bound", bound.probability_bound},
                        {"order", bound.order},
                        {"beta_p2", m.beta_p2},
                        {"beta_p3", m.beta_p3 ? *m.beta_p3 : 0.0},
                        {"pi3_proxy", pi3_proxy},
                        {"omega_mean_norm", m.omega_mean_norm},
                        {"zeta", m.zeta}}),
           "factor-demo: eta = " + ylab::format_double(bound.eta) + ", wrote " + fd_opt.out);
    }
  });

  // ------------------------------------------------------------ series-band
  auto* sb = add_command("series-band", "partitioning series fit + uniform band");
  struct {
    std::size_t n = 2000, k_cells = 10, draws = 1000, grid = 101;
    int degree = 1;
    double tau = 0.95, grid_lo = 0.05, grid_hi = 0.95;
    std::uint64_t seed = 0;
    std::string out = "series-band.csv", format = "csv";
  } sb_opt;
  DgpFlags sb_dgp;
  sb->add_option("--n", sb_opt.n, "sample size");
  sb->add_option("--k-cells", sb_opt.k_cells, "partition cells");
  sb->add_option("--degree", sb_opt.degree, "piecewise degree: 0 or 1");
  sb->add_option("--tau", sb_opt.tau, "nominal level");
  sb->add_option("--draws", sb_opt.draws, "bootstrap draws");
  sb->add_option("--grid", sb_opt.grid, "evaluation grid size");
  sb->add_option("--grid-lo", sb_opt.grid_lo, "evaluation grid lower end");
  sb->add_option("--grid-hi", sb_opt.grid_hi, "evaluation grid upper end");
  add_dgp_flags(sb, sb_dgp);
  sb->add_option("--seed", sb_opt.seed, "RNG seed")->required();
  sb->add_option("--out", sb_opt.out, "output path");
  sb->add_option("--format", sb_opt.format, "csv or json");
  sb->callback([&] {
    const auto spec = sb_dgp.build(sb_opt.n);
    const auto data = ylab::simulate_regression(spec, sb_opt.seed);
    const ylab::PartitionBasis basis{sb_opt.k_cells, sb_opt.degree};
    const ylab::SeriesFit fit = ylab::fit_series(data.w, data.y, basis);
    const auto grid = ylab::default_eval_grid(sb_opt.grid_lo, sb_opt.grid_hi, sb_opt.grid);
    const auto band =
        ylab::band_series(fit, sb_opt.tau, grid, sb_opt.draws, ylab::Rng(sb_opt.seed, {2}).next_u64());
    write_band_outputs(band, sb_opt.out, sb_opt.format, sb_opt.seed, "series-band");
  });

  // --------------------------------------------------------- localpoly-band
  auto* lb = add_command("localpoly-band", "local polynomial fit + uniform band");
  struct {
    std::size_t n = 5000, draws = 800, grid = 101;
    int gamma = 1;
    double h = 0.1, tau = 0.95, grid_lo = 0.05, grid_hi = 0.95;
    std::string kernel = "epanechnikov";
    std::uint64_t seed = 0;
    std::string out = "localpoly-band.csv", format = "csv";
  } lb_opt;
  DgpFlags lb_dgp;
  lb->add_option("--n", lb_opt.n, "sample size");
  lb->add_option("--h", lb_opt.h, "bandwidth");
  lb->add_option("--gamma", lb_opt.gamma, "polynomial order >= 1");
  lb->add_option("--kernel", lb_opt.kernel, "epanechnikov or triangular");
  lb->add_option("--tau", lb_opt.tau, "nominal level");
  lb->add_option("--draws", lb_opt.draws, "bootstrap draws");
  lb->add_option("--grid", lb_opt.grid, "evaluation grid size");
  lb->add_option("--grid-lo", lb_opt.grid_lo, "evaluation grid lower end");
  lb->add_option("--grid-hi", lb_opt.grid_hi, "evaluation grid upper end");
  add_dgp_flags(lb, lb_dgp);
  lb->add_option("--seed", lb_opt.seed, "RNG seed")->required();
  lb->add_option("--out", lb_opt.out, "output path");
  lb->add_option("--format", lb_opt.format, "csv or json");
  lb->callback([&] {
    const auto spec = lb_dgp.build(lb_opt.n);
    const auto data = ylab::simulate_regression(spec, lb_opt.seed);
    ylab::LocalPolySpec lp;
    lp.gamma = lb_opt.gamma;
    lp.h = lb_opt.h;
    if (lb_opt.kernel == "epanechnikov")
      lp.kernel = ylab::KernelKind::epanechnikov;
    else if (lb_opt.kernel == "triangular")
      lp.kernel = ylab::KernelKind::triangular;
    else
      throw ylab::invalid_input_error("--kernel must be epanechnikov or triangular");
    const auto grid = ylab::default_eval_grid(lb_opt.grid_lo, lb_opt.grid_hi, lb_opt.grid);
    const auto fit = ylab::fit_localpoly(data.w, data.y, lp, grid);
    const auto band =
        ylab::band_localpoly(fit, lb_opt.tau, lb_opt.draws, ylab::Rng(lb_opt.seed, {2}).next_u64());
    write_band_outputs(band, lb_opt.out, lb_opt.format, lb_opt.seed, "localpoly-band");
  });

  // -------------------------------------------------------------- clt-bound
  auto* clt = add_command("clt-bound", "high-dimensional CLT / bootstrap bound");
  struct {
    std::string set_class = "rectangles";
    std::string ball_p = "inf";
    double beta2 = 0.0, omega = 0.0;
    std::size_t d = 1;
    std::string p = "inf";
    double sigma_scale = 1.0;
    std::optional<double> sigma_hat_scale;
    std::string eta_grid = "1e-6:1e6:400";
    std::optional<std::uint64_t> seed;
    std::string out = "clt-bound.json", format = "json";
  } clt_opt;
  clt->add_option("--class", clt_opt.set_class, "convex, rectangles, lp-balls");
  clt->add_option("--ball-p", clt_opt.ball_p, "lp index for the ball class");
  clt->add_option("--beta2", clt_opt.beta2, "beta_{p,2} moment")->required();
  clt->add_option("--omega", clt_opt.omega, "E||Omega||_2");
  clt->add_option("--d", clt_opt.d, "dimension")->required();
  clt->add_option("--p", clt_opt.p, "lp index the moments were computed for");
  clt->add_option("--sigma-scale", clt_opt.sigma_scale, "Sigma = scale * I_d");
  clt->add_option("--sigma-hat-scale", clt_opt.sigma_hat_scale,
                  "adds the bootstrap terms with Sigma_hat = scale * I_d");
  clt->add_option("--eta-grid", clt_opt.eta_grid, "log grid lo:hi:count");
  clt->add_option("--seed", clt_opt.seed, "RNG seed (required for lp-balls)");
  clt->add_option("--out", clt_opt.out, "output path");
  clt->add_option("--format", clt_opt.format, "csv or json");
  clt->callback([&] {
    ylab::MomentInputs m;
    m.beta_p2 = clt_opt.beta2;
    m.omega_mean_norm = clt_opt.omega;
    m.d = clt_opt.d;
    m.p = parse_p(clt_opt.p);
    std::vector<double> diag(clt_opt.d, clt_opt.sigma_scale);
    const ylab::PsdMatrix sigma = ylab::PsdMatrix::diagonal(diag);

    ylab::SetClassSpec cls = ylab::SetClassSpec::rectangles();
    if (clt_opt.set_class == "convex") {
      cls = ylab::SetClassSpec::convex();
    } else if (clt_opt.set_class == "rectangles") {
      cls = ylab::SetClassSpec::rectangles();
    } else if (clt_opt.set_class == "lp-balls" || clt_opt.set_class == "lp_balls") {
      if (!clt_opt.seed)
        throw ylab::invalid_input_error("clt-bound: --seed required for the lp-balls class");
      cls = ylab::SetClassSpec::lp_balls(parse_p(clt_opt.ball_p), 100000, *clt_opt.seed);
    } else {
      throw ylab::invalid_input_error("--class must be convex, rectangles or lp-balls");
    }

    const auto g = parse_grid(clt_opt.eta_grid);
    const auto grid = ylab::default_eta_grid(g.lo, g.hi, g.count);
    ylab::CltBoundReport report;
    if (clt_opt.sigma_hat_scale) {
      std::vector<double> hat_diag(clt_opt.d, *clt_opt.sigma_hat_scale);
      report = ylab::bootstrap_bound(m, sigma, ylab::PsdMatrix::diagonal(hat_diag), cls, grid);
    } else {
      report = ylab::clt_bound(m, sigma, cls, grid);
    }
    if (clt_opt.format == "json") {
      emit(clt_opt.out, json_text(ylab::to_json(report)),
           "clt-bound: total = " + ylab::format_double(report.total) + " at eta = " +
               ylab::format_double(report.eta_star) + ", wrote " + clt_opt.out);
    } else {
      emit(clt_opt.out,
           one_row_csv({{"eta_star", report.eta_star},
                        {"gamma_term", report.gamma_term},
                        {"perimetric_term", report.perimetric_term},
                        {"bootstrap_term", report.bootstrap_term},
                        {"total", report.total}}),
           "clt-bound: total = " + ylab::format_double(report.total) + ", wrote " + clt_opt.out);
    }
  });

  // ------------------------------------------------------------------ lp-ks
  auto* ks = add_command("lp-ks", "Monte Carlo KS distance to the Gaussian limit");
  struct {
    std::string regime = "martingale";
    std::size_t d = 3, m = 1, n = 500, replicates = 2000, mc_draws = 100000;
    double factor_scale = 1.0, idio_scale = 1.0, ar = 0.5, loading_scale = 1.0;
    std::string set_class = "rectangles";
    std::string p = "inf";
    std::uint64_t seed = 0;
    std::string out = "lp-ks.json", format = "json";
  } ks_opt;
  ks->add_option("--regime", ks_opt.regime, "independent, martingale, ar-mixingale");
  ks->add_option("--d", ks_opt.d, "observation dimension");
  ks->add_option("--m", ks_opt.m, "factor dimension");
  ks->add_option("--n", ks_opt.n, "steps per path");
  ks->add_option("--replicates", ks_opt.replicates, "path replicates (>= 500)");
  ks->add_option("--mc-draws", ks_opt.mc_draws, "Gaussian comparison draws");
  ks->add_option("--factor-scale", ks_opt.factor_scale, "factor innovation scale");
  ks->add_option("--idio-scale", ks_opt.idio_scale, "idiosyncratic scale");
  ks->add_option("--ar", ks_opt.ar, "AR coefficient");
  ks->add_option("--loading-scale", ks_opt.loading_scale, "fixed loading scale");
  ks->add_option("--class", ks_opt.set_class, "rectangles or lp");
  ks->add_option("--p", ks_opt.p, "lp index for the lp class");
  ks->add_option("--seed", ks_opt.seed, "RNG seed")->required();
  ks->add_option("--out", ks_opt.out, "output path");
  ks->add_option("--format", ks_opt.format, "csv or json");
  ks->callback([&] {
    ylab::FactorModelSpec spec;
    spec.regime = parse_regime(ks_opt.regime);
    spec.d = ks_opt.d;
    spec.m = ks_opt.m;
    spec.factor_noise_scale = ks_opt.factor_scale;
    spec.idiosyncratic_scale = ks_opt.idio_scale;
    spec.loading = fixed_loading(ks_opt.d, ks_opt.m, ks_opt.loading_scale);
    if (spec.regime == ylab::FactorRegime::ar_mixingale) {
      ylab::Matrix a(ks_opt.m, ks_opt.m);
      for (std::size_t i = 0; i < ks_opt.m; ++i) a(i, i) = ks_opt.ar;
      spec.ar_matrix = a;
    }
    const auto paths = ylab::simulate_factor(spec, ks_opt.n, ks_opt.replicates, ks_opt.seed);
    ylab::Matrix sums(paths.size(), ks_opt.d);
    for (std::size_t r = 0; r < paths.size(); ++r) {
      const auto s = paths[r].sum();
      for (std::size_t j = 0; j < ks_opt.d; ++j) sums(r, j) = s[j];
    }
    const ylab::KsClass cls = ks_opt.set_class == "lp" ? ylab::KsClass::lp_balls
                                                       : ylab::KsClass::rectangles_halfinfinite;
    const auto est = ylab::mc_ks(sums, paths.front().sigma(), cls, parse_p(ks_opt.p),
                                 ks_opt.mc_draws, ylab::Rng(ks_opt.seed, {3}).next_u64());
    if (ks_opt.format == "json") {
      emit(ks_opt.out, json_text(ylab::to_json(est)),
           "lp-ks: statistic = " + ylab::format_double(est.statistic) + " (se " +
               ylab::format_double(est.se) + "), wrote " + ks_opt.out);
    } else {
      emit(ks_opt.out,
           one_row_csv({{"statistic", est.statistic},
                        {"mc_draws", static_cast<double>(est.mc_draws)},
                        {"se", est.se}}),
           "lp-ks: statistic = " + ylab::format_double(est.statistic) + ", wrote " + ks_opt.out);
    }
  });

  // --------------------------------------------------------------- coverage
  auto* cov = add_command("coverage", "Monte Carlo coverage of the uniform bands");
  struct {
    std::string estimator = "series";
    std::size_t datasets = 500, n = 2000, k_cells = 10, draws = 1000, grid = 101;
    int degree = 1, gamma = 1;
    double h = 0.1, tau = 0.95;
    std::string kernel = "epanechnikov";
    std::uint64_t seed = 0;
    std::string out = "coverage.json", format = "json";
  } cov_opt;
  DgpFlags cov_dgp;
  cov->add_option("--estimator", cov_opt.estimator, "series or localpoly");
  cov->add_option("--datasets", cov_opt.datasets, "Monte Carlo datasets");
  cov->add_option("--n", cov_opt.n, "sample size per dataset");
  cov->add_option("--k-cells", cov_opt.k_cells, "partition cells (series)");
  cov->add_option("--degree", cov_opt.degree, "piecewise degree (series)");
  cov->add_option("--h", cov_opt.h, "bandwidth (localpoly)");
  cov->add_option("--gamma", cov_opt.gamma, "polynomial order (localpoly)");
  cov->add_option("--kernel", cov_opt.kernel, "kernel (localpoly)");
  cov->add_option("--tau", cov_opt.tau, "nominal level");
  cov->add_option("--draws", cov_opt.draws, "bootstrap draws per dataset");
  cov->add_option("--grid", cov_opt.grid, "evaluation grid size");
  add_dgp_flags(cov, cov_dgp);
  cov->add_option("--seed", cov_opt.seed, "RNG seed")->required();
  cov->add_option("--out", cov_opt.out, "output path");
  cov->add_option("--format", cov_opt.format, "csv or json");
  cov->callback([&] {
    if (cov_opt.estimator != "series" && cov_opt.estimator != "localpoly")
      throw ylab::invalid_input_error("--estimator must be series or localpoly");
    const auto spec = cov_dgp.build(cov_opt.n);
    const auto grid = ylab::default_eval_grid(0.05, 0.95, cov_opt.grid);
    std::vector<double> mu_true(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) mu_true[i] = spec.mu_value(grid[i]);

    std::vector<char> covered(cov_opt.datasets, 0);
    const ylab::Rng base(cov_opt.seed);
    ylab::parallel_for(cov_opt.datasets, [&](std::size_t idx) {
      ylab::Rng stream = base.substream(idx);
      const std::uint64_t data_seed = stream.next_u64();
      const std::uint64_t band_seed = stream.next_u64();
      const auto data = ylab::simulate_regression(spec, data_seed);
      ylab::BandResult band;
      if (cov_opt.estimator == "series") {
        const ylab::PartitionBasis basis{cov_opt.k_cells, cov_opt.degree};
        const auto fit = ylab::fit_series(data.w, data.y, basis);
        band = ylab::band_series(fit, cov_opt.tau, grid, cov_opt.draws, band_seed);
      } else {
        ylab::LocalPolySpec lp;
        lp.gamma = cov_opt.gamma;
        lp.h = cov_opt.h;
        lp.kernel = cov_opt.kernel == "triangular" ? ylab::KernelKind::triangular
                                                   : ylab::KernelKind::epanechnikov;
        const auto fit = ylab::fit_localpoly(data.w, data.y, lp, grid);
        band = ylab::band_localpoly(fit, cov_opt.tau, cov_opt.draws, band_seed);
      }
      bool ok = true;
      for (std::size_t i = 0; i < grid.size() && ok; ++i)
        ok = band.lower[i] <= mu_true[i] && mu_true[i] <= band.upper[i];
      covered[idx] = ok ? 1 : 0;
    });
    std::size_t hits = 0;
    for (char c : covered) hits += static_cast<std::size_t>(c);
    const double coverage = static_cast<double>(hits) / static_cast<double>(cov_opt.datasets);
    json j{{"estimator", cov_opt.estimator},
           {"datasets", cov_opt.datasets},
           {"tau", cov_opt.tau},
           {"coverage", coverage},
           {"seed", cov_opt.seed}};
    if (cov_opt.format == "json") {
      emit(cov_opt.out, json_text(j),
           "coverage: " + ylab::format_double(coverage) + " over " +
               std::to_string(cov_opt.datasets) + " datasets, wrote " + cov_opt.out);
    } else {
      emit(cov_opt.out,
           one_row_csv({{"coverage", coverage},
                        {"datasets", static_cast<double>(cov_opt.datasets)},
                        {"tau", cov_opt.tau}}),
           "coverage: " + ylab::format_double(coverage) + ", wrote " + cov_opt.out);
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e);
      return 0;  // --help
    }
    std::cerr << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const ylab::invalid_input_error& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 2;
  } catch (const ylab::contract_error& e) {
    std::cerr << "contract violation: " << e.what() << "\n";
    return 2;
  } catch (const ylab::numeric_error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
