#include "ylab/serialize.hpp"

namespace ylab {

nlohmann::json to_json(const MomentInputs& m) {
  nlohmann::json j{
      {"beta_p2", m.beta_p2},
      {"pi3", m.pi3},
      {"omega_mean_norm", m.omega_mean_norm},
      {"zeta", m.zeta},
      {"d", m.d},
      {"p", m.p.to_string()},
  };
  if (m.beta_p3)
    j["beta_p3"] = *m.beta_p3;
  else
    j["beta_p3"] = nullptr;
  if (m.beta_p2_se > 0.0 || m.omega_se > 0.0 || m.pi3_se > 0.0) {
    j["se"] = {{"beta_p2", m.beta_p2_se},
               {"beta_p3", m.beta_p3_se},
               {"pi3", m.pi3_se},
               {"omega_mean_norm", m.omega_se}};
  }
  return j;
}

nlohmann::json to_json(const CouplingBound& b) {
  return nlohmann::json{
      {"eta", b.eta},
      {"probability_bound", b.probability_bound},
      {"probability_bound_clamped", b.clamped()},
      {"order", b.order},
      {"terms", {{"beta", b.terms.beta}, {"omega", b.terms.omega}, {"tail", b.terms.tail}}},
      {"rate_inflation", b.rate_inflation},
  };
}

nlohmann::json to_json(const CltBoundReport& r) {
  nlohmann::json j{
      {"set_class", r.set_class},  {"eta_star", r.eta_star},
      {"gamma_term", r.gamma_term}, {"perimetric_term", r.perimetric_term},
      {"bootstrap_term", r.bootstrap_term}, {"total", r.total},
      {"p_used", r.p_used.to_string()},
  };
  if (r.bootstrap_term > 0.0 || r.sqrt_gap > 0.0 || r.sqrt_gap_relaxed > 0.0) {
    j["sqrt_gap"] = r.sqrt_gap;
    j["sqrt_gap_relaxed"] = r.sqrt_gap_relaxed;
  }
  return j;
}

nlohmann::json to_json(const KsEstimate& k) {
  return nlohmann::json{
      {"statistic", k.statistic},
      {"mc_draws", k.mc_draws},
      {"se", k.se},
      {"class", k.set_class},
  };
}

nlohmann::json to_json(const BandResult& b) {
  return nlohmann::json{
      {"w", b.eval_grid},   {"mu_hat", b.mu_hat}, {"rho_hat", b.rho_diag},
      {"lower", b.lower},   {"upper", b.upper},   {"q_tau", b.q_tau},
      {"tau", b.tau},       {"bootstrap_draws", b.bootstrap_draws},
  };
}

}  // namespace ylab
