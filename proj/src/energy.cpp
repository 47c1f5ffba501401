#include "spmimo/energy.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spmimo {

const char* to_string(RateSource s) {
  switch (s) {
    case RateSource::kBound:
      return "bound";
    case RateSource::kClosedFormAverage:
      return "closed_form_average";
    case RateSource::kMonteCarlo:
      return "monte_carlo";
  }
  return "unknown";
}

double avg_tx_power(const SystemConfig& cfg, const PowerModel& pm) {
  if (!(cfg.alpha > -2.0)) throw std::domain_error("avg_tx_power: alpha must exceed -2");
  double moment = std::exp(std::lgamma(cfg.alpha / 2.0 + 1.0) -
                           cfg.alpha / 2.0 * std::log(std::numbers::pi * cfg.density));
  return cfg.bandwidth / pm.eta * cfg.K * cfg.rho * cfg.omega * moment;
}

EnergyResult ee(Scheme scheme, double avg_rate_bps, const SystemConfig& cfg, const PowerModel& pm,
                RateSource source) {
  if (!(avg_rate_bps >= 0.0)) throw std::domain_error("ee: negative rate");
  if (!(pm.c0 > 0.0)) throw std::domain_error("ee: c0 must be positive");
  EnergyResult r;
  r.source = source;
  PowerBreakdown& b = r.power;
  b.p_tx = avg_tx_power(cfg, pm);
  b.p_fixed = pm.c0;
  b.p_ue_chains = pm.c1 * cfg.K;
  b.p_bs_chains = pm.d0 * cfg.M;
  double lp = cfg.bandwidth * cfg.M * cfg.K / pm.flops_per_watt;
  b.p_lp_ce = is_superimposed(scheme) ? 2.0 * lp : lp;
  b.p_rate_dep = pm.a_rate * avg_rate_bps * cfg.K;
  b.total = b.p_tx + b.p_fixed + b.p_ue_chains + b.p_bs_chains + b.p_lp_ce + b.p_rate_dep;
  r.ee = cfg.K * avg_rate_bps / b.total;
  return r;
}

}  // namespace spmimo
