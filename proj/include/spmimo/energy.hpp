#ifndef SPMIMO_ENERGY_HPP
#define SPMIMO_ENERGY_HPP

#include "spmimo/core_types.hpp"

namespace spmimo {

struct PowerBreakdown {
  double p_tx = 0.0;
  double p_fixed = 0.0;
  double p_ue_chains = 0.0;
  double p_bs_chains = 0.0;
  double p_lp_ce = 0.0;
  double p_rate_dep = 0.0;
  double total = 0.0;
};

enum class RateSource { kBound, kClosedFormAverage, kMonteCarlo };
const char* to_string(RateSource s);

struct EnergyResult {
  double ee = 0.0;  // bit/Joule
  PowerBreakdown power;
  RateSource source = RateSource::kBound;
};

// Mean transmit power per cell under channel inversion, averaged over the
// serving-distance law: (B_w/eta) K rho omega Gamma(alpha/2+1) / (pi D)^(alpha/2).
double avg_tx_power(const SystemConfig& cfg, const PowerModel& pm);

// avg_rate_bps is the per-UE average rate in bit/s.
EnergyResult ee(Scheme scheme, double avg_rate_bps, const SystemConfig& cfg, const PowerModel& pm,
                RateSource source = RateSource::kBound);

}  // namespace spmimo

#endif
