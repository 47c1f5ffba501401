#ifndef SPMIMO_ASYMPTOTICS_HPP
#define SPMIMO_ASYMPTOTICS_HPP

#include <optional>

#include "spmimo/closed_form.hpp"
#include "spmimo/core_types.hpp"

namespace spmimo {

// Principal branch of the Lambert W function, z >= -1/e.
double lambert_w0(double z);

struct AsymptoticResult {
  double rate_limit_bps = 0.0;
  double sinr_limit = 0.0;
  double sir = 0.0;                 // SIR_RP (RP only), pilot fraction excluded
  std::optional<double> zeta_max;   // RP only
  bool unbounded = false;           // no coherent interference: SINR grows without limit
};

// M -> infinity limit of the closed-form SINR. SP_EstSub is rejected.
AsymptoticResult rate_limit(Scheme scheme, const LsfSnapshot& s, const SystemConfig& cfg);

// SIR_RP: the RP limit SINR with tau_p replaced by tau_c, so the limit SINR at
// pilot fraction zeta is zeta * SIR_RP.
double sir_rp(const LsfSnapshot& s, const SystemConfig& cfg);

double zeta_max(double sir);

// R(zeta) = (1 - zeta) log2(1 + zeta * sir) and its first two derivatives.
double rp_asymptotic_rate(double zeta, double sir);
double rp_asymptotic_rate_d1(double zeta, double sir);
double rp_asymptotic_rate_d2(double zeta, double sir);

}  // namespace spmimo

#endif
