#ifndef SPMIMO_STOCHASTIC_BOUNDS_HPP
#define SPMIMO_STOCHASTIC_BOUNDS_HPP

#include "spmimo/core_types.hpp"

namespace spmimo {

// Inputs of the LSF-averaged lower bounds under channel inversion. tau_p is
// real so the RP bound can be studied as a continuous function.
struct BoundInputs {
  double M = 100;
  double K = 10;
  double tau_c = 200;
  double tau_p = 10;
  double delta = 0.5;
  double snr = 0.25;  // rho / sigma2
  double alpha = 3.76;
};

BoundInputs bound_inputs(const SystemConfig& cfg);

// Coherent interference goes to pilot_contamination / extra_coherent; every
// other term, noise included, to non_coherent.
SinrBreakdown lb_sinr_rp(const BoundInputs& in);
SinrBreakdown lb_sinr_sp(const BoundInputs& in);
SinrBreakdown lb_sinr_sp_ub(const BoundInputs& in);

// Rates per Hz (bit/s/Hz). Multiply by the bandwidth for bit/s.
double lb_rate_rp(const BoundInputs& in);
double lb_rate_sp(const BoundInputs& in);
double lb_rate_sp_ub(const BoundInputs& in);
double lb_rate(Scheme scheme, const BoundInputs& in);

}  // namespace spmimo

#endif
