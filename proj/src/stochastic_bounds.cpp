#include "spmimo/stochastic_bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace spmimo {

namespace {

void check_common(const BoundInputs& in) {
  if (!(in.alpha > 2.0)) throw std::domain_error("bound: alpha must exceed 2");
  if (!(in.snr > 0.0)) throw std::domain_error("bound: snr must be positive");
  if (!(in.M > 0.0) || !(in.K > 0.0)) throw std::domain_error("bound: M and K must be positive");
  if (!(in.tau_c >= in.K)) throw std::domain_error("bound: tau_c < K");
}

void check_delta(const BoundInputs& in) {
  if (!(in.delta > 0.0 && in.delta < 1.0))
    throw DegenerateError("bound: delta must lie in (0,1)");
}

}  // namespace

BoundInputs bound_inputs(const SystemConfig& cfg) {
  BoundInputs in;
  in.M = cfg.M;
  in.K = cfg.K;
  in.tau_c = cfg.tau_c;
  in.tau_p = cfg.tau_p;
  in.delta = cfg.delta;
  in.snr = cfg.rho / cfg.sigma2;
  in.alpha = cfg.alpha;
  return in;
}

SinrBreakdown lb_sinr_rp(const BoundInputs& in) {
  check_common(in);
  if (!(in.tau_p >= in.K && in.tau_p <= in.tau_c))
    throw std::domain_error("bound: tau_p outside [K, tau_c]");
  const double M = in.M, K = in.K, tp = in.tau_p, a = in.alpha, ns = 1.0 / in.snr;
  SinrBreakdown r;
  r.coherent_gain = M;
  r.pilot_contamination = M * K / (tp * (a - 1.0));
  r.non_coherent = K * K / (tp * (a - 1.0)) +
                   (1.0 + K / tp * 2.0 / (a - 2.0) + ns / tp) * (a * K / (a - 2.0) + ns);
  r.finalize();
  return r;
}

SinrBreakdown lb_sinr_sp(const BoundInputs& in) {
  check_common(in);
  check_delta(in);
  const double M = in.M, K = in.K, tc = in.tau_c, d = in.delta, a = in.alpha, ns = 1.0 / in.snr;
  SinrBreakdown r;
  r.coherent_gain = M * (1.0 - d);
  r.pilot_contamination = M * K / (tc * (a - 1.0)) * (1.0 - d / tc);
  r.extra_coherent = M * K / tc * (1.0 - d) * a / (d * (a - 1.0));
  r.non_coherent = 2.0 * (1.0 - d) / tc * (1.0 + K / (tc * (a - 1.0))) +
                   K * (1.0 - d) * (1.0 - d) * a / (tc * tc * d * (a - 1.0)) +
                   K * K / (tc * d * (a - 1.0)) +
                   (1.0 + K / (tc * d) * (2.0 / (a - 2.0) + (1.0 - d)) + ns / (d * tc)) *
                       (K * a / (a - 2.0) + ns);
  r.finalize();
  return r;
}

SinrBreakdown lb_sinr_sp_ub(const BoundInputs& in) {
  check_common(in);
  check_delta(in);
  const double M = in.M, K = in.K, tc = in.tau_c, d = in.delta, a = in.alpha, ns = 1.0 / in.snr;
  SinrBreakdown r;
  r.coherent_gain = M * (1.0 - d);
  r.pilot_contamination = M * K * (1.0 - d) / (tc * (a - 1.0));
  r.extra_coherent = M * K * (1.0 - d) * (1.0 - d) * a / (tc * d * (a - 1.0));
  r.non_coherent = K * (1.0 - d) * (1.0 - d) * a / (tc * tc * d * (a - 1.0)) +
                   K * K * (1.0 - d) / (tc * d * (a - 1.0)) +
                   (1.0 + K / (tc * d) * (2.0 / (a - 2.0) + (1.0 - d)) + ns / (d * tc)) *
                       (K * (1.0 - d) * a / (a - 2.0) + ns);
  r.finalize();
  return r;
}

double lb_rate_rp(const BoundInputs& in) {
  return (1.0 - in.tau_p / in.tau_c) * std::log2(1.0 + lb_sinr_rp(in).sinr);
}

double lb_rate_sp(const BoundInputs& in) { return std::log2(1.0 + lb_sinr_sp(in).sinr); }

double lb_rate_sp_ub(const BoundInputs& in) { return std::log2(1.0 + lb_sinr_sp_ub(in).sinr); }

double lb_rate(Scheme scheme, const BoundInputs& in) {
  switch (scheme) {
    case Scheme::RP:
      return lb_rate_rp(in);
    case Scheme::SP_NoSub:
      return lb_rate_sp(in);
    case Scheme::SP_PerfSub:
      return lb_rate_sp_ub(in);
    case Scheme::SP_EstSub:
      break;
  }
  throw std::invalid_argument("no bound for sp_estsub");
}

}  // namespace spmimo
