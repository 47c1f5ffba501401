#include "spmimo/closed_form.hpp"

#include <cmath>

#include <fmt/format.h>

namespace spmimo {

LsfSnapshot make_snapshot(const NetworkRealization& net, int typical_cell, int typical_user,
                          double rho_d, double rho_p) {
  if (typical_cell < 0 || typical_cell >= net.n_bs || typical_user < 0 || typical_user >= net.K)
    throw std::out_of_range("typical UE outside the network");
  LsfSnapshot s;
  std::size_t n = static_cast<std::size_t>(net.n_bs) * net.K;
  s.cell.resize(n);
  s.beta_cross.resize(n);
  s.beta_serving.resize(n);
  s.p.resize(n);
  s.q.resize(n);
  for (int lp = 0; lp < net.n_bs; ++lp)
    for (int i = 0; i < net.K; ++i) {
      std::size_t a = static_cast<std::size_t>(lp) * net.K + i;
      s.cell[a] = lp;
      s.beta_cross[a] = net.gain(typical_cell, lp, i);
      s.beta_serving[a] = net.gain(lp, lp, i);
      s.p[a] = rho_d / s.beta_serving[a];
      s.q[a] = rho_p / s.beta_serving[a];
    }
  s.typical = typical_cell * net.K + typical_user;
  s.typical_cell = typical_cell;
  s.users_per_cell = net.K;
  return s;
}

LsfSnapshot make_snapshot(const NetworkRealization& net, const SystemConfig& cfg, Scheme scheme,
                          int typical_cell, int typical_user) {
  if (scheme == Scheme::RP)
    return make_snapshot(net, typical_cell, typical_user, cfg.rho_d_rp(), cfg.rho_p_rp());
  return make_snapshot(net, typical_cell, typical_user, cfg.rho_d_sp(), cfg.rho_p_sp());
}

LsfSnapshot with_powers(const LsfSnapshot& s, double rho_d, double rho_p) {
  LsfSnapshot out = s;
  out.p.resize(s.size());
  out.q.resize(s.size());
  for (std::size_t a = 0; a < s.size(); ++a) {
    out.p[a] = rho_d / s.beta_serving[a];
    out.q[a] = rho_p / s.beta_serving[a];
  }
  return out;
}

namespace {

struct TypicalTerms {
  double p0, q0, b0;
};

TypicalTerms typical_terms(const LsfSnapshot& s) {
  auto t = static_cast<std::size_t>(s.typical);
  return {s.p[t], s.q[t], s.beta_cross[t]};
}

void require_pilot_power(const LsfSnapshot& s) {
  if (!(typical_terms(s).q0 > 0.0)) throw DegenerateError("no pilot power: estimator undefined");
}

}  // namespace

double gamma_rp(const LsfSnapshot& s, const SystemConfig& cfg) {
  auto [p0, q0, b0] = typical_terms(s);
  (void)p0;
  CompensatedSum interf;
  for (std::size_t a = 0; a < s.size(); ++a)
    if (s.in_psi(a)) interf.add(s.q[a] * s.beta_cross[a]);
  double sig = q0 * cfg.tau_p * b0;
  return sig / (sig + interf.value() + cfg.sigma2);
}

double gamma_sp(const LsfSnapshot& s, const SystemConfig& cfg) {
  auto [p0, q0, b0] = typical_terms(s);
  (void)p0;
  CompensatedSum interf;
  for (std::size_t a = 0; a < s.size(); ++a) {
    if (s.in_psi(a)) interf.add(s.q[a] * s.beta_cross[a]);
    interf.add(s.p[a] * s.beta_cross[a]);
  }
  double sig = q0 * cfg.tau_c * b0;
  return sig / (sig + interf.value() + cfg.sigma2);
}

SinrBreakdown sinr_rp(const LsfSnapshot& s, const SystemConfig& cfg) {
  require_pilot_power(s);
  auto [p0, q0, b0] = typical_terms(s);
  const double M = cfg.M;
  const double tau = cfg.tau_p;
  const double g = gamma_rp(s, cfg);
  CompensatedSum pc, data;
  for (std::size_t a = 0; a < s.size(); ++a) {
    double b = s.beta_cross[a];
    if (s.in_psi(a)) pc.add(s.p[a] * s.q[a] * b * b / (q0 * b0));
    data.add(s.p[a] * b);
  }
  SinrBreakdown r;
  r.coherent_gain = M * p0 * b0;
  r.pilot_contamination = M / tau * pc.value();
  r.non_coherent = data.value() / g;
  r.noise_term = cfg.sigma2 / g;
  r.finalize();
  return r;
}

SinrBreakdown sinr_sp(const LsfSnapshot& s, const SystemConfig& cfg) {
  require_pilot_power(s);
  auto [p0, q0, b0] = typical_terms(s);
  if (!(p0 > 0.0)) throw DegenerateError("no data power: SP SINR numerator is zero (rate 0)");
  const double M = cfg.M;
  const double tau = cfg.tau_c;
  const double g = gamma_sp(s, cfg);
  CompensatedSum c1, c2, n2, n3, rx;
  for (std::size_t a = 0; a < s.size(); ++a) {
    double b = s.beta_cross[a];
    double p = s.p[a];
    double q = s.q[a];
    double w = b * b / (q0 * b0);
    if (s.in_psi(a)) {
      c1.add((p + (1.0 - 1.0 / tau) * q) * q * w);
      n2.add(q * p * w);
    }
    c2.add((p + q) * p * w);
    n3.add(p * p * w);
    rx.add((q + p) * b);
  }
  SinrBreakdown r;
  r.coherent_gain = M * p0 * b0;
  r.pilot_contamination = M / tau * c1.value();
  r.extra_coherent = M / tau * c2.value();
  r.non_coherent = 2.0 / tau * p0 * b0 + 2.0 / (tau * tau) * n2.value() +
                   n3.value() / (tau * tau) + rx.value() / g;
  r.noise_term = cfg.sigma2 / g;
  r.finalize();
  return r;
}

SinrBreakdown sinr_sp_ub(const LsfSnapshot& s, const SystemConfig& cfg) {
  require_pilot_power(s);
  auto [p0, q0, b0] = typical_terms(s);
  if (!(p0 > 0.0)) throw DegenerateError("no data power: SP SINR numerator is zero (rate 0)");
  const double M = cfg.M;
  const double tau = cfg.tau_c;
  const double g = gamma_sp(s, cfg);
  CompensatedSum c1, c2, rx;
  for (std::size_t a = 0; a < s.size(); ++a) {
    double b = s.beta_cross[a];
    double p = s.p[a];
    double w = b * b / (q0 * b0);
    if (s.in_psi(a)) c1.add(p * s.q[a] * w);
    c2.add(p * p * w);
    rx.add(p * b);
  }
  SinrBreakdown r;
  r.coherent_gain = M * p0 * b0;
  r.pilot_contamination = M / tau * c1.value();
  r.extra_coherent = M / tau * c2.value();
  r.non_coherent = c2.value() / (tau * tau) + rx.value() / g;
  r.noise_term = cfg.sigma2 / g;
  r.finalize();
  return r;
}

double sp_effective_noise_variance(const LsfSnapshot& s, const SystemConfig& cfg) {
  require_pilot_power(s);
  auto [p0, q0, b0] = typical_terms(s);
  const double M = cfg.M;
  const double tau = cfg.tau_c;
  const double g = gamma_sp(s, cfg);
  // Coherent part: M/(q0 b0) * (1/tau sum_Psi (p + (1-1/tau) q) q b^2 + 1/tau sum_Phi (p+q) p b^2)
  CompensatedSum coh_psi, coh_phi, cross_psi, sq_phi, rx;
  for (std::size_t a = 0; a < s.size(); ++a) {
    double b = s.beta_cross[a];
    double p = s.p[a];
    double q = s.q[a];
    if (s.in_psi(a)) {
      coh_psi.add((p + (1.0 - 1.0 / tau) * q) * q * b * b);
      cross_psi.add(q * p * b * b);
    }
    coh_phi.add((p + q) * p * b * b);
    sq_phi.add(p * p * b * b);
    rx.add((q + p) * b);
  }
  double coherent = M / (q0 * b0) * (coh_psi.value() / tau + coh_phi.value() / tau);
  double mixed = 1.0 / (tau * q0 * b0) * (2.0 / tau * cross_psi.value() + sq_phi.value() / tau);
  double gain_fluct = -p0 * b0 + 2.0 * p0 * b0 / tau;
  return coherent + mixed + gain_fluct + (rx.value() + cfg.sigma2) / g;
}

double prelog(Scheme scheme, const SystemConfig& cfg) {
  if (scheme == Scheme::RP) return 1.0 - static_cast<double>(cfg.tau_p) / cfg.tau_c;
  return 1.0;
}

RateResult rate(Scheme scheme, const LsfSnapshot& s, const SystemConfig& cfg) {
  RateResult r;
  r.scheme = scheme;
  r.prelog = prelog(scheme, cfg);
  switch (scheme) {
    case Scheme::RP:
      r.sinr = sinr_rp(s, cfg);
      break;
    case Scheme::SP_NoSub:
      r.sinr = sinr_sp(s, cfg);
      break;
    case Scheme::SP_PerfSub:
      r.sinr = sinr_sp_ub(s, cfg);
      break;
    case Scheme::SP_EstSub:
      throw std::invalid_argument("sp_estsub has no closed form; use the Monte Carlo engine");
  }
  r.rate_bps = cfg.bandwidth * r.prelog * std::log2(1.0 + r.sinr.sinr);
  return r;
}

}  // namespace spmimo
