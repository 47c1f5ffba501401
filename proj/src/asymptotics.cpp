#include "spmimo/asymptotics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace spmimo {

double lambert_w0(double z) {
  const double branch = -std::exp(-1.0);
  if (std::isnan(z) || z < branch) throw std::domain_error("lambert_w0: z < -1/e");
  if (z == branch) return -1.0;
  if (z == 0.0) return 0.0;
  if (std::isinf(z)) return z;

  double w;
  if (z < -0.25) {
    // Branch-point series in p = sqrt(2 (e z + 1)).
    double p = std::sqrt(2.0 * (std::numbers::e * z + 1.0));
    w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
  } else if (z < 3.0) {
    w = std::log1p(z);
  } else {
    double l1 = std::log(z);
    double l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  }

  // Halley iteration on f(w) = w e^w - z.
  for (int it = 0; it < 64; ++it) {
    double ew = std::exp(w);
    double f = w * ew - z;
    double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    w -= step;
    if (std::abs(step) <= 1e-15 * (1.0 + std::abs(w))) break;
  }
  return w;
}

double rp_asymptotic_rate(double zeta, double sir) {
  return (1.0 - zeta) * std::log1p(zeta * sir) / std::numbers::ln2;
}

double rp_asymptotic_rate_d1(double zeta, double sir) {
  return (-std::log1p(zeta * sir) + (1.0 - zeta) * sir / (1.0 + zeta * sir)) / std::numbers::ln2;
}

double rp_asymptotic_rate_d2(double zeta, double sir) {
  double u = 1.0 + zeta * sir;
  return -sir * (2.0 + (1.0 + zeta) * sir) / (std::numbers::ln2 * u * u);
}

double zeta_max(double sir) {
  if (!(sir > 0.0)) throw std::domain_error("zeta_max: SIR must be positive");
  if (std::isinf(sir)) return 0.0;
  double w = lambert_w0((1.0 + sir) * std::numbers::e);
  // W = 1 + delta solves delta + log1p(delta) = log1p(sir). One Newton step on
  // that form restores the relative accuracy of delta lost in w - 1 at small SIR.
  double delta = w - 1.0;
  double f = delta + std::log1p(delta) - std::log1p(sir);
  delta -= f / (1.0 + 1.0 / (1.0 + delta));
  return (sir - delta) / (sir * (1.0 + delta));
}

double sir_rp(const LsfSnapshot& s, const SystemConfig& cfg) {
  auto t = static_cast<std::size_t>(s.typical);
  double p0 = s.p[t], q0 = s.q[t], b0 = s.beta_cross[t];
  CompensatedSum pc;
  for (std::size_t a = 0; a < s.size(); ++a) {
    double b = s.beta_cross[a];
    if (s.in_psi(a)) pc.add(s.p[a] * s.q[a] * b * b / (q0 * b0));
  }
  double den = pc.value() / cfg.tau_c;
  return den > 0.0 ? p0 * b0 / den : INFINITY;
}

AsymptoticResult rate_limit(Scheme scheme, const LsfSnapshot& s, const SystemConfig& cfg) {
  auto t = static_cast<std::size_t>(s.typical);
  double p0 = s.p[t], q0 = s.q[t], b0 = s.beta_cross[t];
  if (!(q0 > 0.0)) throw DegenerateError("no pilot power: estimator undefined");
  AsymptoticResult r;
  CompensatedSum c1, c2;
  double tau = scheme == Scheme::RP ? cfg.tau_p : cfg.tau_c;
  for (std::size_t a = 0; a < s.size(); ++a) {
    double b = s.beta_cross[a];
    double p = s.p[a];
    double q = s.q[a];
    double w = b * b / (q0 * b0);
    switch (scheme) {
      case Scheme::RP:
        if (s.in_psi(a)) c1.add(p * q * w);
        break;
      case Scheme::SP_NoSub:
        if (s.in_psi(a)) c1.add((p + (1.0 - 1.0 / tau) * q) * q * w);
        c2.add((p + q) * p * w);
        break;
      case Scheme::SP_PerfSub:
        if (s.in_psi(a)) c1.add(p * q * w);
        c2.add(p * p * w);
        break;
      case Scheme::SP_EstSub:
        throw std::invalid_argument("sp_estsub has no closed-form limit");
    }
  }
  double den = (c1.value() + c2.value()) / tau;
  double pre = prelog(scheme, cfg);
  if (scheme == Scheme::RP) {
    r.sir = sir_rp(s, cfg);
    if (std::isfinite(r.sir)) r.zeta_max = zeta_max(r.sir);
  }
  if (!(den > 0.0)) {
    r.unbounded = true;
    r.sinr_limit = INFINITY;
    r.rate_limit_bps = pre > 0.0 ? INFINITY : 0.0;
    return r;
  }
  r.sinr_limit = p0 * b0 / den;
  r.rate_limit_bps = cfg.bandwidth * pre * std::log2(1.0 + r.sinr_limit);
  return r;
}

}  // namespace spmimo
