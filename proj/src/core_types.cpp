#include "spmimo/core_types.hpp"

#include <cmath>

#include <fmt/format.h>

namespace spmimo {

const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::RP:
      return "rp";
    case Scheme::SP_NoSub:
      return "sp_nosub";
    case Scheme::SP_EstSub:
      return "sp_estsub";
    case Scheme::SP_PerfSub:
      return "sp_perfsub";
  }
  return "unknown";
}

Scheme scheme_from_string(std::string_view name) {
  if (name == "rp") return Scheme::RP;
  if (name == "sp_nosub" || name == "sp") return Scheme::SP_NoSub;
  if (name == "sp_estsub") return Scheme::SP_EstSub;
  if (name == "sp_perfsub" || name == "sp_ub") return Scheme::SP_PerfSub;
  throw ConfigError(fmt::format("unknown scheme '{}'", name));
}

bool is_superimposed(Scheme s) { return s != Scheme::RP; }

void SinrBreakdown::finalize() {
  double den = denominator();
  sinr = den > 0.0 ? coherent_gain / den : INFINITY;
}

std::vector<Violation> validate(const SystemConfig& cfg) {
  std::vector<Violation> out;
  auto flag = [&](bool bad, const char* field, std::string msg) {
    if (bad) out.push_back({field, std::move(msg)});
  };
  flag(cfg.M < 1, "M", "M < 1");
  flag(cfg.K < 1, "K", "K < 1");
  flag(cfg.tau_c < 1, "tau_c", "tau_c < 1");
  flag(cfg.tau_p < cfg.K, "tau_p", "tau_p < K");
  flag(cfg.tau_p > cfg.tau_c, "tau_p", "tau_p > tau_c");
  flag(!(cfg.delta >= 0.0 && cfg.delta <= 1.0), "delta", "delta outside [0,1]");
  flag(!(cfg.rho > 0.0) || !std::isfinite(cfg.rho), "rho", "rho <= 0");
  flag(!(cfg.sigma2 > 0.0) || !std::isfinite(cfg.sigma2), "sigma2", "sigma2 <= 0");
  flag(!(cfg.alpha > 2.0) || !std::isfinite(cfg.alpha), "alpha", "alpha <= 2");
  flag(!(cfg.omega > 0.0) || !std::isfinite(cfg.omega), "omega", "omega <= 0");
  flag(!(cfg.density > 0.0) || !std::isfinite(cfg.density), "density", "density <= 0");
  flag(!(cfg.bandwidth > 0.0) || !std::isfinite(cfg.bandwidth), "bandwidth",
       "bandwidth <= 0");
  return out;
}

std::vector<Violation> validate(const PowerModel& pm) {
  std::vector<Violation> out;
  auto flag = [&](bool bad, const char* field, std::string msg) {
    if (bad) out.push_back({field, std::move(msg)});
  };
  flag(!(pm.eta > 0.0 && pm.eta <= 1.0), "eta", "eta outside (0,1]");
  flag(!(pm.c0 > 0.0), "c0", "c0 <= 0");
  flag(!(pm.c1 >= 0.0), "c1", "c1 < 0");
  flag(!(pm.d0 >= 0.0), "d0", "d0 < 0");
  flag(!(pm.a_rate >= 0.0), "a_rate", "a_rate < 0");
  flag(!(pm.flops_per_watt > 0.0), "flops_per_watt", "flops_per_watt <= 0");
  return out;
}

void require_valid(const SystemConfig& cfg) {
  auto v = validate(cfg);
  if (v.empty()) return;
  std::string msg = "invalid config:";
  for (const auto& e : v) msg += " " + e.message + ";";
  throw ConfigError(msg);
}

SystemConfig default_config() {
  SystemConfig cfg;
  cfg.M = 100;
  cfg.K = 10;
  cfg.tau_c = 200;
  cfg.tau_p = 10;
  cfg.delta = 0.5;
  cfg.alpha = 3.76;
  cfg.omega = db_to_linear(130.0);
  cfg.density = 100.0;
  cfg.bandwidth = 2e7;
  cfg.sigma2 = 1e-13 / cfg.bandwidth;
  cfg.rho = cfg.sigma2 * db_to_linear(-6.0);
  return cfg;
}

PowerModel default_power_model() {
  PowerModel pm;
  pm.eta = 0.39;
  pm.c0 = 10.0;
  pm.c1 = 0.1;
  pm.d0 = 0.1;
  pm.a_rate = 2.3e-2 / 2e7;
  pm.flops_per_watt = 12.8e9;
  return pm;
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

}  // namespace spmimo
