#include "spmimo/config_io.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include <fmt/format.h>

namespace spmimo {

namespace {

std::string where(const YAML::Node& n) {
  auto m = n.Mark();
  if (m.line < 0) return "";
  return fmt::format("line {}: ", m.line + 1);
}

double as_real(const YAML::Node& n, const std::string& key) {
  try {
    return n.as<double>();
  } catch (const YAML::Exception&) {
    throw ConfigError(fmt::format("{}field '{}' is not a number", where(n), key));
  }
}

int as_int(const YAML::Node& n, const std::string& key) {
  double v = as_real(n, key);
  if (v != std::floor(v) || std::abs(v) > 1e9)
    throw ConfigError(fmt::format("{}field '{}' must be an integer", where(n), key));
  return static_cast<int>(v);
}

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() > suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

struct Field {
  std::function<void(double)> set;
  bool integral = false;
};

// Reads a mapping into key -> (value, node), converting *_db keys to linear.
std::map<std::string, std::pair<double, YAML::Node>> read_section(
    const YAML::Node& sec, const std::map<std::string, Field>& fields,
    const std::vector<std::string>& extra, const char* section) {
  std::map<std::string, std::pair<double, YAML::Node>> out;
  if (!sec) return out;
  if (!sec.IsMap())
    throw ConfigError(fmt::format("{}section '{}' must be a mapping", where(sec), section));
  for (const auto& kv : sec) {
    auto key = kv.first.as<std::string>();
    std::string base = key;
    bool db = false;
    if (ends_with(key, "_db")) {
      base = key.substr(0, key.size() - 3);
      db = true;
    }
    bool known = false;
    auto it = fields.find(base);
    if (it != fields.end()) {
      if (db && it->second.integral)
        throw ConfigError(fmt::format("{}field '{}' has no dB form", where(kv.first), key));
      known = true;
    }
    for (const auto& e : extra) known = known || e == base;
    if (!known)
      throw ConfigError(fmt::format("{}unknown field '{}.{}'", where(kv.first), section, key));
    if (out.count(base))
      throw ConfigError(fmt::format("{}field '{}' given twice", where(kv.first), base));
    double v = (it != fields.end() && it->second.integral) ? as_int(kv.second, key)
                                                           : as_real(kv.second, key);
    if (db) v = db_to_linear(v);
    out[base] = {v, kv.second};
  }
  return out;
}

}  // namespace

ConfigBundle parse_config(const YAML::Node& node, ConfigBundle base) {
  if (node && !node.IsNull() && !node.IsMap())
    throw ConfigError(fmt::format("{}config root must be a mapping", where(node)));
  SystemConfig& s = base.system;
  PowerModel& p = base.power;

  std::map<std::string, Field> sys_fields = {
      {"M", {[&](double v) { s.M = static_cast<int>(v); }, true}},
      {"K", {[&](double v) { s.K = static_cast<int>(v); }, true}},
      {"tau_c", {[&](double v) { s.tau_c = static_cast<int>(v); }, true}},
      {"tau_p", {[&](double v) { s.tau_p = static_cast<int>(v); }, true}},
      {"delta", {[&](double v) { s.delta = v; }}},
      {"rho", {[&](double v) { s.rho = v; }}},
      {"sigma2", {[&](double v) { s.sigma2 = v; }}},
      {"alpha", {[&](double v) { s.alpha = v; }}},
      {"omega", {[&](double v) { s.omega = v; }}},
      {"density", {[&](double v) { s.density = v; }}},
      {"bandwidth", {[&](double v) { s.bandwidth = v; }}},
  };
  std::map<std::string, Field> pm_fields = {
      {"eta", {[&](double v) { p.eta = v; }}},
      {"c0", {[&](double v) { p.c0 = v; }}},
      {"c1", {[&](double v) { p.c1 = v; }}},
      {"d0", {[&](double v) { p.d0 = v; }}},
      {"a_rate", {[&](double v) { p.a_rate = v; }}},
      {"flops_per_watt", {[&](double v) { p.flops_per_watt = v; }}},
  };

  if (node && node.IsMap()) {
    for (const auto& kv : node) {
      auto key = kv.first.as<std::string>();
      if (key != "system" && key != "power_model")
        throw ConfigError(fmt::format("{}unknown section '{}'", where(kv.first), key));
    }
  }
  YAML::Node sys = node ? node["system"] : YAML::Node();
  YAML::Node pwr = node ? node["power_model"] : YAML::Node();

  auto sv = read_section(sys, sys_fields, {"snr", "noise_total_w"}, "system");
  for (const auto& [k, v] : sv) {
    auto it = sys_fields.find(k);
    if (it != sys_fields.end()) it->second.set(v.first);
  }
  // Derived inputs are applied after the plain fields they depend on.
  if (sv.count("noise_total_w")) {
    if (sv.count("sigma2"))
      throw ConfigError(fmt::format("{}give either sigma2 or noise_total_w",
                                    where(sv["noise_total_w"].second)));
    s.sigma2 = sv["noise_total_w"].first / s.bandwidth;
  }
  if (sv.count("snr")) {
    if (sv.count("rho"))
      throw ConfigError(fmt::format("{}give either rho or snr", where(sv["snr"].second)));
    s.rho = s.sigma2 * sv["snr"].first;
  }

  auto pv = read_section(pwr, pm_fields, {"a_rate_total_w"}, "power_model");
  for (const auto& [k, v] : pv) {
    auto it = pm_fields.find(k);
    if (it != pm_fields.end()) it->second.set(v.first);
  }
  if (pv.count("a_rate_total_w")) {
    if (pv.count("a_rate"))
      throw ConfigError(fmt::format("{}give either a_rate or a_rate_total_w",
                                    where(pv["a_rate_total_w"].second)));
    p.a_rate = pv["a_rate_total_w"].first / s.bandwidth;
  }
  return base;
}

ConfigBundle load_config_string(const std::string& text) {
  YAML::Node n;
  try {
    n = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(fmt::format("line {}: {}", e.mark.line + 1, e.msg));
  }
  return parse_config(n);
}

ConfigBundle load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return load_config_string(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path, e.what()));
  }
}

std::string to_yaml(const ConfigBundle& b) {
  const auto& s = b.system;
  const auto& p = b.power;
  std::string out;
  out += "system:\n";
  out += fmt::format("  M: {}\n  K: {}\n  tau_c: {}\n  tau_p: {}\n", s.M, s.K, s.tau_c, s.tau_p);
  out += fmt::format("  delta: {}\n  rho: {}\n  sigma2: {}\n  alpha: {}\n", s.delta, s.rho,
                     s.sigma2, s.alpha);
  out += fmt::format("  omega: {}\n  density: {}\n  bandwidth: {}\n", s.omega, s.density,
                     s.bandwidth);
  out += "power_model:\n";
  out += fmt::format("  eta: {}\n  c0: {}\n  c1: {}\n  d0: {}\n  a_rate: {}\n", p.eta, p.c0,
                     p.c1, p.d0, p.a_rate);
  out += fmt::format("  flops_per_watt: {}\n", p.flops_per_watt);
  return out;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const ConfigBundle& b) {
  return fmt::format("{:016x}", fnv1a64(to_yaml(b)));
}

}  // namespace spmimo
