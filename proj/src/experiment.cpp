#include "spmimo/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include "spmimo/asymptotics.hpp"
#include "spmimo/energy.hpp"
#include "spmimo/geometry.hpp"
#include "spmimo/mc_engine.hpp"
#include "spmimo/optimizer.hpp"
#include "spmimo/rng.hpp"
#include "spmimo/stats.hpp"
#include "spmimo/stochastic_bounds.hpp"

namespace spmimo {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string to_string(Curve c) {
  switch (c) {
    case Curve::RpK:
      return "rp_k";
    case Curve::RpOpt:
      return "rp_opt";
    case Curve::SpNoSub:
      return "sp_nosub";
    case Curve::SpEstSub:
      return "sp_estsub";
    case Curve::SpPerfSub:
      return "sp_perfsub";
  }
  return "unknown";
}

Curve curve_from_string(std::string_view name) {
  for (Curve c : all_curves())
    if (to_string(c) == name) return c;
  throw ConfigError(fmt::format("unknown curve '{}'", name));
}

Scheme curve_scheme(Curve c) {
  switch (c) {
    case Curve::RpK:
    case Curve::RpOpt:
      return Scheme::RP;
    case Curve::SpNoSub:
      return Scheme::SP_NoSub;
    case Curve::SpEstSub:
      return Scheme::SP_EstSub;
    case Curve::SpPerfSub:
      return Scheme::SP_PerfSub;
  }
  return Scheme::RP;
}

const std::vector<Curve>& all_curves() {
  static const std::vector<Curve> c = {Curve::RpK, Curve::RpOpt, Curve::SpNoSub, Curve::SpEstSub,
                                       Curve::SpPerfSub};
  return c;
}

std::string to_string(Scale s) { return s == Scale::Desk ? "desk" : "paper"; }

Scale scale_from_string(std::string_view name) {
  if (name == "desk") return Scale::Desk;
  if (name == "paper") return Scale::Paper;
  throw ConfigError(fmt::format("unknown scale '{}' (expected desk or paper)", name));
}

std::vector<double> sweep_range(double from, double to, double step) {
  if (!(step > 0.0) || to < from) throw ConfigError("sweep range needs step > 0 and to >= from");
  std::vector<double> v;
  long n = std::lround(std::floor((to - from) / step + 1e-9));
  for (long i = 0; i <= n; ++i) v.push_back(from + i * step);
  return v;
}

void apply_scale(ExperimentSpec& spec, Scale scale) {
  spec.scale = scale;
  if (scale == Scale::Desk) {
    spec.n_networks = 200;
    spec.n_fading = 500;
    spec.mean_bs = 20.0;
  } else {
    spec.n_networks = 1000;
    spec.n_fading = 1000;
    spec.mean_bs = 50.0;
  }
}

std::vector<std::string> scenario_names() {
  return {"fig2a", "fig2b", "fig2c", "fig2d", "fig2e", "fig3a", "fig3b", "fig3c", "fig3d", "smoke"};
}

ExperimentSpec scenario_preset(const std::string& scenario, Scale scale) {
  ExperimentSpec s;
  s.scenario = scenario;
  s.name = scenario;
  apply_scale(s, scale);
  s.est_sub_deltas = sweep_range(0.1, 0.9, 0.1);
  const auto& all = all_curves();
  if (scenario == "fig2a") {
    s.sweep_values = {100, 300, 500};
    s.curves = {Curve::RpOpt, Curve::SpNoSub, Curve::SpPerfSub};
  } else if (scenario == "fig2b" || scenario == "fig3c") {
    s.sweep_values = sweep_range(50, 500, 50);
    s.curves = all;
  } else if (scenario == "fig2c" || scenario == "fig3d") {
    s.sweep_var = "tau_c";
    s.sweep_values = sweep_range(50, 400, 50);
    s.curves = all;
  } else if (scenario == "fig2d") {
    s.sweep_var = "snr_db";
    s.sweep_values = sweep_range(-15, 10, 5);
    s.curves = all;
  } else if (scenario == "fig2e") {
    s.sweep_var = "K";
    s.sweep_values = sweep_range(2, 20, 2);
    s.curves = all;
  } else if (scenario == "fig3a") {
    s.sweep_values = {100};
    s.curves = all;
  } else if (scenario == "fig3b") {
    s.sweep_values = {100};
    s.curves = {Curve::RpK, Curve::RpOpt, Curve::SpNoSub, Curve::SpPerfSub};
  } else if (scenario == "smoke") {
    s.sweep_values = {8};
    s.curves = all;
    s.n_networks = 2;
    s.n_fading = 100;
    s.mean_bs = 4.0;
    s.base.system.K = 2;
    s.base.system.tau_p = 2;
    s.base.system.tau_c = 16;
    s.est_sub_deltas = {0.3, 0.5, 0.7};
    s.delta_step = 0.05;
  } else {
    throw ConfigError(fmt::format("unknown scenario '{}'", scenario));
  }
  return s;
}

namespace {

std::string where(const YAML::Node& n) {
  auto m = n.Mark();
  if (m.line < 0) return "";
  return fmt::format("line {}: ", m.line + 1);
}

template <typename T>
T read_as(const YAML::Node& n, const std::string& key) {
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(fmt::format("{}field '{}' has the wrong type", where(n), key));
  }
}

long read_count(const YAML::Node& n, const std::string& key, long min) {
  double v = read_as<double>(n, key);
  if (v != std::floor(v) || v < min || v > 1e12)
    throw ConfigError(fmt::format("{}field '{}' must be an integer >= {}", where(n), key, min));
  return static_cast<long>(v);
}

std::vector<double> read_reals(const YAML::Node& n, const std::string& key) {
  if (!n.IsSequence() || n.size() == 0)
    throw ConfigError(fmt::format("{}field '{}' must be a non-empty list", where(n), key));
  std::vector<double> v;
  for (const auto& x : n) v.push_back(read_as<double>(x, key));
  return v;
}

}  // namespace

ExperimentSpec parse_spec_string(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(fmt::format("line {}: {}", e.mark.line + 1, e.msg));
  }
  if (!root.IsMap()) throw ConfigError("spec root must be a mapping");
  static const std::set<std::string> known = {
      "scenario", "name",    "sweep",   "curves",     "n_networks",     "n_fading",
      "seed",     "scale",   "threads", "mean_bs",    "delta_step",     "est_sub_deltas",
      "users_per_network",   "system",  "power_model"};
  for (const auto& kv : root) {
    auto key = kv.first.as<std::string>();
    if (!known.count(key)) throw ConfigError(fmt::format("{}unknown field '{}'", where(kv.first), key));
  }
  if (!root["scenario"]) throw ConfigError("field 'scenario' is required");
  Scale scale = Scale::Desk;
  if (root["scale"]) {
    try {
      scale = scale_from_string(read_as<std::string>(root["scale"], "scale"));
    } catch (const ConfigError& e) {
      throw ConfigError(where(root["scale"]) + e.what());
    }
  }
  ExperimentSpec s;
  try {
    s = scenario_preset(read_as<std::string>(root["scenario"], "scenario"), scale);
  } catch (const ConfigError& e) {
    throw ConfigError(where(root["scenario"]) + e.what());
  }
  if (root["name"]) s.name = read_as<std::string>(root["name"], "name");
  if (auto sw = root["sweep"]) {
    if (!sw.IsMap()) throw ConfigError(fmt::format("{}'sweep' must be a mapping", where(sw)));
    for (const auto& kv : sw) {
      auto key = kv.first.as<std::string>();
      if (key != "var" && key != "values" && key != "from" && key != "to" && key != "step")
        throw ConfigError(fmt::format("{}unknown field 'sweep.{}'", where(kv.first), key));
    }
    if (sw["var"]) {
      s.sweep_var = read_as<std::string>(sw["var"], "sweep.var");
      if (s.sweep_var != "M" && s.sweep_var != "tau_c" && s.sweep_var != "snr_db" && s.sweep_var != "K")
        throw ConfigError(fmt::format("{}sweep.var must be one of M, tau_c, snr_db, K", where(sw["var"])));
    }
    if (sw["values"]) {
      if (sw["from"] || sw["to"] || sw["step"])
        throw ConfigError(fmt::format("{}give either sweep.values or from/to/step", where(sw)));
      s.sweep_values = read_reals(sw["values"], "sweep.values");
    } else if (sw["from"] || sw["to"] || sw["step"]) {
      if (!(sw["from"] && sw["to"] && sw["step"]))
        throw ConfigError(fmt::format("{}sweep needs from, to and step together", where(sw)));
      try {
        s.sweep_values = sweep_range(read_as<double>(sw["from"], "sweep.from"),
                                     read_as<double>(sw["to"], "sweep.to"),
                                     read_as<double>(sw["step"], "sweep.step"));
      } catch (const ConfigError& e) {
        throw ConfigError(where(sw) + e.what());
      }
    }
  }
  if (auto c = root["curves"]) {
    if (!c.IsSequence() || c.size() == 0)
      throw ConfigError(fmt::format("{}'curves' must be a non-empty list", where(c)));
    s.curves.clear();
    for (const auto& x : c) {
      try {
        s.curves.push_back(curve_from_string(read_as<std::string>(x, "curves")));
      } catch (const ConfigError& e) {
        throw ConfigError(where(x) + e.what());
      }
    }
  }
  if (root["n_networks"]) s.n_networks = read_count(root["n_networks"], "n_networks", 1);
  if (root["n_fading"]) s.n_fading = read_count(root["n_fading"], "n_fading", 100);
  if (root["seed"]) s.seed = static_cast<std::uint64_t>(read_count(root["seed"], "seed", 0));
  if (root["threads"]) s.threads = static_cast<int>(read_count(root["threads"], "threads", 1));
  if (root["users_per_network"])
    s.users_per_network = static_cast<int>(read_count(root["users_per_network"], "users_per_network", 0));
  if (root["mean_bs"]) {
    s.mean_bs = read_as<double>(root["mean_bs"], "mean_bs");
    if (!(s.mean_bs > 0.0)) throw ConfigError(fmt::format("{}mean_bs must be positive", where(root["mean_bs"])));
  }
  if (root["delta_step"]) {
    s.delta_step = read_as<double>(root["delta_step"], "delta_step");
    if (!(s.delta_step > 0.0 && s.delta_step <= 0.5))
      throw ConfigError(fmt::format("{}delta_step must lie in (0, 0.5]", where(root["delta_step"])));
  }
  if (root["est_sub_deltas"]) {
    s.est_sub_deltas = read_reals(root["est_sub_deltas"], "est_sub_deltas");
    for (double d : s.est_sub_deltas)
      if (!(d > 0.0 && d < 1.0))
        throw ConfigError(fmt::format("{}est_sub_deltas must lie in (0,1)", where(root["est_sub_deltas"])));
  }
  YAML::Node cfg(YAML::NodeType::Map);
  if (root["system"]) cfg["system"] = root["system"];
  if (root["power_model"]) cfg["power_model"] = root["power_model"];
  s.base = parse_config(cfg, s.base);
  auto v = validate(s.base.system);
  if (!v.empty()) throw ConfigError(fmt::format("system: {} ({})", v.front().message, v.front().field));
  for (double x : s.sweep_values) {
    auto c = apply_sweep(s.base.system, s.sweep_var, x);
    auto vv = validate(c);
    if (!vv.empty())
      throw ConfigError(fmt::format("sweep value {} of {}: {}", x, s.sweep_var, vv.front().message));
  }
  return s;
}

ExperimentSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open spec '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_spec_string(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path, e.what()));
  }
}

SystemConfig apply_sweep(const SystemConfig& base, const std::string& var, double value) {
  SystemConfig c = base;
  auto as_int = [&](double v) {
    if (v != std::floor(v)) throw ConfigError(fmt::format("sweep value {} of {} is not an integer", v, var));
    return static_cast<int>(v);
  };
  if (var == "M")
    c.M = as_int(value);
  else if (var == "tau_c")
    c.tau_c = as_int(value);
  else if (var == "K")
    c.K = as_int(value);
  else if (var == "snr_db")
    c.rho = c.sigma2 * db_to_linear(value);
  else
    throw ConfigError(fmt::format("unknown sweep variable '{}'", var));
  c.tau_p = std::clamp(c.tau_p, c.K, std::max(c.K, c.tau_c));
  return c;
}

double rp_rate_at(const LsfSnapshot& s, const SystemConfig& cfg, int tau_p) {
  SystemConfig c = cfg;
  c.tau_p = tau_p;
  return prelog(Scheme::RP, c) * std::log2(1.0 + sinr_rp(s, c).sinr);
}

LsfOptimum rp_rate_opt(const LsfSnapshot& s, const SystemConfig& cfg) {
  auto r = optimize_tau_p([&](int t) { return rp_rate_at(s, cfg, t); }, cfg.K, cfg.tau_c);
  return {r.value, static_cast<double>(r.tau_p)};
}

namespace {

LsfSnapshot split(const LsfSnapshot& s, const SystemConfig& cfg, double delta) {
  return with_powers(s, (1.0 - delta) * cfg.rho, delta * cfg.rho);
}

double sp_rate_at(Scheme scheme, const LsfSnapshot& s, const SystemConfig& cfg, double delta) {
  auto x = split(s, cfg, delta);
  double sinr = scheme == Scheme::SP_PerfSub ? sinr_sp_ub(x, cfg).sinr : sinr_sp(x, cfg).sinr;
  return std::log2(1.0 + sinr);
}

}  // namespace

LsfOptimum sp_rate_opt(Scheme scheme, const LsfSnapshot& s, const SystemConfig& cfg, double step) {
  if (scheme != Scheme::SP_NoSub && scheme != Scheme::SP_PerfSub)
    throw std::invalid_argument("sp_rate_opt: closed form needs sp_nosub or sp_perfsub");
  auto r = optimize_delta([&](double d) { return sp_rate_at(scheme, s, cfg, d); }, step);
  return {r.value, r.delta};
}

LsfOptimum rp_limit_opt(const LsfSnapshot& s, const SystemConfig& cfg) {
  double sir = sir_rp(s, cfg);
  if (!std::isfinite(sir)) return {INFINITY, 0.0};
  double z = zeta_max(sir);
  return {rp_asymptotic_rate(z, sir), z};
}

LsfOptimum sp_limit_opt(Scheme scheme, const LsfSnapshot& s, const SystemConfig& cfg, double step) {
  auto f = [&](double d) {
    auto lim = rate_limit(scheme, split(s, cfg, d), cfg);
    return std::log2(1.0 + lim.sinr_limit);
  };
  auto r = optimize_delta(f, step);
  return {r.value, r.delta};
}

namespace {

SystemConfig point_config(const ExperimentSpec& spec, double v) {
  SystemConfig c = apply_sweep(spec.base.system, spec.sweep_var, v);
  require_valid(c);
  return c;
}

DeploymentOptions deployment(const ExperimentSpec& spec) {
  DeploymentOptions d;
  d.mean_bs = spec.mean_bs;
  return d;
}

std::uint64_t network_seed(const ExperimentSpec& spec, long n) {
  return stream_key(spec.seed, {kNetworkStream, static_cast<std::uint64_t>(n)});
}

void add_terms(SinrBreakdown& acc, const SinrBreakdown& b, double w) {
  double g = b.coherent_gain;
  acc.pilot_contamination += w * b.pilot_contamination / g;
  acc.extra_coherent += w * b.extra_coherent / g;
  acc.non_coherent += w * b.non_coherent / g;
  acc.noise_term += w * b.noise_term / g;
}

NetworkSample closed_form_sample(const ExperimentSpec& spec, Curve curve, const SystemConfig& cfg,
                                 const NetworkRealization& net) {
  NetworkSample out;
  int users = spec.users_per_network > 0 ? std::min(spec.users_per_network, cfg.K) : cfg.K;
  double w = 1.0 / users;
  for (int i = 0; i < users; ++i) {
    LsfSnapshot s = make_snapshot(net, 0, i, cfg.rho, cfg.rho);
    double rate = 0.0, arg = 0.0;
    SinrBreakdown b;
    switch (curve) {
      case Curve::RpK: {
        SystemConfig c = cfg;
        c.tau_p = cfg.K;
        b = sinr_rp(s, c);
        rate = prelog(Scheme::RP, c) * std::log2(1.0 + b.sinr);
        arg = cfg.K;
        break;
      }
      case Curve::RpOpt: {
        auto o = rp_rate_opt(s, cfg);
        SystemConfig c = cfg;
        c.tau_p = static_cast<int>(o.arg);
        b = sinr_rp(s, c);
        rate = o.rate;
        arg = o.arg;
        break;
      }
      case Curve::SpNoSub:
      case Curve::SpPerfSub: {
        Scheme sc = curve_scheme(curve);
        auto o = sp_rate_opt(sc, s, cfg, spec.delta_step);
        auto x = split(s, cfg, o.arg);
        b = sc == Scheme::SP_PerfSub ? sinr_sp_ub(x, cfg) : sinr_sp(x, cfg);
        rate = o.rate;
        arg = o.arg;
        break;
      }
      case Curve::SpEstSub:
        throw std::logic_error("closed_form_sample: sp_estsub has no closed form");
    }
    out.rate += w * rate;
    out.arg += w * arg;
    add_terms(out.terms_over_gain, b, w);
    out.ue_rates.push_back(rate);
  }
  return out;
}

NetworkSample est_sub_sample(const ExperimentSpec& spec, const SystemConfig& cfg,
                             const NetworkRealization& net, long n) {
  const double base_delta = 0.5;
  LsfSnapshot s = make_snapshot(net, 0, 0, (1.0 - base_delta) * cfg.rho, base_delta * cfg.rho);
  std::vector<double> ds, ps;
  for (double d : spec.est_sub_deltas) {
    ds.push_back((1.0 - d) / (1.0 - base_delta));
    ps.push_back(d / base_delta);
  }
  McOptions mo;
  mo.n_fading = spec.n_fading;
  mo.seed = stream_key(spec.seed, {kFadingStream, static_cast<std::uint64_t>(n)});
  mo.threads = 1;
  mo.batches = static_cast<int>(std::min<long>(40, spec.n_fading / 10));
  auto fam = empirical_sinr_sp_family(s, ds, ps, cfg, mo);
  std::size_t best = 0;
  for (std::size_t k = 1; k < fam.size(); ++k)
    if (fam[k].estsub.sinr.sinr > fam[best].estsub.sinr.sinr) best = k;
  NetworkSample out;
  out.rate = std::log2(1.0 + std::max(0.0, fam[best].estsub.sinr.sinr));
  out.arg = spec.est_sub_deltas[best];
  out.ue_rates.push_back(out.rate);
  return out;
}

std::optional<double> bound_for(const ExperimentSpec& spec, Curve curve, const SystemConfig& cfg) {
  BoundInputs in = bound_inputs(cfg);
  switch (curve) {
    case Curve::RpK:
      in.tau_p = cfg.K;
      return lb_rate_rp(in);
    case Curve::RpOpt:
      return optimize_tau_p([&](int t) {
               auto x = in;
               x.tau_p = t;
               return lb_rate_rp(x);
             }, cfg.K, cfg.tau_c).value;
    case Curve::SpNoSub:
    case Curve::SpPerfSub: {
      Scheme sc = curve_scheme(curve);
      return optimize_delta([&](double d) {
               auto x = in;
               x.delta = d;
               return lb_rate(sc, x);
             }, spec.delta_step).value;
    }
    case Curve::SpEstSub:
      break;
  }
  return std::nullopt;
}

}  // namespace

CurvePoint evaluate_point(const ExperimentSpec& spec, Curve curve, double sweep_value,
                          std::vector<NetworkSample>* samples) {
  SystemConfig cfg = point_config(spec, sweep_value);
  std::vector<NetworkSample> per(static_cast<std::size_t>(spec.n_networks));
  parallel_for(per.size(), spec.threads, [&](std::size_t n) {
    auto net = sample_network_retry(cfg, network_seed(spec, static_cast<long>(n)), deployment(spec));
    per[n] = curve == Curve::SpEstSub ? est_sub_sample(spec, cfg, net, static_cast<long>(n))
                                      : closed_form_sample(spec, curve, cfg, net);
  });
  const double per_cell = spec.sweep_var == "K" ? cfg.K : 1.0;
  std::vector<double> rates;
  double arg = 0.0;
  for (const auto& s : per) {
    rates.push_back(per_cell * s.rate);
    arg += s.arg / per.size();
  }
  auto ci = mean_ci(rates, 0.95);
  CurvePoint p;
  p.sweep_value = sweep_value;
  p.mean_rate = ci.mean;
  p.ci_low = ci.lo();
  p.ci_high = ci.hi();
  if (auto b = bound_for(spec, curve, cfg)) p.bound_value = per_cell * *b;
  p.opt_arg = arg;
  RateSource src = curve == Curve::SpEstSub ? RateSource::kMonteCarlo : RateSource::kClosedFormAverage;
  p.ee = ee(curve_scheme(curve), ci.mean / per_cell * cfg.bandwidth, cfg, spec.base.power, src).ee;
  if (samples) *samples = std::move(per);
  return p;
}

std::string spec_hash(const ExperimentSpec& spec) {
  std::string t = fmt::format("{}|{}|{}|", spec.scenario, spec.name, spec.sweep_var);
  for (double v : spec.sweep_values) t += fmt::format("{},", v);
  t += "|";
  for (Curve c : spec.curves) t += to_string(c) + ",";
  t += fmt::format("|{}|{}|{}|{}|{}|{}|", spec.n_networks, spec.n_fading, spec.mean_bs, spec.seed,
                   spec.delta_step, spec.users_per_network);
  for (double v : spec.est_sub_deltas) t += fmt::format("{},", v);
  t += to_yaml(spec.base);
  return fmt::format("{:016x}", fnv1a64(t));
}

bool RunSummary::all_pass() const {
  return std::all_of(invariants.begin(), invariants.end(), [](const auto& c) { return c.pass; });
}

namespace {

std::string fmt_real(double v) { return fmt::format("{}", v); }

std::string header_line() { return fmt::format("# spmimo {}\n", kToolVersion); }

json point_to_json(const CurvePoint& p) {
  json j;
  j["sweep_value"] = p.sweep_value;
  j["mean_rate"] = p.mean_rate;
  j["ci_low"] = p.ci_low;
  j["ci_high"] = p.ci_high;
  j["bound_value"] = p.bound_value ? json(*p.bound_value) : json(nullptr);
  j["opt_arg"] = p.opt_arg;
  j["ee"] = p.ee;
  return j;
}

CurvePoint point_from_json(const json& j) {
  CurvePoint p;
  p.sweep_value = j.at("sweep_value").get<double>();
  p.mean_rate = j.at("mean_rate").get<double>();
  p.ci_low = j.at("ci_low").get<double>();
  p.ci_high = j.at("ci_high").get<double>();
  if (!j.at("bound_value").is_null()) p.bound_value = j.at("bound_value").get<double>();
  p.opt_arg = j.at("opt_arg").get<double>();
  p.ee = j.at("ee").get<double>();
  return p;
}

struct PointExtras {
  std::vector<double> terms;     // pilot_contamination, extra_coherent, non_coherent, noise
  std::vector<double> ue_rates;  // CDF scenario only
};

void write_file(const fs::path& path, const std::string& text) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", tmp.string()));
    out << text;
  }
  fs::rename(tmp, path);
}

std::string gnuplot_script(const ExperimentSpec& spec) {
  std::string xl = spec.sweep_var == "snr_db" ? "SNR [dB]" : spec.sweep_var;
  bool energy = spec.scenario == "fig3c" || spec.scenario == "fig3d";
  std::string out;
  out += "set datafile separator ','\n";
  out += "set key left top\n";
  out += fmt::format("set xlabel '{}'\n", xl);
  out += fmt::format("set ylabel '{}'\n",
                     energy ? "EE [bit/J]"
                            : (spec.sweep_var == "K" ? "sum rate per cell [bit/s/Hz]"
                                                     : "rate per UE [bit/s/Hz]"));
  out += fmt::format("set terminal pngcairo size 900,600\nset output '{}.png'\n", spec.name);
  out += "plot ";
  for (std::size_t i = 0; i < spec.curves.size(); ++i) {
    std::string f = fmt::format("{}_{}.csv", spec.name, to_string(spec.curves[i]));
    if (i) out += ", \\\n     ";
    if (energy)
      out += fmt::format("'{}' skip 2 using 1:7 with linespoints title '{}'", f, to_string(spec.curves[i]));
    else
      out += fmt::format("'{}' skip 2 using 1:2:3:4 with yerrorlines title '{}'", f,
                         to_string(spec.curves[i]));
  }
  out += "\n";
  return out;
}

}  // namespace

RunSummary run_experiment(const ExperimentSpec& spec, const RunOptions& opt) {
  if (spec.curves.empty() || spec.sweep_values.empty())
    throw ConfigError("spec needs at least one curve and one sweep value");
  RunSummary sum;
  sum.out_dir = opt.out_dir;
  fs::create_directories(opt.out_dir);
  const fs::path dir(opt.out_dir);
  const std::string hash = spec_hash(spec);
  const fs::path ckpt = dir / (spec.name + ".checkpoint.json");
  const bool want_cdf = spec.scenario == "fig3a" || spec.scenario == "smoke";

  json state;
  if (opt.resume && fs::exists(ckpt)) {
    std::ifstream in(ckpt);
    try {
      json j = json::parse(in);
      if (j.value("spec_hash", "") == hash) state = j;
    } catch (const json::exception&) {
    }
  }
  if (state.is_null()) {
    state = json::object();
    state["spec_hash"] = hash;
    state["points"] = json::object();
  }

  long computed = 0;
  for (Curve c : spec.curves) {
    const std::string cn = to_string(c);
    for (std::size_t k = 0; k < spec.sweep_values.size(); ++k) {
      const std::string key = fmt::format("{}/{}", cn, k);
      if (state["points"].contains(key)) {
        ++sum.resumed_points;
        continue;
      }
      if (opt.fail_after_points >= 0 && computed >= opt.fail_after_points)
        throw std::runtime_error("run interrupted (test hook)");
      if (opt.progress)
        opt.progress(fmt::format("{} {}={} ({} networks)", cn, spec.sweep_var, spec.sweep_values[k],
                                 spec.n_networks));
      std::vector<NetworkSample> samples;
      CurvePoint p = evaluate_point(spec, c, spec.sweep_values[k], &samples);
      json e;
      e["row"] = point_to_json(p);
      std::vector<double> terms(4, 0.0), ue;
      for (const auto& s : samples) {
        terms[0] += s.terms_over_gain.pilot_contamination / samples.size();
        terms[1] += s.terms_over_gain.extra_coherent / samples.size();
        terms[2] += s.terms_over_gain.non_coherent / samples.size();
        terms[3] += s.terms_over_gain.noise_term / samples.size();
        if (want_cdf) ue.insert(ue.end(), s.ue_rates.begin(), s.ue_rates.end());
      }
      e["terms"] = terms;
      if (want_cdf) e["ue_rates"] = ue;
      state["points"][key] = e;
      write_file(ckpt, state.dump());
      ++computed;
    }
  }

  // Assemble outputs from the checkpoint state so fresh and resumed runs agree.
  std::map<Curve, std::vector<PointExtras>> extras;
  for (Curve c : spec.curves) {
    const std::string cn = to_string(c);
    std::vector<CurvePoint> rows;
    for (std::size_t k = 0; k < spec.sweep_values.size(); ++k) {
      const json& e = state["points"][fmt::format("{}/{}", cn, k)];
      rows.push_back(point_from_json(e["row"]));
      PointExtras x;
      x.terms = e["terms"].get<std::vector<double>>();
      if (e.contains("ue_rates")) x.ue_rates = e["ue_rates"].get<std::vector<double>>();
      extras[c].push_back(std::move(x));
    }
    std::string csv = header_line();
    csv += "sweep_value,mean_rate,ci_low,ci_high,bound_value,opt_tau_p_or_delta,ee\n";
    for (const auto& p : rows)
      csv += fmt::format("{},{},{},{},{},{},{}\n", fmt_real(p.sweep_value), fmt_real(p.mean_rate),
                         fmt_real(p.ci_low), fmt_real(p.ci_high),
                         p.bound_value ? fmt_real(*p.bound_value) : std::string(),
                         fmt_real(p.opt_arg), fmt_real(p.ee));
    std::string f = fmt::format("{}_{}.csv", spec.name, cn);
    write_file(dir / f, csv);
    sum.files.push_back(f);
    sum.rows.emplace_back(c, std::move(rows));
  }

  // Invariants of every row.
  for (const auto& [c, rows] : sum.rows) {
    for (const auto& p : rows) {
      std::string at = fmt::format("{} {}={}", to_string(c), spec.sweep_var, p.sweep_value);
      bool ok = p.ci_low <= p.mean_rate && p.mean_rate <= p.ci_high;
      sum.invariants.push_back({"ci_brackets_mean", ok, at});
      if (p.bound_value) {
        double half = p.ci_high - p.mean_rate;
        sum.invariants.push_back({"bound_below_mean", *p.bound_value <= p.mean_rate + half,
                                  fmt::format("{}: bound {} mean {} half {}", at, *p.bound_value,
                                              p.mean_rate, half)});
      }
    }
  }
  auto find_rows = [&](Curve c) -> const std::vector<CurvePoint>* {
    for (const auto& [cc, rows] : sum.rows)
      if (cc == c) return &rows;
    return nullptr;
  };
  auto dominance = [&](Curve hi, Curve lo, const char* name) {
    auto a = find_rows(hi), b = find_rows(lo);
    if (!a || !b) return;
    for (std::size_t k = 0; k < a->size(); ++k)
      sum.invariants.push_back({name, (*a)[k].mean_rate >= (*b)[k].mean_rate,
                                fmt::format("{}={}: {} vs {}", spec.sweep_var, (*a)[k].sweep_value,
                                            (*a)[k].mean_rate, (*b)[k].mean_rate)});
  };
  dominance(Curve::SpPerfSub, Curve::SpNoSub, "perfsub_above_nosub");
  dominance(Curve::RpOpt, Curve::RpK, "rp_opt_above_rp_k");

  // Interference sources relative to the coherent gain.
  if (spec.scenario == "fig3b" || spec.scenario == "smoke") {
    std::string csv = header_line();
    csv += "curve,sweep_value,pilot_contamination,extra_coherent,non_coherent,noise,coherent_total,non_coherent_total\n";
    for (Curve c : spec.curves) {
      if (c == Curve::SpEstSub) continue;
      for (std::size_t k = 0; k < spec.sweep_values.size(); ++k) {
        const auto& t = extras[c][k].terms;
        double coh = t[0] + t[1];
        csv += fmt::format("{},{},{},{},{},{},{},{}\n", to_string(c), fmt_real(spec.sweep_values[k]),
                           fmt_real(t[0]), fmt_real(t[1]), fmt_real(t[2]), fmt_real(t[3]),
                           fmt_real(coh), fmt_real(t[2]));
        sum.invariants.push_back({"coherent_below_non_coherent", coh < t[2],
                                  fmt::format("{}: coherent {} non-coherent {}", to_string(c), coh, t[2])});
      }
    }
    std::string f = spec.name + "_interference.csv";
    write_file(dir / f, csv);
    sum.files.push_back(f);
  }

  // Empirical CDF of the per-UE rates.
  if (want_cdf) {
    for (Curve c : spec.curves) {
      auto xs = extras[c].front().ue_rates;
      std::sort(xs.begin(), xs.end());
      std::string csv = header_line() + "rate,cdf\n";
      for (std::size_t i = 0; i < xs.size(); ++i)
        csv += fmt::format("{},{}\n", fmt_real(xs[i]), fmt_real(double(i + 1) / xs.size()));
      std::string f = fmt::format("{}_{}_cdf.csv", spec.name, to_string(c));
      write_file(dir / f, csv);
      sum.files.push_back(f);
    }
  }

  // M -> infinity limits with optimized pilot fraction / split.
  if (spec.scenario == "fig2b" || spec.scenario == "smoke") {
    SystemConfig cfg = spec.base.system;
    std::vector<std::vector<double>> vals(4, std::vector<double>(spec.n_networks));
    parallel_for(static_cast<std::size_t>(spec.n_networks), spec.threads, [&](std::size_t n) {
      auto net = sample_network_retry(cfg, network_seed(spec, static_cast<long>(n)), deployment(spec));
      double r[4] = {0, 0, 0, 0};
      for (int i = 0; i < cfg.K; ++i) {
        auto s = make_snapshot(net, 0, i, cfg.rho, cfg.rho);
        SystemConfig ck = cfg;
        ck.tau_p = cfg.K;
        r[0] += std::log2(1.0 + rate_limit(Scheme::RP, s, ck).sinr_limit) * prelog(Scheme::RP, ck);
        r[1] += rp_limit_opt(s, cfg).rate;
        r[2] += sp_limit_opt(Scheme::SP_NoSub, s, cfg, spec.delta_step).rate;
        r[3] += sp_limit_opt(Scheme::SP_PerfSub, s, cfg, spec.delta_step).rate;
      }
      for (int j = 0; j < 4; ++j) vals[j][n] = r[j] / cfg.K;
    });
    const char* names[4] = {"rp_k", "rp_opt", "sp_nosub", "sp_perfsub"};
    std::string csv = header_line() + "curve,limit_rate,ci_low,ci_high\n";
    for (int j = 0; j < 4; ++j) {
      auto ci = mean_ci(vals[j]);
      csv += fmt::format("{},{},{},{}\n", names[j], fmt_real(ci.mean), fmt_real(ci.lo()), fmt_real(ci.hi()));
    }
    std::string f = spec.name + "_limits.csv";
    write_file(dir / f, csv);
    sum.files.push_back(f);
  }

  write_file(dir / (spec.name + ".gp"), gnuplot_script(spec));
  sum.files.push_back(spec.name + ".gp");

  json m;
  m["tool"] = "spmimo";
  m["version"] = kToolVersion;
  m["scenario"] = spec.scenario;
  m["name"] = spec.name;
  m["spec_hash"] = hash;
  m["config_hash"] = config_hash(spec.base);
  m["seed"] = spec.seed;
  m["scale"] = to_string(spec.scale);
  m["n_networks"] = spec.n_networks;
  m["n_fading"] = spec.n_fading;
  m["mean_bs"] = spec.mean_bs;
  m["users_per_network"] = spec.users_per_network > 0 ? spec.users_per_network : spec.base.system.K;
  m["sweep"] = {{"var", spec.sweep_var}, {"values", spec.sweep_values}};
  m["rate_unit"] = spec.sweep_var == "K" ? "bit/s/Hz per cell" : "bit/s/Hz per UE";
  m["ee_unit"] = "bit/J";
  json curves = json::array();
  for (Curve c : spec.curves) {
    json j;
    j["curve"] = to_string(c);
    j["file"] = fmt::format("{}_{}.csv", spec.name, to_string(c));
    switch (c) {
      case Curve::RpK:
        j["optimization"] = "none (tau_p = K)";
        j["rate_source"] = "closed_form_average";
        break;
      case Curve::RpOpt:
        j["optimization"] = "tau_p per LSF realization, exhaustive over [K, tau_c]";
        j["rate_source"] = "closed_form_average";
        break;
      case Curve::SpNoSub:
      case Curve::SpPerfSub:
        j["optimization"] = fmt::format("delta per LSF realization, grid step {} + golden refinement",
                                        spec.delta_step);
        j["rate_source"] = "closed_form_average";
        break;
      case Curve::SpEstSub:
        j["optimization"] = "delta per LSF realization, Monte Carlo on the est_sub_deltas grid";
        j["est_sub_deltas"] = spec.est_sub_deltas;
        j["rate_source"] = "monte_carlo";
        break;
    }
    j["bound"] = c == Curve::SpEstSub ? "none" : "LSF-averaged lower bound, optimized on the bound";
    curves.push_back(j);
  }
  m["curves"] = curves;
  json inv = json::array();
  for (const auto& c : sum.invariants)
    inv.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  m["invariants"] = inv;
  m["files"] = sum.files;
  m["system"] = to_yaml(spec.base);
  write_file(dir / (spec.name + "_manifest.json"), m.dump(2) + "\n");
  sum.files.push_back(spec.name + "_manifest.json");
  return sum;
}

}  // namespace spmimo
