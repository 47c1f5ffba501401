#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "spmimo/config_io.hpp"
#include "spmimo/experiment.hpp"
#include "spmimo/geometry.hpp"
#include "spmimo/rng.hpp"
#include "spmimo/validation.hpp"

using namespace spmimo;

namespace {

struct Common {
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> scale;
  std::string out = "results";
  bool fresh = false;
  bool quiet = false;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--seed", c.seed, "base seed");
  app->add_option("--threads", c.threads, "worker threads (default: hardware concurrency)")
      ->check(CLI::PositiveNumber);
  app->add_option("--scale", c.scale, "desk or paper")->check(CLI::IsMember({"desk", "paper"}));
  app->add_option("--out", c.out, "output directory");
  app->add_flag("--fresh", c.fresh, "ignore an existing checkpoint");
  app->add_flag("-q,--quiet", c.quiet, "no progress output");
}

void apply_common(ExperimentSpec& spec, const Common& c) {
  if (c.scale) apply_scale(spec, scale_from_string(*c.scale));
  if (c.seed) spec.seed = *c.seed;
  spec.threads = c.threads ? *c.threads : default_threads();
}

int run_spec(const ExperimentSpec& spec, const Common& c) {
  RunOptions opt;
  opt.out_dir = c.out;
  opt.resume = !c.fresh;
  if (!c.quiet) opt.progress = [](const std::string& m) { std::cerr << "  " << m << "\n"; };
  auto t0 = std::chrono::steady_clock::now();
  auto sum = run_experiment(spec, opt);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  for (const auto& f : sum.files) std::cout << c.out << "/" << f << "\n";
  int failed = 0;
  for (const auto& inv : sum.invariants)
    if (!inv.pass) {
      ++failed;
      std::cerr << "invariant failed: " << inv.name << " (" << inv.detail << ")\n";
    }
  std::cerr << fmt::format("{}: {} files, {} resumed points, {} invariant checks, {} failed, {:.1f} s\n",
                           spec.name, sum.files.size(), sum.resumed_points, sum.invariants.size(),
                           failed, secs);
  return failed == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uplink Massive MIMO pilot-scheme simulator"};
  app.require_subcommand(1);

  Common run_c;
  std::string spec_path;
  auto* run = app.add_subcommand("run", "run an experiment spec file");
  run->add_option("spec", spec_path, "spec file (YAML)")->required()->check(CLI::ExistingFile);
  add_common(run, run_c);

  Common sweep_c;
  std::string scenario = "fig2b", var;
  double from = 0, to = 0, step = 1;
  std::vector<std::string> curves;
  std::optional<long> n_networks, n_fading;
  std::string config_path;
  auto* sweep = app.add_subcommand("sweep", "run a scenario over an explicit range");
  sweep->add_option("--scenario", scenario, "preset the sweep starts from")
      ->check(CLI::IsMember(scenario_names()));
  sweep->add_option("--var", var, "M, tau_c, snr_db or K")->required()
      ->check(CLI::IsMember({"M", "tau_c", "snr_db", "K"}));
  sweep->add_option("--from", from)->required();
  sweep->add_option("--to", to)->required();
  sweep->add_option("--step", step)->required();
  sweep->add_option("--curves", curves, "subset of rp_k rp_opt sp_nosub sp_estsub sp_perfsub");
  sweep->add_option("--networks", n_networks, "LSF realizations per point");
  sweep->add_option("--fading", n_fading, "fading draws per LSF realization (est. subtraction)");
  sweep->add_option("--config", config_path, "system/power_model YAML")->check(CLI::ExistingFile);
  add_common(sweep, sweep_c);

  Common val_c;
  std::string report = "validation_report.json";
  auto* val = app.add_subcommand("validate", "run every oracle and invariant check");
  val->add_option("--report", report, "JSON report path");
  val->add_option("--seed", val_c.seed, "base seed");
  val->add_option("--threads", val_c.threads)->check(CLI::PositiveNumber);

  std::uint64_t net_seed = 1;
  std::string net_out;
  std::string net_config;
  double net_mean_bs = 20;
  auto* net = app.add_subcommand("network", "dump one network realization as CSV");
  net->add_option("--seed", net_seed);
  net->add_option("--mean-bs", net_mean_bs)->check(CLI::PositiveNumber);
  net->add_option("--config", net_config)->check(CLI::ExistingFile);
  net->add_option("--out", net_out, "file (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      auto spec = load_spec(spec_path);
      apply_common(spec, run_c);
      return run_spec(spec, run_c);
    }
    if (*sweep) {
      auto spec = scenario_preset(scenario, sweep_c.scale ? scale_from_string(*sweep_c.scale) : Scale::Desk);
      if (!config_path.empty()) spec.base = load_config(config_path);
      spec.name = fmt::format("{}_{}_{}_{}_{}", scenario, var, from, to, step);
      spec.sweep_var = var;
      spec.sweep_values = sweep_range(from, to, step);
      if (!curves.empty()) {
        spec.curves.clear();
        for (const auto& c : curves) spec.curves.push_back(curve_from_string(c));
      }
      apply_common(spec, sweep_c);
      if (n_networks) spec.n_networks = *n_networks;
      if (n_fading) spec.n_fading = *n_fading;
      for (double v : spec.sweep_values) require_valid(apply_sweep(spec.base.system, var, v));
      return run_spec(spec, sweep_c);
    }
    if (*val) {
      ValidationOptions vo;
      if (val_c.seed) vo.seed = *val_c.seed;
      vo.threads = val_c.threads ? *val_c.threads : default_threads();
      vo.progress = [](const std::string& m) { std::cerr << "  " << m << "\n"; };
      auto rep = validate_suite(vo);
      std::ofstream(report) << validation_report_json(rep) << "\n";
      int failed = 0;
      for (const auto& c : rep.checks) {
        std::cout << fmt::format("{} {}\n", c.pass ? "PASS" : "FAIL", c.name);
        if (!c.pass) {
          ++failed;
          std::cout << fmt::format("     observed {} expected {} tolerance {}\n", c.observed,
                                   c.expected, c.tolerance);
        }
      }
      std::cout << fmt::format("{} checks, {} failed; report: {}\n", rep.checks.size(), failed, report);
      return failed == 0 ? 0 : 2;
    }
    if (*net) {
      ConfigBundle b = net_config.empty() ? ConfigBundle{} : load_config(net_config);
      DeploymentOptions d;
      d.mean_bs = net_mean_bs;
      auto nw = sample_network_retry(b.system, net_seed, d);
      if (net_out.empty()) {
        write_network_csv(nw, std::cout);
      } else {
        std::ofstream o(net_out);
        write_network_csv(nw, o);
      }
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
