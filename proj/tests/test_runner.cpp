#include <gtest/gtest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "spmimo/experiment.hpp"

using namespace spmimo;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("spmimo_test_runner_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentSpec smoke(std::vector<double> values = {8, 16}) {
  auto s = scenario_preset("smoke");
  s.name = "smoke";
  s.sweep_values = std::move(values);
  s.seed = 5;
  return s;
}

std::vector<std::vector<double>> csv_rows(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::vector<std::vector<double>> rows;
  std::getline(in, line);
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<double> r;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) r.push_back(cell.empty() ? std::nan("") : std::stod(cell));
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

TEST(Runner, SmokeScenarioIsFastAndPassesInvariants) {
  auto dir = scratch("smoke");
  RunOptions o;
  o.out_dir = dir.string();
  auto t0 = std::chrono::steady_clock::now();
  auto sum = run_experiment(smoke(), o);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_LT(secs, 10.0);
  EXPECT_TRUE(sum.all_pass());
  for (const auto& inv : sum.invariants) EXPECT_TRUE(inv.pass) << inv.name << ": " << inv.detail;
  for (const char* f : {"smoke_rp_k.csv", "smoke_rp_opt.csv", "smoke_sp_nosub.csv", "smoke_sp_estsub.csv",
                        "smoke_sp_perfsub.csv", "smoke_interference.csv", "smoke_limits.csv",
                        "smoke_sp_perfsub_cdf.csv", "smoke.gp", "smoke_manifest.json"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
}

TEST(Runner, CurveCsvHeaderAndRowInvariants) {
  auto dir = scratch("csv");
  RunOptions o;
  o.out_dir = dir.string();
  run_experiment(smoke(), o);
  for (Curve c : all_curves()) {
    auto p = dir / ("smoke_" + to_string(c) + ".csv");
    std::ifstream in(p);
    std::string l1, l2;
    std::getline(in, l1);
    std::getline(in, l2);
    EXPECT_EQ(l1.rfind("# spmimo ", 0), 0u);
    EXPECT_EQ(l2, "sweep_value,mean_rate,ci_low,ci_high,bound_value,opt_tau_p_or_delta,ee");
    auto rows = csv_rows(p);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0][0], 8);
    EXPECT_EQ(rows[1][0], 16);
    for (const auto& r : rows) {
      ASSERT_EQ(r.size(), 7u);
      EXPECT_LE(r[2], r[1]);
      EXPECT_GE(r[3], r[1]);
      EXPECT_GT(r[1], 0.0);
      EXPECT_GT(r[6], 0.0);
      if (c == Curve::SpEstSub) EXPECT_TRUE(std::isnan(r[4]));
      else EXPECT_FALSE(std::isnan(r[4]));
    }
  }
}

TEST(Runner, RerunIsByteIdentical) {
  auto a = scratch("rerun_a"), b = scratch("rerun_b");
  RunOptions o;
  o.out_dir = a.string();
  run_experiment(smoke(), o);
  o.out_dir = b.string();
  o.resume = false;
  run_experiment(smoke(), o);
  for (const auto& e : fs::directory_iterator(a)) {
    auto name = e.path().filename();
    EXPECT_EQ(slurp(e.path()), slurp(b / name)) << name;
  }
}

TEST(Runner, ResumeAfterInterruptionMatchesUninterruptedRun) {
  auto full = scratch("resume_full"), part = scratch("resume_part");
  RunOptions o;
  o.out_dir = full.string();
  run_experiment(smoke(), o);

  o.out_dir = part.string();
  o.fail_after_points = 3;
  EXPECT_THROW(run_experiment(smoke(), o), std::runtime_error);
  EXPECT_TRUE(fs::exists(part / "smoke.checkpoint.json"));
  o.fail_after_points = -1;
  auto sum = run_experiment(smoke(), o);
  EXPECT_EQ(sum.resumed_points, 3);
  for (Curve c : all_curves()) {
    auto f = "smoke_" + to_string(c) + ".csv";
    EXPECT_EQ(slurp(full / f), slurp(part / f)) << f;
  }
}

TEST(Runner, ChangedSpecDiscardsCheckpoint) {
  auto dir = scratch("changed");
  RunOptions o;
  o.out_dir = dir.string();
  run_experiment(smoke(), o);
  auto s = smoke();
  s.seed = 6;
  EXPECT_EQ(run_experiment(s, o).resumed_points, 0);
  EXPECT_EQ(run_experiment(s, o).resumed_points, 10);
}

TEST(Runner, SpecParsing) {
  auto s = parse_spec_string("scenario: fig2c\nsweep: {var: tau_c, from: 100, to: 200, step: 50}\n"
                             "curves: [rp_opt, sp_nosub]\nn_networks: 7\nseed: 11\n");
  EXPECT_EQ(s.scenario, "fig2c");
  EXPECT_EQ(s.sweep_var, "tau_c");
  EXPECT_EQ(s.sweep_values, (std::vector<double>{100, 150, 200}));
  ASSERT_EQ(s.curves.size(), 2u);
  EXPECT_EQ(s.curves[1], Curve::SpNoSub);
  EXPECT_EQ(s.n_networks, 7);
  EXPECT_EQ(s.seed, 11u);

  auto p = parse_spec_string("scenario: fig2b\nscale: paper\n");
  EXPECT_EQ(p.n_networks, 1000);
  EXPECT_EQ(p.n_fading, 1000);
  EXPECT_EQ(p.mean_bs, 50.0);
}

TEST(Runner, SpecErrorsCarryLineNumbers) {
  auto msg = [](const std::string& text) {
    try {
      parse_spec_string(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(msg("scenario: smoke\nbogus: 1\n").find("line 2"), std::string::npos);
  EXPECT_NE(msg("scenario: smoke\nn_networks: 3\ncurves: [rp_k, nope]\n").find("line 3"), std::string::npos);
  EXPECT_NE(msg("scenario: smoke\nsweep: {var: Q, values: [1]}\n").find("line 2"), std::string::npos);
  EXPECT_NE(msg("scenario: nowhere\n").find("line 1"), std::string::npos);
  EXPECT_NE(msg("n_networks: 3\n").find("scenario"), std::string::npos);
  EXPECT_NE(msg("scenario: smoke\nsweep: {var: tau_c, values: [1]}\n"), "no error");
}

TEST(Runner, ApplySweep) {
  SystemConfig c;
  EXPECT_EQ(apply_sweep(c, "M", 300).M, 300);
  auto t = apply_sweep(c, "tau_c", 30);
  EXPECT_EQ(t.tau_c, 30);
  EXPECT_LE(t.tau_p, 30);
  EXPECT_NEAR(apply_sweep(c, "snr_db", -6).rho, c.sigma2 * std::pow(10.0, -0.6), 1e-15);
  EXPECT_EQ(apply_sweep(c, "K", 4).K, 4);
  EXPECT_THROW(apply_sweep(c, "M", 2.5), ConfigError);
  EXPECT_THROW(apply_sweep(c, "X", 2), ConfigError);
}

TEST(Runner, ShippedScenarioFilesParse) {
  int n = 0;
  for (const auto& e : fs::directory_iterator(fs::path(SPMIMO_SOURCE_DIR) / "scenarios")) {
    if (e.path().extension() != ".yaml") continue;
    auto s = load_spec(e.path().string());
    EXPECT_EQ(s.scenario, e.path().stem().string());
    EXPECT_FALSE(s.sweep_values.empty());
    EXPECT_FALSE(s.curves.empty());
    ++n;
  }
  EXPECT_EQ(n, 10);
}
