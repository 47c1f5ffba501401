#ifndef SPMIMO_EXPERIMENT_HPP
#define SPMIMO_EXPERIMENT_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "spmimo/closed_form.hpp"
#include "spmimo/config_io.hpp"
#include "spmimo/core_types.hpp"

namespace spmimo {

inline constexpr const char* kToolVersion = "0.1.0";

// Curves of the rate figures.
//   rp_k        RP with tau_p = K
//   rp_opt      RP with tau_p maximizing the rate of each LSF realization
//   sp_nosub    SP, no pilot subtraction, Delta optimized per LSF
//   sp_estsub   SP, estimated pilot subtraction (Monte Carlo), Delta on a coarse grid
//   sp_perfsub  SP, perfect pilot subtraction, Delta optimized per LSF
enum class Curve { RpK, RpOpt, SpNoSub, SpEstSub, SpPerfSub };
std::string to_string(Curve c);
Curve curve_from_string(std::string_view name);
Scheme curve_scheme(Curve c);
const std::vector<Curve>& all_curves();

enum class Scale { Desk, Paper };
std::string to_string(Scale s);
Scale scale_from_string(std::string_view name);

struct ExperimentSpec {
  std::string name;                // output file prefix
  std::string scenario = "smoke";  // fig2a..fig2e, fig3a..fig3d, smoke
  std::string sweep_var = "M";     // M, tau_c, snr_db, K
  std::vector<double> sweep_values;
  std::vector<Curve> curves;
  long n_networks = 200;
  long n_fading = 500;
  double mean_bs = 20.0;           // N_av
  std::uint64_t seed = 1;
  Scale scale = Scale::Desk;
  int threads = 1;
  double delta_step = 0.01;                 // closed-form Delta grid
  std::vector<double> est_sub_deltas;       // Monte Carlo Delta grid
  int users_per_network = 0;                // typical-cell UEs used per network; 0 = all K
  ConfigBundle base;
};

// Defaults of a named scenario at the given scale.
ExperimentSpec scenario_preset(const std::string& scenario, Scale scale = Scale::Desk);
std::vector<std::string> scenario_names();
// Applies the scale's counts (n_networks, n_fading, mean_bs).
void apply_scale(ExperimentSpec& spec, Scale scale);

// Spec file (YAML):
//   scenario: fig2b
//   sweep: {var: M, values: [50, 100]}   or {var: M, from: 50, to: 500, step: 50}
//   curves: [rp_k, rp_opt, sp_nosub, sp_estsub, sp_perfsub]
//   n_networks, n_fading, seed, scale, threads, mean_bs, delta_step,
//   est_sub_deltas, users_per_network, name
//   system: {...}, power_model: {...}
// Fields absent from the file keep the scenario preset. Errors carry the line.
ExperimentSpec parse_spec_string(const std::string& text);
ExperimentSpec load_spec(const std::string& path);
std::vector<double> sweep_range(double from, double to, double step);

// Applies one sweep value to a config.
SystemConfig apply_sweep(const SystemConfig& base, const std::string& var, double value);

// Per-LSF optimizers on the closed forms. Rates in bit/s/Hz.
struct LsfOptimum {
  double rate = 0.0;
  double arg = 0.0;  // tau_p or Delta
};
LsfOptimum rp_rate_opt(const LsfSnapshot& s, const SystemConfig& cfg);
double rp_rate_at(const LsfSnapshot& s, const SystemConfig& cfg, int tau_p);
// Scheme SP_NoSub or SP_PerfSub; the snapshot's powers are replaced.
LsfOptimum sp_rate_opt(Scheme scheme, const LsfSnapshot& s, const SystemConfig& cfg,
                       double step = 0.01);
// M -> infinity rates with optimized pilot fraction / power split.
LsfOptimum rp_limit_opt(const LsfSnapshot& s, const SystemConfig& cfg);
LsfOptimum sp_limit_opt(Scheme scheme, const LsfSnapshot& s, const SystemConfig& cfg,
                        double step = 0.01);

// Closed-form quantities of one network for one curve, averaged over the
// typical-cell UEs used.
struct NetworkSample {
  double rate = 0.0;  // bit/s/Hz per UE
  double arg = 0.0;   // mean per-LSF optimum
  SinrBreakdown terms_over_gain;  // interference terms divided by the coherent gain
  std::vector<double> ue_rates;
};

struct CurvePoint {
  double sweep_value = 0.0;
  double mean_rate = 0.0;   // bit/s/Hz (per UE; per cell for a K sweep)
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::optional<double> bound_value;
  double opt_arg = 0.0;
  double ee = 0.0;          // bit/J
};

struct InvariantCheck {
  std::string name;
  bool pass = true;
  std::string detail;
};

struct RunSummary {
  std::string out_dir;
  std::vector<std::string> files;
  std::vector<InvariantCheck> invariants;
  long resumed_points = 0;
  bool all_pass() const;
  // Curve -> rows, in sweep order.
  std::vector<std::pair<Curve, std::vector<CurvePoint>>> rows;
};

struct RunOptions {
  std::string out_dir = "results";
  bool resume = true;
  std::function<void(const std::string&)> progress;
  // Test hook: throw after this many sweep points were computed in this call.
  long fail_after_points = -1;
};

RunSummary run_experiment(const ExperimentSpec& spec, const RunOptions& opt = {});

// One sweep point of one curve without any file output.
CurvePoint evaluate_point(const ExperimentSpec& spec, Curve curve, double sweep_value,
                          std::vector<NetworkSample>* samples = nullptr);

std::string spec_hash(const ExperimentSpec& spec);

}  // namespace spmimo

#endif
