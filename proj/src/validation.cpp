#include "spmimo/validation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>
#include <json.hpp>

#include "spmimo/asymptotics.hpp"
#include "spmimo/closed_form.hpp"
#include "spmimo/energy.hpp"
#include "spmimo/experiment.hpp"
#include "spmimo/geometry.hpp"
#include "spmimo/mc_engine.hpp"
#include "spmimo/optimizer.hpp"
#include "spmimo/stats.hpp"
#include "spmimo/stochastic_bounds.hpp"

namespace spmimo {

bool ValidationReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

namespace {

class Recorder {
 public:
  Recorder(ValidationReport& r, const ValidationOptions& o) : rep_(r), opt_(o) {}

  // |observed - expected| <= tolerance
  void near(const std::string& name, double obs, double exp, double tol, std::string note = {}) {
    push({name, obs, exp, tol, std::abs(obs - exp) <= tol, std::move(note)});
  }
  // observed <= expected + tolerance
  void at_most(const std::string& name, double obs, double exp, double tol, std::string note = {}) {
    push({name, obs, exp, tol, obs <= exp + tol, std::move(note)});
  }

 private:
  void push(CheckResult c) {
    if (opt_.progress) opt_.progress(fmt::format("{} {}", c.pass ? "pass" : "FAIL", c.name));
    rep_.checks.push_back(std::move(c));
  }
  ValidationReport& rep_;
  const ValidationOptions& opt_;
};

double bisect_w(double z) {
  double lo = -1.0, hi = std::max(1.0, std::log1p(z) + 1.0);
  for (int i = 0; i < 200; ++i) {
    double m = 0.5 * (lo + hi);
    (m * std::exp(m) < z ? lo : hi) = m;
  }
  return 0.5 * (lo + hi);
}

double gamma_by_quadrature(double x) {
  const int n = 200000;
  const double hi = 12.0;
  double h = hi / n, s = 0;
  for (int i = 0; i <= n; ++i) {
    double u = i * h;
    double f = u == 0.0 ? 0.0 : 2.0 * std::pow(u, 2 * x - 1) * std::exp(-u * u);
    s += f * (i == 0 || i == n ? 1 : (i % 2 ? 4 : 2));
  }
  return s * h / 3.0;
}

LsfSnapshot hand_snapshot(double rho_d, double rho_p) {
  LsfSnapshot s;
  s.cell = {0, 0, 1, 1};
  s.beta_cross = {1, 0.5, 0.2, 0.1};
  s.beta_serving = {1, 0.5, 0.75, 0.4};
  s.users_per_cell = 2;
  return with_powers(s, rho_d, rho_p);
}

SystemConfig hand_config() {
  SystemConfig c;
  c.M = 8;
  c.K = 2;
  c.tau_p = 4;
  c.tau_c = 8;
  c.sigma2 = 0.5;
  c.rho = 1.0;
  c.delta = 0.4;
  return c;
}

void lambert_checks(Recorder& r) {
  r.near("lambert_w0(10) vs bisection", lambert_w0(10.0), bisect_w(10.0), 1e-12);
  double worst = 0;
  const double lo = -std::exp(-1.0) + 1e-6;
  for (int i = 0; i <= 2000; ++i) {
    double z = i < 1000 ? lo * (1.0 - i / 1000.0) : std::pow(10.0, -8.0 + 14.0 * (i - 1000) / 1000.0);
    double w = lambert_w0(z);
    worst = std::max(worst, std::abs(w * std::exp(w) - z) / std::max(1.0, std::abs(z)));
  }
  r.at_most("lambert_w0 round trip, relative residual", worst, 0.0, 1e-12);
  double best = 0, bv = -1;
  for (int i = 1; i < 1000000; ++i) {
    double z = i / 1e6, v = rp_asymptotic_rate(z, 10.0);
    if (v > bv) {
      bv = v;
      best = z;
    }
  }
  r.near("zeta_max(10) vs grid argmax", zeta_max(10.0), best, 1e-4);
  r.near("zeta_max(1e-8) vs series 1/2 - S/16", zeta_max(1e-8), 0.5 - 1e-8 / 16, 1e-12);
}

void closed_form_checks(Recorder& r) {
  auto s = hand_snapshot(0.6, 0.4);
  SystemConfig c;
  c.M = 8;
  c.tau_p = 4;
  c.tau_c = 8;
  c.sigma2 = 0.5;
  c.K = 2;
  r.near("sinr_rp hand instance vs rational oracle", sinr_rp(s, c).sinr, 1.5696105948715153, 1e-12);
  r.near("sinr_sp hand instance vs rational oracle", sinr_sp(s, c).sinr, 0.55709057592975997, 1e-12);
  r.near("sinr_sp_ub hand instance vs rational oracle", sinr_sp_ub(s, c).sinr, 0.8835281110488229, 1e-12);
  r.near("gamma_sp hand instance vs rational oracle", gamma_sp(s, c), 0.59076923076923082, 1e-12);

  BoundInputs in;
  in.tau_p = 40;
  r.near("lb_sinr_rp vs rational oracle", lb_sinr_rp(in).sinr, 2.2188029665626869, 1e-12);
  in.delta = 0.36;
  r.near("lb_sinr_sp vs rational oracle", lb_sinr_sp(in).sinr, 1.348551452796755, 1e-12);
  in.delta = 0.6;
  r.near("lb_sinr_sp_ub vs rational oracle", lb_sinr_sp_ub(in).sinr, 2.3212949244246537, 1e-12);

  Rng rng(7, {kCheckStream, 1});
  long bad = 0;
  for (int n = 0; n < 1000; ++n) {
    LsfSnapshot x;
    int cells = 2 + rng.below(5), K = 1 + rng.below(4);
    for (int l = 0; l < cells; ++l)
      for (int i = 0; i < K; ++i) {
        double bs = std::exp(3 * rng.normal());
        x.cell.push_back(l);
        x.beta_serving.push_back(bs);
        x.beta_cross.push_back(l == 0 ? bs : bs * rng.uniform());
      }
    x.typical = rng.below(K);
    SystemConfig cc;
    cc.M = 1 + rng.below(500);
    cc.tau_c = K + 1 + rng.below(200);
    cc.sigma2 = std::exp(2 * rng.normal());
    double d = 0.01 + 0.98 * rng.uniform();
    x = with_powers(x, 1 - d, d);
    if (sinr_sp(x, cc).sinr > sinr_sp_ub(x, cc).sinr * (1 + 1e-12)) ++bad;
  }
  r.at_most("sinr_sp <= sinr_sp_ub on 1000 random snapshots (violations)", bad, 0, 0);

  SystemConfig t1 = default_config();
  t1.tau_p = 40;
  t1.M = 1000000;
  double worst = 0;
  for (std::uint64_t n = 0; n < 10; ++n) {
    auto net = sample_network(t1, stream_key(99, {kCheckStream, n}));
    auto rp = make_snapshot(net, t1, Scheme::RP);
    auto sp = make_snapshot(net, t1, Scheme::SP_NoSub);
    auto rel = [](double a, double b) { return std::abs(a - b) / b; };
    worst = std::max({worst, rel(sinr_rp(rp, t1).sinr, rate_limit(Scheme::RP, rp, t1).sinr_limit),
                      rel(sinr_sp(sp, t1).sinr, rate_limit(Scheme::SP_NoSub, sp, t1).sinr_limit),
                      rel(sinr_sp_ub(sp, t1).sinr, rate_limit(Scheme::SP_PerfSub, sp, t1).sinr_limit)});
  }
  r.at_most("closed form at M=1e6 vs limit, max relative gap", worst, 0.0, 1e-3);
}

void mc_checks(Recorder& r, const ValidationOptions& opt) {
  auto cfg = hand_config();
  McOptions mo;
  mo.n_fading = 20000;
  mo.seed = stream_key(opt.seed, {kCheckStream, 2});
  mo.threads = opt.threads;
  auto rp = hand_snapshot(cfg.rho, cfg.rho);
  auto sp = hand_snapshot(cfg.rho_d_sp(), cfg.rho_p_sp());
  auto m = empirical_sinr(Scheme::RP, rp, cfg, mo);
  r.near("MC RP vs closed form (hand instance)", m.sinr.sinr, sinr_rp(rp, cfg).sinr, m.half_width,
         "tolerance = 95% batch-means half width");
  auto fam = empirical_sinr_sp_family(sp, {1.0}, {1.0}, cfg, mo)[0];
  r.near("MC SP no-sub vs closed form (hand instance)", fam.nosub.sinr.sinr, sinr_sp(sp, cfg).sinr,
         fam.nosub.half_width);
  r.near("MC SP perf-sub vs closed-form bound (hand instance)", fam.perfsub.sinr.sinr,
         sinr_sp_ub(sp, cfg).sinr, fam.perfsub.half_width);
  r.near("MC Var(n_eff) vs closed form (hand instance)", fam.nosub.neff_var,
         sp_effective_noise_variance(sp, cfg), fam.nosub.neff_var_half);

  auto mom = moment_identity_check(8, 0.7, 1.3, 100000, stream_key(opt.seed, {kCheckStream, 3}));
  r.near("E|(x+y)^H x|^2 identity", mom.mean, mom.expected, 3 * mom.se, "tolerance = 3 s.e.");

  Rng rng(opt.seed, {kCheckStream, 4});
  double worst = 0;
  for (int it = 0; it < 20; ++it) {
    auto pb = draw_pilot_book(sp, cfg.tau_c, rng);
    auto fd = draw_fading(sp, cfg, Scheme::SP_NoSub, rng);
    auto a = estimate_sp(sp, pb, fd, cfg);
    auto b = estimate_from_block(received_block(sp, pb, fd, cfg, Scheme::SP_NoSub), sp, pb, cfg,
                                 Scheme::SP_NoSub);
    for (std::size_t k = 0; k < a.h_hat.size(); ++k) worst = std::max(worst, std::abs(a.h_hat[k] - b.h_hat[k]));
  }
  r.at_most("despread estimate == full-block LMMSE estimate (max abs diff)", worst, 0.0, 1e-10);

  long shared = 0;
  const int n = 20000;
  for (int it = 0; it < n; ++it) {
    auto pb = draw_pilot_book(sp, 4, rng);
    shared += pb.chi[2] + pb.chi[3];
  }
  double p = shared / (2.0 * n);
  r.near("pilot-sharing probability vs 1/tau", p, 0.25, 3 * std::sqrt(0.25 * 0.75 / (2.0 * n)));
}

void geometry_checks(Recorder& r, const ValidationOptions& opt) {
  SystemConfig cfg = default_config();
  auto xs = sample_serving_distances(cfg.density, 5000, stream_key(opt.seed, {kCheckStream, 5}));
  double ks = ks_statistic(xs, [&](double d) { return rayleigh_cdf(d, cfg.density); });
  r.at_most("serving distance KS statistic vs Rayleigh law", ks, ks_critical(xs.size(), 0.01), 0.0,
            "expected = 1% critical value");
  auto rep = lsf_moment_check(cfg, 2000, stream_key(opt.seed, {kCheckStream, 6}));
  r.near("E{d^alpha} vs Gamma formula", rep.d_alpha.mean, expected_d_alpha(cfg.alpha, cfg.density),
         3 * rep.d_alpha.se, "tolerance = 3 s.e.");
  r.near("E{S_1} vs 2/(alpha-2)", rep.sum_k1.mean, expected_sum_moment(cfg.alpha, 1), 3 * rep.sum_k1.se,
         "tolerance = 3 s.e.");
  r.near("E{S_2} vs 2/(2 alpha-2)", rep.sum_k2.mean, expected_sum_moment(cfg.alpha, 2),
         3 * rep.sum_k2.se, "tolerance = 3 s.e.");
  MomentCheckOptions mo;
  mo.model = MomentModel::kPerCellWindow;
  auto pc = lsf_moment_check(cfg, 200, stream_key(opt.seed, {kCheckStream, 7}), mo);
  r.at_most("cross moment vs 1/(alpha-1) bound", pc.cross.mean, cross_moment_bound(cfg.alpha),
            3 * pc.cross.se, "tolerance = 3 s.e.");

  auto pm = default_power_model();
  double want = cfg.bandwidth / pm.eta * cfg.K * cfg.rho * cfg.omega *
                gamma_by_quadrature(cfg.alpha / 2 + 1) / std::pow(std::numbers::pi * cfg.density, cfg.alpha / 2);
  r.near("avg_tx_power vs quadrature Gamma", avg_tx_power(cfg, pm) / want, 1.0, 1e-9);
}

void bound_checks(Recorder& r, const ValidationOptions& opt) {
  BoundInputs in;
  auto f = [&](int t) {
    auto x = in;
    x.tau_p = t;
    return lb_rate_rp(x);
  };
  auto ex = optimize_tau_p(f, 10, 200);
  r.near("RP bound: exhaustive tau_p == ternary tau_p", ex.tau_p, ternary_search_tau_p(f, 10, 200).tau_p, 0);
  r.near("RP bound optimal tau_p at M=100", ex.tau_p, 39, 3);
  r.near("optimize_delta on D(1-D)", optimize_delta([](double d) { return d * (1 - d); }).delta, 0.5, 1e-3);

  // Jensen direction on a reduced network set.
  ExperimentSpec spec = scenario_preset("fig3b");
  spec.n_networks = 50;
  spec.seed = opt.seed;
  spec.threads = opt.threads;
  for (Curve c : {Curve::RpK, Curve::SpNoSub, Curve::SpPerfSub}) {
    auto p = evaluate_point(spec, c, 100);
    r.at_most(fmt::format("Jensen: bound <= LSF-averaged closed form ({})", to_string(c)), *p.bound_value,
              p.mean_rate, p.ci_high - p.mean_rate, "tolerance = 95% CI half width over networks");
  }
}

}  // namespace

ValidationReport validate_suite(const ValidationOptions& opt) {
  ValidationReport rep;
  Recorder r(rep, opt);
  lambert_checks(r);
  closed_form_checks(r);
  mc_checks(r, opt);
  geometry_checks(r, opt);
  bound_checks(r, opt);
  return rep;
}

std::string validation_report_json(const ValidationReport& r) {
  nlohmann::ordered_json j;
  j["tool"] = "spmimo";
  j["version"] = kToolVersion;
  j["all_pass"] = r.all_pass();
  auto arr = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) {
    nlohmann::ordered_json e;
    e["name"] = c.name;
    e["pass"] = c.pass;
    e["observed"] = c.observed;
    e["expected"] = c.expected;
    e["tolerance"] = c.tolerance;
    if (!c.note.empty()) e["note"] = c.note;
    arr.push_back(e);
  }
  j["checks"] = arr;
  return j.dump(2);
}

}  // namespace spmimo
