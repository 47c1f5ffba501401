#include <gtest/gtest.h>

#include <armadillo>
#include <cmath>

#include "spmimo/closed_form.hpp"
#include "spmimo/mc_engine.hpp"
#include "spmimo/stats.hpp"

using namespace spmimo;

namespace {

// Two cells, two UEs each; same gains as the rational-oracle hand instance.
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

double max_abs_diff(const std::vector<cdouble>& a, const std::vector<cdouble>& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

// Full-block simulation: explicit received block, LMMSE estimates of every
// channel from the block, explicit MRC and pilot subtraction. SINR per batch
// with the same signal/noise split as the engine. Index 0 nosub, 1 estsub, 2 perfsub.
std::array<MeanCi, 3> brute_force_sp(const LsfSnapshot& s, const SystemConfig& cfg, long draws, int batches,
                                     std::uint64_t seed) {
  const int U = static_cast<int>(s.size()), M = cfg.M, tau = cfg.tau_c, t = s.typical;
  std::array<std::vector<double>, 3> per;
  Rng rng(seed, {kCheckStream});
  for (int b = 0; b < batches; ++b) {
    cdouble mu[3] = {};
    double n2[3] = {}, sg = 0, sg2 = 0;
    long cnt = 0, nd = 0;
    for (long it = 0; it < draws / batches; ++it) {
      auto pb = draw_pilot_book(s, tau, rng);
      arma::cx_mat H(M, U), S(U, tau), X(U, tau), Phi(U, tau), N(M, tau);
      for (int a = 0; a < U; ++a)
        for (int m = 0; m < M; ++m) H(m, a) = rng.cnormal(s.beta_cross[a]);
      for (int a = 0; a < U; ++a)
        for (int j = 0; j < tau; ++j) {
          S(a, j) = rng.cnormal(1.0);
          Phi(a, j) = pilot_symbol(pb.assignment[a], j, tau);
          X(a, j) = std::sqrt(s.q[a]) * Phi(a, j) + std::sqrt(s.p[a]) * S(a, j);
        }
      for (auto& x : N) x = rng.cnormal(cfg.sigma2);
      arma::cx_mat Y = H * X + N;
      arma::cx_mat C(tau, tau, arma::fill::zeros);
      double diag = cfg.sigma2;
      for (int a = 0; a < U; ++a) {
        arma::cx_rowvec ph = Phi.row(a);
        C += s.q[a] * s.beta_cross[a] * (ph.st() * arma::conj(ph));
        diag += s.p[a] * s.beta_cross[a];
      }
      C.diag() += diag;
      arma::cx_mat Ci = arma::solve(C, Phi.st());
      arma::cx_mat Hh = Y * arma::conj(Ci);
      for (int a = 0; a < U; ++a) Hh.col(a) *= std::sqrt(s.q[a]) * s.beta_cross[a];
      arma::cx_vec v = Hh.col(t);
      arma::cx_rowvec r0 = v.t() * Y, vh = v.t() * Hh, vt = v.t() * H;
      arma::cx_rowvec est(tau, arma::fill::zeros), perf(tau, arma::fill::zeros);
      for (int a = 0; a < U; ++a) {
        est += std::sqrt(s.q[a]) * vh(a) * Phi.row(a);
        perf += std::sqrt(s.q[a]) * vt(a) * Phi.row(a);
      }
      const arma::cx_rowvec r[3] = {r0, r0 - est, r0 - perf};
      // Desired part: pilot-driven share of the estimate times the own channel.
      cdouble c = s.q[t] * s.beta_cross[t] * arma::as_scalar(Phi.row(t) * arma::conj(Ci.col(t)));
      double hn = std::real(arma::cdot(H.col(t), H.col(t)));
      double G = std::sqrt(s.p[t]) * std::real(c) * hn;
      sg += G;
      sg2 += G * G;
      ++nd;
      for (int k = 0; k < 3; ++k)
        for (int j = 0; j < tau; ++j) {
          cdouble n = r[k](j) - G * S(t, j);
          n2[k] += std::norm(n);
          mu[k] += n * std::conj(Phi(t, j));
        }
      cnt += tau;
    }
    double eg = sg / nd, vg = sg2 / nd - eg * eg;
    for (int k = 0; k < 3; ++k)
      per[k].push_back(eg * eg / (vg + n2[k] / cnt - std::norm(mu[k] / double(cnt))));
  }
  return {mean_ci(per[0], 0.95), mean_ci(per[1], 0.95), mean_ci(per[2], 0.95)};
}

}  // namespace

TEST(Pilots, DftRowsAreOrthogonalUnitModulus) {
  const int tau = 7;
  for (int r = 0; r < tau; ++r)
    for (int s = 0; s < tau; ++s) {
      cdouble ip{};
      for (int j = 0; j < tau; ++j) {
        EXPECT_NEAR(std::abs(pilot_symbol(r, j, tau)), 1.0, 1e-15);
        ip += pilot_symbol(r, j, tau) * std::conj(pilot_symbol(s, j, tau));
      }
      EXPECT_NEAR(std::abs(ip - cdouble(r == s ? tau : 0)), 0.0, 1e-12);
    }
}

TEST(Pilots, BookDrawsDistinctPilotsPerCell) {
  auto s = hand_snapshot(1, 1);
  Rng rng(1, {1});
  long shared = 0;
  const int n = 20000;
  for (int it = 0; it < n; ++it) {
    auto pb = draw_pilot_book(s, 4, rng);
    EXPECT_NE(pb.assignment[0], pb.assignment[1]);
    EXPECT_NE(pb.assignment[2], pb.assignment[3]);
    EXPECT_EQ(pb.chi[0], 1);
    shared += pb.chi[2] + pb.chi[3];
  }
  // Each other-cell UE shares the typical pilot with probability 1/tau.
  EXPECT_NEAR(shared / (2.0 * n), 0.25, 0.01);
}

TEST(Estimation, DespreadEqualsBlockLmmse) {
  auto cfg = hand_config();
  for (Scheme scheme : {Scheme::RP, Scheme::SP_NoSub}) {
    bool rp = scheme == Scheme::RP;
    auto s = rp ? hand_snapshot(1.0, 1.0) : hand_snapshot(0.6, 0.4);
    Rng rng(2, {rp ? 1ULL : 2ULL});
    for (int it = 0; it < 20; ++it) {
      auto pb = draw_pilot_book(s, rp ? cfg.tau_p : cfg.tau_c, rng);
      auto fd = draw_fading(s, cfg, scheme, rng);
      auto desp = rp ? estimate_rp(s, pb, fd, cfg) : estimate_sp(s, pb, fd, cfg);
      auto Z = received_block(s, pb, fd, cfg, scheme);
      auto full = estimate_from_block(Z, s, pb, cfg, scheme);
      EXPECT_LT(max_abs_diff(desp.h_hat, full.h_hat), 1e-12);
      EXPECT_NEAR(desp.gamma_bar, full.gamma_bar, 1e-12);
    }
  }
}

TEST(Estimation, QualityFactorCases) {
  auto cfg = hand_config();
  LsfSnapshot s;
  s.cell = {0};
  s.beta_cross = s.beta_serving = {1.0};
  s.p = s.q = {0.5};
  cfg.tau_p = 1;
  cfg.sigma2 = 0.5;
  Rng rng(3, {3});
  auto pb = draw_pilot_book(s, 1, rng);
  auto fd = draw_fading(s, cfg, Scheme::RP, rng);
  EXPECT_DOUBLE_EQ(estimate_rp(s, pb, fd, cfg).gamma_bar, 0.5);
}

TEST(Estimation, EstimateEnergyMatchesQualityFactor) {
  auto cfg = hand_config();
  cfg.M = 16;
  auto s = hand_snapshot(1.0, 1.0);
  Rng rng(4, {4});
  auto pb = draw_pilot_book(s, cfg.tau_p, rng);
  double sum = 0, gb = 0;
  const int n = 20000;
  for (int it = 0; it < n; ++it) {
    auto fd = draw_fading(s, cfg, Scheme::RP, rng);
    auto est = estimate_rp(s, pb, fd, cfg);
    for (auto& x : est.h_hat) sum += std::norm(x);
    gb = est.gamma_bar;
  }
  double got = sum / (n * double(cfg.M));
  EXPECT_NEAR(got, gb * s.beta_cross[0], 0.02 * gb);
}

TEST(Moments, FourthMomentIdentity) {
  for (int M : {1, 4, 8}) {
    auto r = moment_identity_check(M, 0.7, 1.3, 200000, 5);
    EXPECT_NEAR(r.mean, r.expected, 3 * r.se) << M;
  }
}

TEST(MonteCarlo, MatchesClosedFormOnHandInstance) {
  auto cfg = hand_config();
  McOptions opt;
  opt.n_fading = 40000;
  opt.seed = 11;
  opt.level = 0.99;
  auto rp = hand_snapshot(cfg.rho, cfg.rho);
  auto sp = hand_snapshot(cfg.rho_d_sp(), cfg.rho_p_sp());
  auto mrp = empirical_sinr(Scheme::RP, rp, cfg, opt);
  EXPECT_NEAR(mrp.sinr.sinr, sinr_rp(rp, cfg).sinr, mrp.half_width);
  auto fam = empirical_sinr_sp_family(sp, {1.0}, {1.0}, cfg, opt);
  EXPECT_NEAR(fam[0].nosub.sinr.sinr, sinr_sp(sp, cfg).sinr, fam[0].nosub.half_width);
  EXPECT_NEAR(fam[0].perfsub.sinr.sinr, sinr_sp_ub(sp, cfg).sinr, fam[0].perfsub.half_width);
  EXPECT_NEAR(fam[0].nosub.neff_var, sp_effective_noise_variance(sp, cfg),
              fam[0].nosub.neff_var_half);
  EXPECT_GE(mrp.sinr.sinr, mrp.ci_low);
  EXPECT_LE(mrp.sinr.sinr, mrp.ci_high);
}

TEST(MonteCarlo, FamilyMatchesSingleSplitRuns) {
  auto cfg = hand_config();
  McOptions opt;
  opt.n_fading = 400;
  auto base = hand_snapshot(cfg.rho_d_sp(), cfg.rho_p_sp());
  auto fam = empirical_sinr_sp_family(base, {1.0, 2.0 / 3.0}, {1.0, 1.5}, cfg, opt);
  SystemConfig c2 = cfg;
  c2.delta = 0.6;
  auto alt = hand_snapshot(c2.rho_d_sp(), c2.rho_p_sp());
  auto single = empirical_sinr(Scheme::SP_NoSub, alt, c2, opt);
  EXPECT_NEAR(fam[1].nosub.sinr.sinr, single.sinr.sinr, 1e-10 * single.sinr.sinr);
  EXPECT_NEAR(fam[0].nosub.sinr.sinr, empirical_sinr(Scheme::SP_NoSub, base, cfg, opt).sinr.sinr,
              1e-12);
}

TEST(MonteCarlo, DeterministicAcrossThreadCounts) {
  auto cfg = hand_config();
  McOptions opt;
  opt.n_fading = 1000;
  opt.seed = 99;
  auto s = hand_snapshot(cfg.rho_d_sp(), cfg.rho_p_sp());
  auto a = empirical_sinr(Scheme::SP_EstSub, s, cfg, opt);
  opt.threads = 3;
  auto b = empirical_sinr(Scheme::SP_EstSub, s, cfg, opt);
  EXPECT_EQ(a.sinr.sinr, b.sinr.sinr);
  EXPECT_EQ(a.half_width, b.half_width);
  auto r1 = empirical_sinr(Scheme::RP, hand_snapshot(1, 1), cfg, opt);
  opt.threads = 1;
  auto r2 = empirical_sinr(Scheme::RP, hand_snapshot(1, 1), cfg, opt);
  EXPECT_EQ(r1.sinr.sinr, r2.sinr.sinr);
}

TEST(MonteCarlo, OrderingOnDefaultNetwork) {
  auto cfg = default_config();
  cfg.delta = 0.5;
  auto net = sample_network(cfg, 3);
  auto s = make_snapshot(net, cfg, Scheme::SP_NoSub);
  McOptions opt;
  opt.n_fading = 2000;
  opt.seed = 5;
  auto fam = empirical_sinr_sp_family(s, {1.0}, {1.0}, cfg, opt)[0];
  EXPECT_GE(fam.perfsub.ci_high, fam.nosub.ci_low);
  EXPECT_GE(fam.perfsub.ci_high, fam.estsub.ci_low);
  EXPECT_GT(fam.perfsub.sinr.sinr, fam.nosub.sinr.sinr);
}

TEST(MonteCarlo, RejectsTooFewDraws) {
  auto cfg = hand_config();
  McOptions opt;
  opt.n_fading = 99;
  EXPECT_THROW(empirical_sinr(Scheme::RP, hand_snapshot(1, 1), cfg, opt), std::invalid_argument);
  opt.n_fading = 100;
  EXPECT_NO_THROW(empirical_sinr(Scheme::RP, hand_snapshot(1, 1), cfg, opt));
}

TEST(MonteCarlo, SummaryJsonFields) {
  auto cfg = hand_config();
  McOptions opt;
  opt.n_fading = 200;
  auto r = empirical_sinr(Scheme::SP_PerfSub, hand_snapshot(0.6, 0.4), cfg, opt);
  auto js = mc_summary_json(r, "abc");
  for (const char* key : {"\"scheme\": \"sp_perfsub\"", "\"config_hash\": \"abc\"", "\"n_fading\": 200",
                          "\"neff_var\"", "\"ci_half_width\"", "\"seed\": 1"})
    EXPECT_NE(js.find(key), std::string::npos) << key;
}

TEST(MonteCarlo, FamilyMatchesFullBlockSimulation) {
  auto cfg = hand_config();
  auto s = hand_snapshot(cfg.rho_d_sp(), cfg.rho_p_sp());
  McOptions mo;
  mo.n_fading = 40000;
  mo.seed = 21;
  auto fam = empirical_sinr_sp_family(s, {1.0}, {1.0}, cfg, mo)[0];
  auto bf = brute_force_sp(s, cfg, 40000, 40, 22);
  const McResult* eng[3] = {&fam.nosub, &fam.estsub, &fam.perfsub};
  for (int k = 0; k < 3; ++k) {
    double tol = std::hypot(eng[k]->half_width, bf[k].half_width);
    EXPECT_NEAR(eng[k]->sinr.sinr, bf[k].mean, tol) << k;
  }
  EXPECT_NEAR(bf[0].mean, sinr_sp(s, cfg).sinr, bf[0].half_width);
  EXPECT_NEAR(bf[2].mean, sinr_sp_ub(s, cfg).sinr, bf[2].half_width);
}
