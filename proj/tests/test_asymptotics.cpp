#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "spmimo/asymptotics.hpp"
#include "spmimo/rng.hpp"

using namespace spmimo;

namespace {

double bisect_w(double z) {
  double lo = -1.0, hi = std::max(1.0, std::log(z + 1.0) + 1.0);
  for (int i = 0; i < 200; ++i) {
    double m = 0.5 * (lo + hi);
    (m * std::exp(m) < z ? lo : hi) = m;
  }
  return 0.5 * (lo + hi);
}

double grid_argmax(double sir, int n) {
  double best = 0, bv = -1;
  for (int i = 1; i < n; ++i) {
    double z = double(i) / n;
    double v = rp_asymptotic_rate(z, sir);
    if (v > bv) {
      bv = v;
      best = z;
    }
  }
  return best;
}

LsfSnapshot random_snapshot(Rng& r, SystemConfig& cfg) {
  int cells = 2 + r.below(5);
  int K = 1 + r.below(3);
  LsfSnapshot s;
  cfg = SystemConfig{};
  cfg.K = K;
  cfg.tau_c = 50 + r.below(150);
  cfg.tau_p = K + r.below(cfg.tau_c - K);
  cfg.delta = 0.1 + 0.8 * r.uniform();
  cfg.rho = 1.0;
  cfg.sigma2 = std::exp(r.normal());
  cfg.bandwidth = 1.0;
  for (int l = 0; l < cells; ++l)
    for (int i = 0; i < K; ++i) {
      double bs = std::exp(r.normal());
      s.cell.push_back(l);
      s.beta_serving.push_back(bs);
      s.beta_cross.push_back(l == 0 ? bs : bs * r.uniform());
    }
  s.typical = r.below(K);
  s.users_per_cell = K;
  return with_powers(s, 1.0, 1.0);
}

}  // namespace

TEST(LambertW, KnownValues) {
  EXPECT_EQ(lambert_w0(0.0), 0.0);
  EXPECT_NEAR(lambert_w0(std::numbers::e), 1.0, 1e-15);
  EXPECT_NEAR(lambert_w0(10.0), bisect_w(10.0), 1e-13);
  EXPECT_NEAR(lambert_w0(10.0), 1.7455280027, 1e-10);
  EXPECT_NEAR(lambert_w0(-std::exp(-1.0)), -1.0, 1e-12);
  EXPECT_THROW(lambert_w0(-0.4), std::domain_error);
}

TEST(LambertW, RoundTripOnLogGrid) {
  const double lo = -std::exp(-1.0) + 1e-6;
  for (int i = 0; i <= 2000; ++i) {
    double z = i < 1000 ? lo * (1.0 - i / 1000.0) : std::pow(10.0, -8.0 + 14.0 * (i - 1000) / 1000.0);
    double w = lambert_w0(z);
    EXPECT_LE(std::abs(w * std::exp(w) - z), 1e-12 * std::max(1.0, std::abs(z))) << z;
  }
}

TEST(ZetaMax, MatchesGridArgmax) {
  Rng r(1, {1});
  for (int n = 0; n < 100; ++n) {
    double sir = std::pow(10.0, -3.0 + 6.0 * r.uniform());
    EXPECT_NEAR(zeta_max(sir), grid_argmax(sir, 200000), 1e-4) << sir;
  }
  EXPECT_NEAR(zeta_max(10.0), grid_argmax(10.0, 1000000), 1e-4);
}

TEST(ZetaMax, SmallSirSeries) {
  for (double s : {1e-8, 1e-6, 1e-4, 1e-3})
    EXPECT_NEAR(zeta_max(s), 0.5 - s / 16.0, 4 * s * s) << s;
  EXPECT_LT(std::abs(zeta_max(1e-8) - 0.5), 1e-3);
  EXPECT_THROW(zeta_max(0.0), std::domain_error);
}

TEST(ZetaMax, InsideUnitIntervalAndOptimal) {
  for (double sir : {1e-6, 0.1, 1.0, 10.0, 1e3, 1e6}) {
    double z = zeta_max(sir);
    EXPECT_GT(z, 0.0);
    EXPECT_LT(z, 1.0);
    EXPECT_NEAR(rp_asymptotic_rate_d1(z, sir), 0.0, 1e-9 * std::max(1.0, sir));
    for (int i = 0; i <= 100; ++i)
      EXPECT_GE(rp_asymptotic_rate(z, sir), rp_asymptotic_rate(i / 100.0, sir));
  }
  EXPECT_EQ(rp_asymptotic_rate(0.0, 5.0), 0.0);
  EXPECT_EQ(rp_asymptotic_rate(1.0, 5.0), 0.0);
}

TEST(RateCurve, ConcaveEverywhere) {
  Rng r(2, {2});
  for (int n = 0; n < 1000; ++n) {
    double z = r.uniform(), sir = std::pow(10.0, -4.0 + 8.0 * r.uniform());
    EXPECT_LT(rp_asymptotic_rate_d2(z, sir), 0.0);
  }
  for (double sir : {0.3, 4.0, 50.0})
    for (double z : {0.1, 0.4, 0.8}) {
      double h = 1e-4;
      double fd = (rp_asymptotic_rate(z + h, sir) - 2 * rp_asymptotic_rate(z, sir) +
                   rp_asymptotic_rate(z - h, sir)) / (h * h);
      EXPECT_NEAR(rp_asymptotic_rate_d2(z, sir), fd, 1e-5 * std::max(1.0, std::abs(fd)));
      double fd1 = (rp_asymptotic_rate(z + h, sir) - rp_asymptotic_rate(z - h, sir)) / (2 * h);
      EXPECT_NEAR(rp_asymptotic_rate_d1(z, sir), fd1, 1e-6 * std::max(1.0, std::abs(fd1)));
    }
}

TEST(RateLimit, ClosedFormConvergesAtLargeM) {
  SystemConfig cfg = default_config();
  cfg.tau_p = 40;
  cfg.M = 1000000;
  for (std::uint64_t n = 0; n < 10; ++n) {
    auto net = sample_network(cfg, 100 + n);
    auto rp = make_snapshot(net, cfg, Scheme::RP);
    auto sp = make_snapshot(net, cfg, Scheme::SP_NoSub);
    double lr = rate_limit(Scheme::RP, rp, cfg).sinr_limit;
    double ln = rate_limit(Scheme::SP_NoSub, sp, cfg).sinr_limit;
    double lp = rate_limit(Scheme::SP_PerfSub, sp, cfg).sinr_limit;
    EXPECT_NEAR(sinr_rp(rp, cfg).sinr, lr, 1e-3 * lr);
    EXPECT_NEAR(sinr_sp(sp, cfg).sinr, ln, 1e-3 * ln);
    EXPECT_NEAR(sinr_sp_ub(sp, cfg).sinr, lp, 1e-3 * lp);
    EXPECT_GE(lp, ln);
  }
}

TEST(RateLimit, RpLimitIsZetaTimesSir) {
  Rng r(4, {4});
  SystemConfig cfg;
  auto s = with_powers(random_snapshot(r, cfg), 1.0, 1.0);
  auto lim = rate_limit(Scheme::RP, s, cfg);
  double zeta = double(cfg.tau_p) / cfg.tau_c;
  EXPECT_NEAR(lim.sinr_limit, zeta * lim.sir, 1e-12 * lim.sinr_limit);
  ASSERT_TRUE(lim.zeta_max.has_value());
  EXPECT_DOUBLE_EQ(*lim.zeta_max, zeta_max(lim.sir));
  EXPECT_NEAR(lim.rate_limit_bps, rp_asymptotic_rate(zeta, lim.sir), 1e-12);
}

TEST(RateLimit, SingleCellIsUnbounded) {
  LsfSnapshot s;
  s.cell = {0, 0};
  s.beta_cross = s.beta_serving = {1.0, 0.5};
  s.p = s.q = {1.0, 2.0};
  SystemConfig cfg;
  auto rp = rate_limit(Scheme::RP, s, cfg);
  EXPECT_TRUE(rp.unbounded);
  EXPECT_TRUE(std::isinf(rp.sinr_limit));
  EXPECT_FALSE(rp.zeta_max.has_value());
  EXPECT_FALSE(rate_limit(Scheme::SP_NoSub, s, cfg).unbounded);
  EXPECT_THROW(rate_limit(Scheme::SP_EstSub, s, cfg), std::invalid_argument);
}
