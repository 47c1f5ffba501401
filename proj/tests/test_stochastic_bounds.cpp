#include <gtest/gtest.h>

#include <cmath>

#include "spmimo/optimizer.hpp"
#include "spmimo/rng.hpp"
#include "spmimo/stochastic_bounds.hpp"

using namespace spmimo;

namespace {

BoundInputs default_inputs(double M) {
  BoundInputs in;
  in.M = M;
  in.K = 10;
  in.tau_c = 200;
  in.alpha = 3.76;
  in.snr = 0.25;
  return in;
}

BoundInputs random_inputs(Rng& r) {
  BoundInputs in;
  in.M = 1 + r.below(1000);
  in.K = 1 + r.below(20);
  in.tau_c = in.K + r.below(300);
  in.tau_p = in.K + r.uniform() * (in.tau_c - in.K);
  in.delta = 0.001 + 0.998 * r.uniform();
  in.snr = std::pow(10.0, -2 + 4 * r.uniform());
  in.alpha = 2.05 + 3 * r.uniform();
  return in;
}

}  // namespace

TEST(Bounds, MatchRationalOracle) {
  // tests/oracles/closed_form_oracle.py with alpha = 94/25, snr = 1/4.
  auto in = default_inputs(100);
  in.tau_p = 40;
  EXPECT_NEAR(lb_sinr_rp(in).sinr, 2.2188029665626869, 1e-13);
  in.delta = 0.36;
  EXPECT_NEAR(lb_sinr_sp(in).sinr, 1.348551452796755, 1e-13);
  in.delta = 0.6;
  EXPECT_NEAR(lb_sinr_sp_ub(in).sinr, 2.3212949244246537, 1e-13);
  EXPECT_NEAR(lb_rate_sp_ub(in), std::log2(1 + 2.3212949244246537), 1e-13);
  in.tau_p = 40;
  EXPECT_NEAR(lb_rate_rp(in), 0.8 * std::log2(1 + 2.2188029665626869), 1e-13);
}

TEST(Bounds, RpLimitAtLargeM) {
  auto in = default_inputs(1e12);
  in.tau_p = 37;
  EXPECT_NEAR(lb_sinr_rp(in).sinr, in.tau_p * (in.alpha - 1) / in.K, 1e-8);
}

TEST(Bounds, UpperBoundDominates) {
  Rng r(1, {1});
  for (int n = 0; n < 1000; ++n) {
    auto in = random_inputs(r);
    ASSERT_LE(lb_rate_sp(in), lb_rate_sp_ub(in) * (1 + 1e-12)) << n;
  }
}

TEST(Bounds, IncreasingInMDecreasingInK) {
  Rng r(2, {2});
  for (int n = 0; n < 300; ++n) {
    auto in = random_inputs(r);
    auto m = in;
    m.M += 1;
    auto k = in;
    k.K += 1;
    k.tau_c += 1;
    k.tau_p = std::max(k.tau_p, k.K);
    for (Scheme s : {Scheme::SP_NoSub, Scheme::SP_PerfSub}) {
      EXPECT_GT(lb_rate(s, m), lb_rate(s, in));
      auto kk = in;
      kk.K += 0.5;
      if (kk.K <= kk.tau_c) EXPECT_LT(lb_rate(s, kk), lb_rate(s, in));
    }
    EXPECT_GT(lb_rate_rp(m), lb_rate_rp(in));
    auto kr = in;
    kr.K = std::max(1.0, in.K - 0.5);
    if (kr.K < in.K) EXPECT_GT(lb_rate_rp(kr), lb_rate_rp(in));
  }
}

TEST(Bounds, RpUnimodalInPilotLength) {
  for (double M : {50.0, 100.0, 300.0, 500.0}) {
    auto in = default_inputs(M);
    auto f = [&](int t) {
      auto x = in;
      x.tau_p = t;
      return lb_rate_rp(x);
    };
    int changes = 0;
    bool rising = true;
    for (int t = 10; t < 200; ++t) {
      bool up = f(t + 1) > f(t);
      if (up != rising) {
        ++changes;
        rising = up;
      }
    }
    EXPECT_EQ(changes, 1) << M;
    auto ex = optimize_tau_p(f, 10, 200);
    auto tern = ternary_search_tau_p(f, 10, 200);
    EXPECT_EQ(ex.tau_p, tern.tau_p);
    if (M == 100.0) EXPECT_NEAR(ex.tau_p, 39, 3);
  }
}

TEST(Bounds, DeltaOptimaNearTabulated) {
  auto in = default_inputs(100);
  auto nosub = optimize_delta([&](double d) {
    auto x = in;
    x.delta = d;
    return lb_rate_sp(x);
  });
  auto ub = optimize_delta([&](double d) {
    auto x = in;
    x.delta = d;
    return lb_rate_sp_ub(x);
  });
  EXPECT_NEAR(nosub.delta, 0.36, 0.1);
  EXPECT_NEAR(ub.delta, 0.6, 0.1);
}

TEST(Bounds, DomainErrors) {
  auto in = default_inputs(100);
  in.delta = 0.0;
  EXPECT_THROW(lb_rate_sp(in), DegenerateError);
  in.delta = 1.0;
  EXPECT_THROW(lb_rate_sp_ub(in), DegenerateError);
  in.delta = 0.5;
  in.alpha = 2.0;
  EXPECT_THROW(lb_rate_sp(in), std::domain_error);
  in.alpha = 3.76;
  in.tau_p = 5;
  EXPECT_THROW(lb_rate_rp(in), std::domain_error);
  EXPECT_THROW(lb_rate(Scheme::SP_EstSub, in), std::invalid_argument);
}

TEST(Bounds, InputsFromConfig) {
  auto in = bound_inputs(default_config());
  EXPECT_NEAR(in.snr, std::pow(10.0, -0.6), 1e-14);
  EXPECT_EQ(in.M, 100);
  EXPECT_EQ(in.tau_c, 200);
}
