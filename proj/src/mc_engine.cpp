#include "spmimo/mc_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

#include "spmimo/stats.hpp"

namespace spmimo {

cdouble pilot_symbol(int r, int j, int tau) {
  // Reduce the phase index exactly before converting to an angle.
  long long idx = (static_cast<long long>(r) * j) % tau;
  double th = 2.0 * std::numbers::pi * static_cast<double>(idx) / tau;
  return {std::cos(th), std::sin(th)};
}

namespace {

// Table of phi_r[j] for all r, j of one pilot length.
class PilotTable {
 public:
  explicit PilotTable(int tau) : tau_(tau), tab_(static_cast<std::size_t>(tau)) {
    for (int k = 0; k < tau; ++k) tab_[k] = pilot_symbol(1, k, tau);
  }
  cdouble operator()(int r, int j) const {
    return tab_[static_cast<std::size_t>((static_cast<long long>(r) * j) % tau_)];
  }

 private:
  int tau_;
  std::vector<cdouble> tab_;
};

cdouble dot_conj(const cdouble* a, const cdouble* b, int n) {
  // sum conj(a[m]) * b[m]
  double re = 0.0, im = 0.0;
  for (int m = 0; m < n; ++m) {
    re += a[m].real() * b[m].real() + a[m].imag() * b[m].imag();
    im += a[m].real() * b[m].imag() - a[m].imag() * b[m].real();
  }
  return {re, im};
}

void axpy(cdouble alpha, const cdouble* x, cdouble* y, int n) {
  for (int m = 0; m < n; ++m) y[m] += alpha * x[m];
}

}  // namespace

PilotBook draw_pilot_book(const LsfSnapshot& s, int tau, Rng& rng) {
  const int K = s.users_per_cell;
  if (K > tau) throw std::invalid_argument("pilot book: K exceeds pilot length");
  PilotBook pb;
  pb.tau = tau;
  pb.typical = s.typical;
  pb.assignment.resize(s.size());
  std::vector<int> perm(static_cast<std::size_t>(tau));
  std::size_t a = 0;
  while (a < s.size()) {
    for (int r = 0; r < tau; ++r) perm[r] = r;
    // Partial Fisher-Yates: the first K entries are K distinct uniform picks.
    for (int i = 0; i < K; ++i) {
      int j = i + rng.below(tau - i);
      std::swap(perm[i], perm[j]);
      pb.assignment[a + i] = perm[i];
    }
    a += K;
  }
  pb.chi.resize(s.size());
  int rt = pb.assignment[s.typical];
  for (std::size_t b = 0; b < s.size(); ++b) pb.chi[b] = pb.assignment[b] == rt ? 1 : 0;
  return pb;
}

FadingDraw draw_fading(const LsfSnapshot& s, const SystemConfig& cfg, Scheme scheme, Rng& rng) {
  FadingDraw fd;
  fd.M = cfg.M;
  fd.U = static_cast<int>(s.size());
  fd.T = scheme == Scheme::RP ? cfg.tau_p : cfg.tau_c;
  fd.h.resize(static_cast<std::size_t>(fd.U) * fd.M);
  for (int a = 0; a < fd.U; ++a) {
    double b = s.beta_cross[a];
    for (int m = 0; m < fd.M; ++m) fd.h[static_cast<std::size_t>(a) * fd.M + m] = rng.cnormal(b);
  }
  if (scheme != Scheme::RP) {
    fd.s.resize(static_cast<std::size_t>(fd.U) * fd.T);
    for (auto& x : fd.s) x = rng.cnormal(1.0);
  }
  fd.noise.resize(static_cast<std::size_t>(fd.T) * fd.M);
  for (auto& x : fd.noise) x = rng.cnormal(cfg.sigma2);
  if (scheme == Scheme::RP) {
    fd.data_noise.resize(fd.M);
    for (auto& x : fd.data_noise) x = rng.cnormal(cfg.sigma2);
  }
  return fd;
}

EstimationOutput estimate_rp(const LsfSnapshot& s, const PilotBook& pb, const FadingDraw& fd,
                             const SystemConfig& cfg) {
  const int M = fd.M;
  const int tau = pb.tau;
  const int t = s.typical;
  const int rt = pb.typical_pilot();
  EstimationOutput out;
  out.z.assign(M, cdouble{});
  double den = cfg.sigma2;
  for (int a = 0; a < fd.U; ++a) {
    if (!pb.chi[a]) continue;
    axpy(std::sqrt(s.q[a] * tau), fd.channel(a), out.z.data(), M);
    den += s.q[a] * tau * s.beta_cross[a];
  }
  double inv = 1.0 / std::sqrt(static_cast<double>(tau));
  for (int j = 0; j < tau; ++j)
    axpy(std::conj(pilot_symbol(rt, j, tau)) * inv, fd.sample_noise(j), out.z.data(), M);
  out.gamma_bar = s.q[t] * tau * s.beta_cross[t] / den;
  double scale = out.gamma_bar / std::sqrt(s.q[t] * tau);
  out.h_hat.resize(M);
  for (int m = 0; m < M; ++m) out.h_hat[m] = scale * out.z[m];
  return out;
}

EstimationOutput estimate_sp(const LsfSnapshot& s, const PilotBook& pb, const FadingDraw& fd,
                             const SystemConfig& cfg) {
  const int M = fd.M;
  const int tau = pb.tau;
  const int t = s.typical;
  const int rt = pb.typical_pilot();
  PilotTable phi(tau);
  EstimationOutput out;
  out.z.assign(M, cdouble{});
  double den = cfg.sigma2;
  for (int a = 0; a < fd.U; ++a) {
    cdouble leak{};
    const cdouble* sa = fd.s.data() + static_cast<std::size_t>(a) * fd.T;
    for (int j = 0; j < tau; ++j) leak += sa[j] * std::conj(phi(rt, j));
    cdouble c = std::sqrt(s.p[a] / tau) * leak;
    if (pb.chi[a]) {
      c += std::sqrt(s.q[a] * tau);
      den += s.q[a] * tau * s.beta_cross[a];
    }
    den += s.p[a] * s.beta_cross[a];
    axpy(c, fd.channel(a), out.z.data(), M);
  }
  double inv = 1.0 / std::sqrt(static_cast<double>(tau));
  for (int j = 0; j < tau; ++j)
    axpy(std::conj(phi(rt, j)) * inv, fd.sample_noise(j), out.z.data(), M);
  out.gamma_bar = s.q[t] * tau * s.beta_cross[t] / den;
  double scale = out.gamma_bar / std::sqrt(s.q[t] * tau);
  out.h_hat.resize(M);
  for (int m = 0; m < M; ++m) out.h_hat[m] = scale * out.z[m];
  return out;
}

arma::cx_mat received_block(const LsfSnapshot& s, const PilotBook& pb, const FadingDraw& fd,
                            const SystemConfig& cfg, Scheme scheme) {
  (void)cfg;
  const int M = fd.M;
  const int tau = pb.tau;
  arma::cx_mat Z(M, tau, arma::fill::zeros);
  for (int j = 0; j < tau; ++j) {
    for (int a = 0; a < fd.U; ++a) {
      cdouble x = std::sqrt(s.q[a]) * pilot_symbol(pb.assignment[a], j, tau);
      if (scheme != Scheme::RP)
        x += std::sqrt(s.p[a]) * fd.s[static_cast<std::size_t>(a) * fd.T + j];
      const cdouble* h = fd.channel(a);
      for (int m = 0; m < M; ++m) Z(m, j) += x * h[m];
    }
    const cdouble* n = fd.sample_noise(j);
    for (int m = 0; m < M; ++m) Z(m, j) += n[m];
  }
  return Z;
}

EstimationOutput estimate_from_block(const arma::cx_mat& Z, const LsfSnapshot& s,
                                     const PilotBook& pb, const SystemConfig& cfg, Scheme scheme) {
  const int tau = pb.tau;
  const int t = s.typical;
  arma::cx_mat C(tau, tau, arma::fill::zeros);
  arma::cx_vec phi_t(tau);
  for (int j = 0; j < tau; ++j) phi_t(j) = pilot_symbol(pb.typical_pilot(), j, tau);
  double diag = cfg.sigma2;
  for (std::size_t a = 0; a < s.size(); ++a) {
    arma::cx_vec phi(tau);
    for (int j = 0; j < tau; ++j) phi(j) = pilot_symbol(pb.assignment[a], j, tau);
    C += s.q[a] * s.beta_cross[a] * (phi * phi.t());
    if (scheme != Scheme::RP) diag += s.p[a] * s.beta_cross[a];
  }
  C.diag() += diag;
  arma::cx_vec x = arma::solve(C, phi_t);
  double g = std::sqrt(s.q[t]) * s.beta_cross[t];
  arma::cx_vec hh = g * (Z * arma::conj(x));
  EstimationOutput out;
  out.h_hat.assign(hh.begin(), hh.end());
  // Error variance of the estimate gives the realized quality factor.
  double mse = s.beta_cross[t] - g * g * std::real(arma::cdot(phi_t, x));
  out.gamma_bar = 1.0 - mse / s.beta_cross[t];
  // Despread statistic consistent with h_hat = gamma_bar / sqrt(q tau) z.
  double scale = out.gamma_bar / std::sqrt(s.q[t] * tau);
  out.z.resize(out.h_hat.size());
  for (std::size_t m = 0; m < out.z.size(); ++m) out.z[m] = out.h_hat[m] / scale;
  return out;
}

namespace {

// Per-batch sums for the RP definition.
struct RpAcc {
  double a_re = 0, a_im = 0;
  double interf = 0;
  double noise = 0;
  long n = 0;
};

double rp_sinr(const RpAcc& acc, double p_t, SinrBreakdown* out) {
  double A2 = (acc.a_re * acc.a_re + acc.a_im * acc.a_im) / (double(acc.n) * acc.n);
  double T = acc.interf / acc.n;
  double N = acc.noise / acc.n;
  SinrBreakdown b;
  b.coherent_gain = p_t * A2;
  b.non_coherent = T - p_t * A2;
  b.noise_term = N;
  b.finalize();
  if (out) *out = b;
  return b.sinr;
}

struct VariantAcc {
  double n_re = 0, n_im = 0, n2 = 0;
};

struct SpAcc {
  double g = 0, g2 = 0;
  long draws = 0;
  long samples = 0;
  VariantAcc v[3];
};

double sp_sinr(const SpAcc& acc, int variant, SinrBreakdown* out, double* neff_var) {
  double eg = acc.g / acc.draws;
  double varg = acc.g2 / acc.draws - eg * eg;
  const VariantAcc& v = acc.v[variant];
  double mre = v.n_re / acc.samples, mim = v.n_im / acc.samples;
  double varn = v.n2 / acc.samples - (mre * mre + mim * mim);
  SinrBreakdown b;
  b.coherent_gain = eg * eg;
  b.non_coherent = varg + varn;
  b.finalize();
  if (out) *out = b;
  if (neff_var) *neff_var = varn;
  return b.sinr;
}

McResult finish_result(Scheme scheme, const SinrBreakdown& pooled, double pooled_var,
                       const std::vector<double>& batch_sinr, const std::vector<double>& batch_var,
                       const McOptions& opt) {
  McResult r;
  r.scheme = scheme;
  r.sinr = pooled;
  r.n_fading = opt.n_fading;
  r.batches = static_cast<int>(batch_sinr.size());
  r.seed = opt.seed;
  auto ci = mean_ci(batch_sinr, opt.level);
  r.half_width = ci.half_width;
  r.ci_low = pooled.sinr - ci.half_width;
  r.ci_high = pooled.sinr + ci.half_width;
  r.neff_var = pooled_var;
  if (!batch_var.empty()) r.neff_var_half = mean_ci(batch_var, opt.level).half_width;
  return r;
}

void check_options(const McOptions& opt) {
  if (opt.n_fading < 100)
    throw std::invalid_argument("n_fading < 100: variance too high to be meaningful");
  if (opt.batches < 2 || opt.batches > opt.n_fading)
    throw std::invalid_argument("batches must lie in [2, n_fading]");
}

std::pair<long, long> batch_range(long n, int batches, int b) {
  return {n * b / batches, n * (b + 1) / batches};
}

McResult empirical_sinr_rp(const LsfSnapshot& s, const SystemConfig& cfg, const McOptions& opt) {
  const int M = cfg.M;
  const int t = s.typical;
  const double norm = std::sqrt(s.q[t] * cfg.tau_p * M * s.beta_cross[t]);
  std::vector<RpAcc> accs(opt.batches);
  parallel_for(accs.size(), opt.threads, [&](std::size_t b) {
    Rng rng(opt.seed, {kFadingStream, b});
    auto [lo, hi] = batch_range(opt.n_fading, opt.batches, static_cast<int>(b));
    RpAcc& acc = accs[b];
    std::vector<cdouble> v(M);
    for (long it = lo; it < hi; ++it) {
      PilotBook pb = draw_pilot_book(s, cfg.tau_p, rng);
      FadingDraw fd = draw_fading(s, cfg, Scheme::RP, rng);
      EstimationOutput est = estimate_rp(s, pb, fd, cfg);
      for (int m = 0; m < M; ++m) v[m] = est.z[m] / norm;
      CompensatedSum interf;
      cdouble ut{};
      for (int a = 0; a < fd.U; ++a) {
        cdouble u = dot_conj(v.data(), fd.channel(a), M);
        interf.add(s.p[a] * std::norm(u));
        if (a == t) ut = u;
      }
      acc.a_re += ut.real();
      acc.a_im += ut.imag();
      acc.interf += interf.value();
      acc.noise += std::norm(dot_conj(v.data(), fd.data_noise.data(), M));
      ++acc.n;
    }
  });
  RpAcc all;
  std::vector<double> per_batch;
  for (const auto& a : accs) {
    all.a_re += a.a_re;
    all.a_im += a.a_im;
    all.interf += a.interf;
    all.noise += a.noise;
    all.n += a.n;
    per_batch.push_back(rp_sinr(a, s.p[t], nullptr));
  }
  SinrBreakdown pooled;
  rp_sinr(all, s.p[t], &pooled);
  return finish_result(Scheme::RP, pooled, 0.0, per_batch, {}, opt);
}

}  // namespace

std::vector<SpFamilyResult> empirical_sinr_sp_family(const LsfSnapshot& base,
                                                     const std::vector<double>& data_scale,
                                                     const std::vector<double>& pilot_scale,
                                                     const SystemConfig& cfg,
                                                     const McOptions& opt) {
  check_options(opt);
  if (data_scale.size() != pilot_scale.size() || data_scale.empty())
    throw std::invalid_argument("power split lists must be non-empty and of equal length");
  for (std::size_t k = 0; k < data_scale.size(); ++k) {
    if (!(pilot_scale[k] * base.q[base.typical] > 0.0))
      throw DegenerateError("no pilot power: estimator undefined");
    if (!(data_scale[k] * base.p[base.typical] > 0.0))
      throw DegenerateError("no data power: SP SINR numerator is zero (rate 0)");
  }
  const int M = cfg.M;
  const int tau = cfg.tau_c;
  const int U = static_cast<int>(base.size());
  const int t = base.typical;
  const int nk = static_cast<int>(data_scale.size());
  const double sqtau = std::sqrt(static_cast<double>(tau));
  PilotTable phi(tau);

  std::vector<unsigned char> mask(U);
  for (int a = 0; a < U; ++a) mask[a] = base.beta_cross[a] >= opt.est_sub_beta_floor ? 1 : 0;

  std::vector<std::vector<SpAcc>> accs(opt.batches, std::vector<SpAcc>(nk));
  parallel_for(accs.size(), opt.threads, [&](std::size_t b) {
    Rng rng(opt.seed, {kFadingStream, b});
    auto [lo, hi] = batch_range(opt.n_fading, opt.batches, static_cast<int>(b));
    std::vector<cdouble> A(M), B(M), Nd(M);
    std::vector<cdouble> UA(U), UB(U), UN(U), WA(tau), WB(tau), WN(tau);
    std::vector<cdouble> u(U), w(tau), nperf(tau);
    std::vector<int> used;                 // distinct pilots in use
    std::vector<int> slot(tau, -1);        // pilot -> position in `used`
    std::vector<cdouble> C, F, St;
    std::vector<double> qbeta_r, mqbeta_r;

    for (long it = lo; it < hi; ++it) {
      PilotBook pb = draw_pilot_book(base, tau, rng);
      FadingDraw fd = draw_fading(base, cfg, Scheme::SP_NoSub, rng);
      const int rt = pb.typical_pilot();

      // Basis vectors of the despread statistic: z = sqrt(b) A + sqrt(a) B + Nd.
      std::fill(A.begin(), A.end(), cdouble{});
      std::fill(B.begin(), B.end(), cdouble{});
      std::fill(Nd.begin(), Nd.end(), cdouble{});
      for (int a = 0; a < U; ++a) {
        const cdouble* sa = fd.s.data() + static_cast<std::size_t>(a) * tau;
        cdouble leak{};
        for (int j = 0; j < tau; ++j) leak += sa[j] * std::conj(phi(rt, j));
        cdouble c = std::sqrt(base.p[a] / tau) * leak;
        if (pb.chi[a]) axpy(std::sqrt(base.q[a] * tau), fd.channel(a), A.data(), M);
        axpy(c, fd.channel(a), B.data(), M);
      }
      for (int j = 0; j < tau; ++j)
        axpy(std::conj(phi(rt, j)) / sqtau, fd.sample_noise(j), Nd.data(), M);
      for (int a = 0; a < U; ++a) {
        UA[a] = dot_conj(A.data(), fd.channel(a), M);
        UB[a] = dot_conj(B.data(), fd.channel(a), M);
        UN[a] = dot_conj(Nd.data(), fd.channel(a), M);
      }
      for (int j = 0; j < tau; ++j) {
        WA[j] = dot_conj(A.data(), fd.sample_noise(j), M);
        WB[j] = dot_conj(B.data(), fd.sample_noise(j), M);
        WN[j] = dot_conj(Nd.data(), fd.sample_noise(j), M);
      }
      double hn = std::real(dot_conj(fd.channel(t), fd.channel(t), M));

      used.clear();
      for (int a = 0; a < U; ++a) {
        int r = pb.assignment[a];
        if (slot[r] < 0) {
          slot[r] = static_cast<int>(used.size());
          used.push_back(r);
        }
      }
      const int D = static_cast<int>(used.size());
      C.assign(D, cdouble{});
      F.assign(D, cdouble{});
      St.assign(D, cdouble{});
      qbeta_r.assign(D, 0.0);
      mqbeta_r.assign(D, 0.0);
      const cdouble* st = fd.s.data() + static_cast<std::size_t>(t) * tau;
      for (int d = 0; d < D; ++d) {
        cdouble acc{};
        for (int j = 0; j < tau; ++j) acc += st[j] * std::conj(phi(used[d], j));
        St[d] = acc;
      }
      double pbeta_base = 0.0;
      for (int a = 0; a < U; ++a) {
        qbeta_r[slot[pb.assignment[a]]] += base.q[a] * base.beta_cross[a];
        if (mask[a]) mqbeta_r[slot[pb.assignment[a]]] += base.q[a] * base.beta_cross[a];
        pbeta_base += base.p[a] * base.beta_cross[a];
      }

      for (int k = 0; k < nk; ++k) {
        const double as = data_scale[k], bs = pilot_scale[k];
        const double qt = bs * base.q[t], pt = as * base.p[t];
        const double norm = std::sqrt(qt * tau * M * base.beta_cross[t]);
        const double cA = std::sqrt(bs) / norm, cB = std::sqrt(as) / norm, cN = 1.0 / norm;
        for (int a = 0; a < U; ++a) u[a] = cA * UA[a] + cB * UB[a] + cN * UN[a];
        for (int j = 0; j < tau; ++j) w[j] = cA * WA[j] + cB * WB[j] + cN * WN[j];
        const double g = std::sqrt(pt / (M * base.beta_cross[t])) * hn;

        // Effective noise with the received pilots removed.
        for (int j = 0; j < tau; ++j) nperf[j] = w[j] - g * st[j];
        for (int a = 0; a < U; ++a) {
          cdouble c = std::sqrt(as * base.p[a]) * u[a];
          const cdouble* sa = fd.s.data() + static_cast<std::size_t>(a) * tau;
          for (int j = 0; j < tau; ++j) nperf[j] += c * sa[j];
        }
        std::fill(C.begin(), C.end(), cdouble{});
        for (int a = 0; a < U; ++a) C[slot[pb.assignment[a]]] += std::sqrt(bs * base.q[a]) * u[a];
        double e_perf = 0.0;
        for (int j = 0; j < tau; ++j) e_perf += std::norm(nperf[j]);
        for (int d = 0; d < D; ++d) {
          cdouble acc{};
          for (int j = 0; j < tau; ++j) acc += nperf[j] * std::conj(phi(used[d], j));
          F[d] = acc;
        }

        SpAcc& S = accs[b][k];
        S.g += g;
        S.g2 += g * g;
        ++S.draws;
        S.samples += tau;

        const int dt = slot[rt];
        // Perfect subtraction.
        S.v[2].n2 += e_perf;
        S.v[2].n_re += F[dt].real();
        S.v[2].n_im += F[dt].imag();

        // No subtraction: the received pilots add tau * C_r at DFT bin r.
        double e_nosub = e_perf;
        for (int d = 0; d < D; ++d)
          e_nosub += (std::norm(F[d] + double(tau) * C[d]) - std::norm(F[d])) / tau;
        cdouble m_nosub = F[dt] + double(tau) * C[dt];
        S.v[0].n2 += e_nosub;
        S.v[0].n_re += m_nosub.real();
        S.v[0].n_im += m_nosub.imag();

        // Estimated subtraction: remove sum_a sqrt(q_a) phi_a v^H hhat_a, with
        // v^H z_r = sqrt(tau) C_r + DFT_r(data + noise) / sqrt(tau).
        const double pbeta = as * pbeta_base + cfg.sigma2;
        double e_est = e_perf;
        cdouble m_est{};
        for (int d = 0; d < D; ++d) {
          double den = tau * bs * qbeta_r[d] + pbeta;
          cdouble vz = sqtau * C[d] + (F[d] + g * St[d]) / sqtau;
          // Sum of gamma_bar over the subtracted UEs on pilot d.
          double gam = tau * bs * mqbeta_r[d] / den;
          cdouble E = gam / sqtau * vz;
          cdouble bin = F[d] + double(tau) * (C[d] - E);
          e_est += (std::norm(bin) - std::norm(F[d])) / tau;
          if (d == dt) m_est = bin;
        }
        S.v[1].n2 += e_est;
        S.v[1].n_re += m_est.real();
        S.v[1].n_im += m_est.imag();
      }
      for (int r : used) slot[r] = -1;
    }
  });

  std::vector<SpFamilyResult> out(nk);
  const Scheme schemes[3] = {Scheme::SP_NoSub, Scheme::SP_EstSub, Scheme::SP_PerfSub};
  for (int k = 0; k < nk; ++k) {
    SpAcc all;
    for (const auto& batch : accs) {
      const SpAcc& a = batch[k];
      all.g += a.g;
      all.g2 += a.g2;
      all.draws += a.draws;
      all.samples += a.samples;
      for (int v = 0; v < 3; ++v) {
        all.v[v].n_re += a.v[v].n_re;
        all.v[v].n_im += a.v[v].n_im;
        all.v[v].n2 += a.v[v].n2;
      }
    }
    McResult* dst[3] = {&out[k].nosub, &out[k].estsub, &out[k].perfsub};
    for (int v = 0; v < 3; ++v) {
      std::vector<double> bs, bv;
      for (const auto& batch : accs) {
        double var = 0.0;
        bs.push_back(sp_sinr(batch[k], v, nullptr, &var));
        bv.push_back(var);
      }
      SinrBreakdown pooled;
      double pvar = 0.0;
      sp_sinr(all, v, &pooled, &pvar);
      *dst[v] = finish_result(schemes[v], pooled, pvar, bs, bv, opt);
    }
  }
  return out;
}

McResult empirical_sinr(Scheme scheme, const LsfSnapshot& s, const SystemConfig& cfg,
                        const McOptions& opt) {
  check_options(opt);
  if (scheme == Scheme::RP) return empirical_sinr_rp(s, cfg, opt);
  auto fam = empirical_sinr_sp_family(s, {1.0}, {1.0}, cfg, opt);
  switch (scheme) {
    case Scheme::SP_NoSub:
      return fam[0].nosub;
    case Scheme::SP_EstSub:
      return fam[0].estsub;
    default:
      return fam[0].perfsub;
  }
}

MomentSample moment_identity_check(int M, double vx, double vy, long n, std::uint64_t seed) {
  Rng rng(seed, {kCheckStream, 0x4d4fULL});
  std::vector<cdouble> x(M), y(M);
  double s = 0.0, s2 = 0.0;
  for (long it = 0; it < n; ++it) {
    for (int m = 0; m < M; ++m) {
      x[m] = rng.cnormal(vx);
      y[m] = x[m] + rng.cnormal(vy);
    }
    double v = std::norm(dot_conj(y.data(), x.data(), M));
    s += v;
    s2 += v * v;
  }
  MomentSample r;
  r.mean = s / n;
  r.se = std::sqrt(std::max(0.0, (s2 / n - r.mean * r.mean)) / (n - 1));
  r.expected = M * (M + 1.0) * vx * vx + M * vx * vy;
  return r;
}

std::string mc_summary_json(const McResult& r, const std::string& config_hash) {
  nlohmann::ordered_json j;
  j["scheme"] = to_string(r.scheme);
  j["config_hash"] = config_hash;
  j["sinr"] = r.sinr.sinr;
  j["breakdown"] = {{"coherent_gain", r.sinr.coherent_gain},
                    {"pilot_contamination", r.sinr.pilot_contamination},
                    {"extra_coherent", r.sinr.extra_coherent},
                    {"non_coherent", r.sinr.non_coherent},
                    {"noise_term", r.sinr.noise_term}};
  j["ci_half_width"] = r.half_width;
  j["ci"] = {r.ci_low, r.ci_high};
  if (r.scheme != Scheme::RP) j["neff_var"] = {{"value", r.neff_var}, {"half_width", r.neff_var_half}};
  j["n_fading"] = r.n_fading;
  j["batches"] = r.batches;
  j["seed"] = r.seed;
  return j.dump(2);
}

}  // namespace spmimo
