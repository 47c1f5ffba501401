#ifndef SPMIMO_MC_ENGINE_HPP
#define SPMIMO_MC_ENGINE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <armadillo>

#include "spmimo/closed_form.hpp"
#include "spmimo/core_types.hpp"
#include "spmimo/geometry.hpp"
#include "spmimo/rng.hpp"

namespace spmimo {

// Pilot r is the DFT row phi_r[j] = exp(2 pi i r j / tau); all entries have
// unit modulus and phi_r^T conj(phi_s) = tau [r == s].
cdouble pilot_symbol(int r, int j, int tau);

struct PilotBook {
  int tau = 0;
  std::vector<int> assignment;       // per UE, cell-major like LsfSnapshot
  std::vector<unsigned char> chi;    // 1 iff the UE shares the typical UE's pilot
  int typical = 0;

  int typical_pilot() const { return assignment[typical]; }
};

// Each cell draws K distinct pilots uniformly from [0, tau).
PilotBook draw_pilot_book(const LsfSnapshot& s, int tau, Rng& rng);

// One coherence block seen by the typical BS.
//   h:          U x M, h[a*M + m], per-entry variance beta_cross[a]
//   s:          U x T data symbols (SP only), unit variance
//   noise:      T x M, column j at noise[j*M + m], per-entry variance sigma2
//   data_noise: M (RP only), noise of one data sample
struct FadingDraw {
  int M = 0;
  int U = 0;
  int T = 0;
  std::vector<cdouble> h;
  std::vector<cdouble> s;
  std::vector<cdouble> noise;
  std::vector<cdouble> data_noise;

  const cdouble* channel(int a) const { return h.data() + static_cast<std::size_t>(a) * M; }
  const cdouble* sample_noise(int j) const { return noise.data() + static_cast<std::size_t>(j) * M; }
};

// RP draws T = tau_p pilot-phase noise columns plus one data-phase noise
// vector; SP draws T = tau_c samples of symbols and noise.
FadingDraw draw_fading(const LsfSnapshot& s, const SystemConfig& cfg, Scheme scheme, Rng& rng);

struct EstimationOutput {
  std::vector<cdouble> h_hat;
  std::vector<cdouble> z;
  double gamma_bar = 0.0;
};

EstimationOutput estimate_rp(const LsfSnapshot& s, const PilotBook& pb, const FadingDraw& fd,
                             const SystemConfig& cfg);
EstimationOutput estimate_sp(const LsfSnapshot& s, const PilotBook& pb, const FadingDraw& fd,
                             const SystemConfig& cfg);

// Full received block Z (M x tau) synthesized sample by sample.
arma::cx_mat received_block(const LsfSnapshot& s, const PilotBook& pb, const FadingDraw& fd,
                            const SystemConfig& cfg, Scheme scheme);

// LMMSE estimate of the typical channel from every sample of Z, treating data
// as noise. Solves the tau x tau covariance system; no despreading involved.
EstimationOutput estimate_from_block(const arma::cx_mat& Z, const LsfSnapshot& s,
                                     const PilotBook& pb, const SystemConfig& cfg, Scheme scheme);

struct McOptions {
  long n_fading = 1000;
  std::uint64_t seed = 1;
  int threads = 1;
  int batches = 40;
  double level = 0.95;
  double est_sub_beta_floor = 0.0;  // SP_EstSub subtracts UEs with beta_cross >= floor
};

struct McResult {
  Scheme scheme = Scheme::RP;
  SinrBreakdown sinr;  // MC cannot split coherent from non-coherent terms;
                       // all interference is reported as non_coherent
  double half_width = 0.0;  // batch-means CI on sinr
  double ci_low = 0.0;
  double ci_high = 0.0;
  double neff_var = 0.0;         // SP only: Var(n_eff) of the variant
  double neff_var_half = 0.0;
  long n_fading = 0;
  int batches = 0;
  std::uint64_t seed = 0;
};

McResult empirical_sinr(Scheme scheme, const LsfSnapshot& s, const SystemConfig& cfg,
                        const McOptions& opt);

// SP variants for several power splits evaluated on common random numbers.
// Split k scales the base powers: p = data_scale[k] * base.p, q =
// pilot_scale[k] * base.q. Fading, symbols, noise and pilot books are shared.
struct SpFamilyResult {
  McResult nosub;
  McResult perfsub;
  McResult estsub;
};
std::vector<SpFamilyResult> empirical_sinr_sp_family(const LsfSnapshot& base,
                                                     const std::vector<double>& data_scale,
                                                     const std::vector<double>& pilot_scale,
                                                     const SystemConfig& cfg,
                                                     const McOptions& opt);

// Sample estimate of E|(x+y)^H x|^2 for x ~ CN(0, vx I_M), y ~ CN(0, vy I_M).
struct MomentSample {
  double mean = 0.0;
  double se = 0.0;
  double expected = 0.0;  // M(M+1) vx^2 + M vx vy
};
MomentSample moment_identity_check(int M, double vx, double vy, long n, std::uint64_t seed);

std::string mc_summary_json(const McResult& r, const std::string& config_hash);

}  // namespace spmimo

#endif
