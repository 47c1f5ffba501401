#ifndef SPMIMO_CLOSED_FORM_HPP
#define SPMIMO_CLOSED_FORM_HPP

#include <cmath>
#include <vector>

#include "spmimo/core_types.hpp"
#include "spmimo/geometry.hpp"

namespace spmimo {

// Large-scale view from the typical BS. Arrays run over every UE of the
// window; UE a sits in cell[a] and has gains beta_cross[a] (to the typical BS)
// and beta_serving[a] (to its own BS), data power p[a] and pilot power q[a].
// The typical UE is UEs[typical], served by cell[typical] == typical_cell.
struct LsfSnapshot {
  std::vector<int> cell;
  std::vector<double> beta_cross;
  std::vector<double> beta_serving;
  std::vector<double> p;
  std::vector<double> q;
  int typical = 0;
  int typical_cell = 0;
  int users_per_cell = 1;

  std::size_t size() const { return cell.size(); }
  bool in_psi(std::size_t a) const { return cell[a] != typical_cell; }
};

// Statistical channel inversion: p = rho_d / beta_serving, q = rho_p / beta_serving.
LsfSnapshot make_snapshot(const NetworkRealization& net, int typical_cell, int typical_user,
                          double rho_d, double rho_p);
LsfSnapshot make_snapshot(const NetworkRealization& net, const SystemConfig& cfg, Scheme scheme,
                          int typical_cell = 0, int typical_user = 0);

// Same gains with a new power split (keeps the channel-inversion rule).
LsfSnapshot with_powers(const LsfSnapshot& s, double rho_d, double rho_p);

double gamma_rp(const LsfSnapshot& s, const SystemConfig& cfg);
double gamma_sp(const LsfSnapshot& s, const SystemConfig& cfg);

SinrBreakdown sinr_rp(const LsfSnapshot& s, const SystemConfig& cfg);
SinrBreakdown sinr_sp(const LsfSnapshot& s, const SystemConfig& cfg);
SinrBreakdown sinr_sp_ub(const LsfSnapshot& s, const SystemConfig& cfg);

// Variance of the effective noise of the SP data estimate (no subtraction),
// written out term by term.
double sp_effective_noise_variance(const LsfSnapshot& s, const SystemConfig& cfg);

// SP_EstSub has no closed form; it is rejected here.
RateResult rate(Scheme scheme, const LsfSnapshot& s, const SystemConfig& cfg);
double prelog(Scheme scheme, const SystemConfig& cfg);

// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      c_ += (sum_ - t) + x;
    else
      c_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + c_; }

 private:
  double sum_ = 0.0;
  double c_ = 0.0;
};

}  // namespace spmimo

#endif
