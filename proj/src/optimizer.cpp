#include "spmimo/optimizer.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "spmimo/rng.hpp"

namespace spmimo {

TauPOptimum optimize_tau_p(const std::function<double(int)>& objective, int k, int tau_c,
                           int threads) {
  if (k > tau_c || k < 1) throw std::invalid_argument("optimize_tau_p: empty domain");
  std::size_t n = static_cast<std::size_t>(tau_c - k + 1);
  std::vector<double> vals(n);
  parallel_for(n, threads, [&](std::size_t i) { vals[i] = objective(k + static_cast<int>(i)); });
  TauPOptimum best{k, vals[0]};
  for (std::size_t i = 1; i < n; ++i)
    if (vals[i] > best.value) best = {k + static_cast<int>(i), vals[i]};
  return best;
}

TauPOptimum ternary_search_tau_p(const std::function<double(int)>& objective, int k, int tau_c) {
  if (k > tau_c || k < 1) throw std::invalid_argument("ternary_search_tau_p: empty domain");
  int lo = k, hi = tau_c;
  while (hi - lo > 2) {
    int m1 = lo + (hi - lo) / 3;
    int m2 = hi - (hi - lo) / 3;
    if (objective(m1) < objective(m2))
      lo = m1 + 1;
    else
      hi = m2;
  }
  TauPOptimum best{lo, objective(lo)};
  for (int t = lo + 1; t <= hi; ++t) {
    double v = objective(t);
    if (v > best.value) best = {t, v};
  }
  return best;
}

DeltaOptimum golden_section_max(const std::function<double(double)>& objective, double lo,
                                double hi, double tol) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = objective(c), fd = objective(d);
  DeltaOptimum best{c, fc, true};
  if (fd > best.value) best = {d, fd, true};
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = objective(c);
      if (fc > best.value) best = {c, fc, true};
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = objective(d);
      if (fd > best.value) best = {d, fd, true};
    }
  }
  return best;
}

DeltaOptimum optimize_delta(const std::function<double(double)>& objective, double grid_step,
                            int threads) {
  if (!(grid_step > 0.0 && grid_step <= 0.5))
    throw std::invalid_argument("optimize_delta: grid_step must lie in (0, 0.5]");
  int n = static_cast<int>(std::floor(1.0 / grid_step + 1e-9)) - 1;
  if (n < 1) n = 1;
  std::vector<double> xs(n), vals(n);
  for (int i = 0; i < n; ++i) xs[i] = (i + 1) * grid_step;
  parallel_for(static_cast<std::size_t>(n), threads,
               [&](std::size_t i) { vals[i] = objective(xs[i]); });
  int bi = 0;
  for (int i = 1; i < n; ++i)
    if (vals[i] > vals[bi]) bi = i;
  DeltaOptimum grid{xs[bi], vals[bi], false};

  double lo = std::max(xs[bi] - grid_step, 0.5 * grid_step * 1e-3);
  double hi = std::min(xs[bi] + grid_step, 1.0 - 0.5 * grid_step * 1e-3);
  DeltaOptimum ref = golden_section_max(objective, lo, hi, 1e-3);
  if (ref.value > grid.value && std::abs(ref.delta - grid.delta) <= grid_step) return ref;
  return grid;
}

}  // namespace spmimo
