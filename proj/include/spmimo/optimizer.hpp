#ifndef SPMIMO_OPTIMIZER_HPP
#define SPMIMO_OPTIMIZER_HPP

#include <functional>

namespace spmimo {

struct TauPOptimum {
  int tau_p = 0;
  double value = 0.0;
};

struct DeltaOptimum {
  double delta = 0.0;
  double value = 0.0;
  bool refined = false;  // false: the grid point is the recorded answer
};

// Exhaustive scan over tau_p in [k, tau_c]; ties go to the smaller tau_p.
// Evaluations may run on `threads` workers; the reduction is in index order.
TauPOptimum optimize_tau_p(const std::function<double(int)>& objective, int k, int tau_c,
                           int threads = 1);

// Integer ternary search for unimodal objectives on [k, tau_c].
TauPOptimum ternary_search_tau_p(const std::function<double(int)>& objective, int k, int tau_c);

// Grid scan on {step, 2 step, ..., 1 - step} followed by golden-section
// refinement to 1e-3 around the grid argmax. The grid answer is kept when the
// refined point is not better or lands more than one step away.
DeltaOptimum optimize_delta(const std::function<double(double)>& objective,
                            double grid_step = 0.01, int threads = 1);

// Golden-section maximization on [lo, hi]; returns the best evaluated point.
DeltaOptimum golden_section_max(const std::function<double(double)>& objective, double lo,
                                double hi, double tol);

}  // namespace spmimo

#endif
