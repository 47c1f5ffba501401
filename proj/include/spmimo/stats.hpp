#ifndef SPMIMO_STATS_HPP
#define SPMIMO_STATS_HPP

#include <functional>
#include <vector>

namespace spmimo {

struct MeanCi {
  double mean = 0.0;
  double se = 0.0;
  double half_width = 0.0;  // at the requested confidence
  double lo() const { return mean - half_width; }
  double hi() const { return mean + half_width; }
};

// Two-sided Student-t quantile for confidence `level` with dof degrees.
double t_quantile(double level, double dof);
double normal_quantile(double p);

// Mean and t-based confidence interval of i.i.d. samples.
MeanCi mean_ci(const std::vector<double>& xs, double level = 0.95);

// One-sample Kolmogorov-Smirnov statistic against a continuous CDF.
double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf);
// Asymptotic critical value with the Stephens small-sample correction.
double ks_critical(std::size_t n, double alpha);

}  // namespace spmimo

#endif
