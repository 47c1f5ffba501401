#include "spmimo/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

namespace spmimo {

double t_quantile(double level, double dof) {
  if (!(level > 0.0 && level < 1.0)) throw std::domain_error("t_quantile: level outside (0,1)");
  if (!(dof > 0.0)) return INFINITY;
  boost::math::students_t dist(dof);
  return boost::math::quantile(dist, 0.5 + level / 2.0);
}

double normal_quantile(double p) {
  boost::math::normal dist;
  return boost::math::quantile(dist, p);
}

MeanCi mean_ci(const std::vector<double>& xs, double level) {
  MeanCi r;
  std::size_t n = xs.size();
  if (n == 0) return r;
  double s = 0.0;
  for (double x : xs) s += x;
  r.mean = s / n;
  if (n < 2) return r;
  double ss = 0.0;
  for (double x : xs) ss += (x - r.mean) * (x - r.mean);
  r.se = std::sqrt(ss / (n - 1) / n);
  r.half_width = t_quantile(level, n - 1.0) * r.se;
  return r;
}

double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  double n = xs.size();
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double f = cdf(xs[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

double ks_critical(std::size_t n, double alpha) {
  // Inverse of the Kolmogorov limit law, P(K > c) = alpha, for small alpha.
  double c = std::sqrt(-0.5 * std::log(alpha / 2.0));
  double sn = std::sqrt(static_cast<double>(n));
  return c / (sn + 0.12 + 0.11 / sn);
}

}  // namespace spmimo
