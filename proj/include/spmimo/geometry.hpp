#ifndef SPMIMO_GEOMETRY_HPP
#define SPMIMO_GEOMETRY_HPP

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "spmimo/core_types.hpp"

namespace spmimo {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Distance on the square torus of side `side`. Equal to the minimum over the 9
// shifted images of b.
double torus_distance(Point a, Point b, double side);

// One spatial draw. UEs are stored cell-major: UE i of cell l has index l*K + i.
// d and beta are indexed [l][l'][i]: distance from BS l to UE i of cell l'.
struct NetworkRealization {
  std::vector<Point> bs_xy;
  std::vector<Point> ue_xy;
  std::vector<double> d;
  std::vector<double> beta;
  double side_length = 0.0;
  int n_bs = 0;
  int K = 0;

  std::size_t idx(int l, int lp, int i) const {
    return (static_cast<std::size_t>(l) * n_bs + lp) * K + i;
  }
  double dist(int l, int lp, int i) const { return d[idx(l, lp, i)]; }
  double gain(int l, int lp, int i) const { return beta[idx(l, lp, i)]; }
  const Point& ue(int lp, int i) const { return ue_xy[static_cast<std::size_t>(lp) * K + i]; }
};

struct DeploymentOptions {
  double mean_bs = 20.0;          // N_av = D * L^2
  int forced_bs = 0;              // > 0 fixes n_bs (test hook); 1 is allowed
  long max_proposals = 1000000;   // rejection-sampling cap per network
};

class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// PPP BSs on the torus (n_bs >= 2 by redraw unless forced), then K UEs uniform
// in every Voronoi cell by rejection. Throws SamplingError past the proposal
// cap.
NetworkRealization sample_network(const SystemConfig& cfg, std::uint64_t seed,
                                  const DeploymentOptions& opt = {});

// Retries with derived seeds when a draw hits the proposal cap.
NetworkRealization sample_network_retry(const SystemConfig& cfg, std::uint64_t seed,
                                        const DeploymentOptions& opt = {}, int attempts = 16);

// Fills d and beta from the positions.
void compute_lsf(NetworkRealization& net, const SystemConfig& cfg);

// CSV with sections: bs (index,x,y), ue (cell,user,x,y), beta (l,lp,i,d,beta).
void write_network_csv(const NetworkRealization& net, std::ostream& os);

struct MomentEstimate {
  double mean = 0.0;
  double se = 0.0;
};

// Sample moments of the distance law and of the interference sums
//   S_kappa = sum over UEs not served by the typical BS of (d_serving/d_typical)^(alpha*kappa).
enum class MomentModel {
  // Typical BS at the origin of a PPP disc, interferers a uniform UE process of
  // intensity D with nearest-BS association. This is the model under which the
  // distance and moment laws are exact, up to truncation at the disc edge.
  kPlaneTypical,
  // The simulation network: torus window with exactly K UEs per cell.
  kPerCellWindow,
};

struct LsfMomentReport {
  MomentEstimate d_alpha;   // E{d^alpha}, serving distance
  MomentEstimate sum_k1;    // E{S_1}
  MomentEstimate sum_k2;    // E{S_2}
  MomentEstimate cross;     // E{sum_l' r_l'0 r_l'1}; per-cell model only
  long trials = 0;
};

struct MomentCheckOptions {
  MomentModel model = MomentModel::kPlaneTypical;
  double disc_radius_km = 3.0;       // plane model
  double inner_radius_km = 2.5;      // plane model: UEs used for E{d^alpha}
  DeploymentOptions deployment;      // per-cell model
};

LsfMomentReport lsf_moment_check(const SystemConfig& cfg, long n_trials, std::uint64_t seed,
                                 const MomentCheckOptions& opt = {});

// Closed forms of the distance law.
double rayleigh_cdf(double d, double density);
double expected_d_alpha(double alpha, double density);
double expected_sum_moment(double alpha, int kappa);
double cross_moment_bound(double alpha);

// Serving distances of uniform points with nearest-BS association in a PPP
// disc (used by the Kolmogorov-Smirnov check).
std::vector<double> sample_serving_distances(double density, long n, std::uint64_t seed);

}  // namespace spmimo

#endif
