#include "spmimo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "spmimo/rng.hpp"

namespace spmimo {

double torus_distance(Point a, Point b, double side) {
  double dx = std::abs(a.x - b.x);
  double dy = std::abs(a.y - b.y);
  dx = std::min(dx, side - dx);
  dy = std::min(dy, side - dy);
  return std::hypot(dx, dy);
}

namespace {

int nearest_on_torus(Point p, const std::vector<Point>& bs, double side) {
  int best = 0;
  double bd = INFINITY;
  for (int l = 0; l < static_cast<int>(bs.size()); ++l) {
    double dl = torus_distance(p, bs[l], side);
    if (dl < bd) {
      bd = dl;
      best = l;
    }
  }
  return best;
}

// Uniform grid over [-r, r]^2 for nearest-point queries.
class PointGrid {
 public:
  PointGrid(const std::vector<Point>& pts, double r, double cell)
      : pts_(pts), r_(r), h_(cell), n_(std::max(1, static_cast<int>(std::ceil(2 * r / cell)))) {
    cells_.assign(static_cast<std::size_t>(n_) * n_, {});
    for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
      auto [cx, cy] = cell_of(pts[i]);
      cells_[static_cast<std::size_t>(cy) * n_ + cx].push_back(i);
    }
  }

  // Returns the index of the nearest point and its distance.
  std::pair<int, double> nearest(Point p) const {
    auto [cx, cy] = cell_of(p);
    int best = -1;
    double bd = INFINITY;
    for (int ring = 0; ring <= n_; ++ring) {
      if (best >= 0 && bd <= (ring - 1) * h_) break;
      for (int y = cy - ring; y <= cy + ring; ++y) {
        if (y < 0 || y >= n_) continue;
        bool edge_row = (y == cy - ring || y == cy + ring);
        for (int x = cx - ring; x <= cx + ring; x += edge_row ? 1 : 2 * std::max(ring, 1)) {
          if (x >= 0 && x < n_) {
            for (int i : cells_[static_cast<std::size_t>(y) * n_ + x]) {
              double d = std::hypot(p.x - pts_[i].x, p.y - pts_[i].y);
              if (d < bd) {
                bd = d;
                best = i;
              }
            }
          }
          if (ring == 0) break;
        }
      }
    }
    return {best, bd};
  }

 private:
  std::pair<int, int> cell_of(Point p) const {
    int cx = std::clamp(static_cast<int>((p.x + r_) / h_), 0, n_ - 1);
    int cy = std::clamp(static_cast<int>((p.y + r_) / h_), 0, n_ - 1);
    return {cx, cy};
  }

  const std::vector<Point>& pts_;
  double r_;
  double h_;
  int n_;
  std::vector<std::vector<int>> cells_;
};

Point uniform_in_disc(Rng& rng, double r) {
  double rad = r * std::sqrt(rng.uniform());
  double th = 2.0 * std::numbers::pi * rng.uniform();
  return {rad * std::cos(th), rad * std::sin(th)};
}

void accumulate(double v, double& s, double& s2) {
  s += v;
  s2 += v * v;
}

MomentEstimate finish(double s, double s2, long n) {
  MomentEstimate m;
  if (n <= 0) return m;
  m.mean = s / n;
  double var = n > 1 ? std::max(0.0, (s2 - n * m.mean * m.mean) / (n - 1)) : 0.0;
  m.se = std::sqrt(var / n);
  return m;
}

}  // namespace

void compute_lsf(NetworkRealization& net, const SystemConfig& cfg) {
  std::size_t n = static_cast<std::size_t>(net.n_bs) * net.n_bs * net.K;
  net.d.assign(n, 0.0);
  net.beta.assign(n, 0.0);
  for (int l = 0; l < net.n_bs; ++l)
    for (int lp = 0; lp < net.n_bs; ++lp)
      for (int i = 0; i < net.K; ++i) {
        double d = torus_distance(net.bs_xy[l], net.ue(lp, i), net.side_length);
        net.d[net.idx(l, lp, i)] = d;
        net.beta[net.idx(l, lp, i)] = 1.0 / (cfg.omega * std::pow(d, cfg.alpha));
      }
}

NetworkRealization sample_network(const SystemConfig& cfg, std::uint64_t seed,
                                  const DeploymentOptions& opt) {
  require_valid(cfg);
  Rng rng(seed, {kNetworkStream});
  NetworkRealization net;
  net.K = cfg.K;
  net.side_length = std::sqrt(opt.mean_bs / cfg.density);
  const double L = net.side_length;

  int n_bs = opt.forced_bs;
  if (n_bs <= 0) {
    do {
      n_bs = rng.poisson(opt.mean_bs);
    } while (n_bs < 2);
  }
  net.n_bs = n_bs;
  net.bs_xy.resize(n_bs);
  for (auto& p : net.bs_xy) p = {L * rng.uniform(), L * rng.uniform()};

  net.ue_xy.assign(static_cast<std::size_t>(n_bs) * cfg.K, Point{});
  std::vector<int> filled(n_bs, 0);
  int remaining = n_bs * cfg.K;
  long proposals = 0;
  while (remaining > 0) {
    if (++proposals > opt.max_proposals)
      throw SamplingError(fmt::format("UE placement exceeded {} proposals ({} UEs unplaced)",
                                      opt.max_proposals, remaining));
    Point p{L * rng.uniform(), L * rng.uniform()};
    int l = nearest_on_torus(p, net.bs_xy, L);
    if (filled[l] < cfg.K) {
      net.ue_xy[static_cast<std::size_t>(l) * cfg.K + filled[l]] = p;
      ++filled[l];
      --remaining;
    }
  }
  compute_lsf(net, cfg);
  return net;
}

NetworkRealization sample_network_retry(const SystemConfig& cfg, std::uint64_t seed,
                                        const DeploymentOptions& opt, int attempts) {
  for (int a = 0;; ++a) {
    try {
      return sample_network(cfg, a == 0 ? seed : stream_key(seed, {0x5245ULL, static_cast<std::uint64_t>(a)}), opt);
    } catch (const SamplingError&) {
      if (a + 1 >= attempts) throw;
    }
  }
}

void write_network_csv(const NetworkRealization& net, std::ostream& os) {
  os << "# side_length_km," << fmt::format("{}", net.side_length) << "\n";
  os << "section,index,x_km,y_km\n";
  for (int l = 0; l < net.n_bs; ++l)
    os << fmt::format("bs,{},{},{}\n", l, net.bs_xy[l].x, net.bs_xy[l].y);
  os << "section,cell,user,x_km,y_km\n";
  for (int lp = 0; lp < net.n_bs; ++lp)
    for (int i = 0; i < net.K; ++i)
      os << fmt::format("ue,{},{},{},{}\n", lp, i, net.ue(lp, i).x, net.ue(lp, i).y);
  os << "section,bs,cell,user,d_km,beta\n";
  for (int l = 0; l < net.n_bs; ++l)
    for (int lp = 0; lp < net.n_bs; ++lp)
      for (int i = 0; i < net.K; ++i)
        os << fmt::format("beta,{},{},{},{},{}\n", l, lp, i, net.dist(l, lp, i),
                          net.gain(l, lp, i));
}

double rayleigh_cdf(double d, double density) {
  return d <= 0.0 ? 0.0 : 1.0 - std::exp(-std::numbers::pi * density * d * d);
}

double expected_d_alpha(double alpha, double density) {
  return std::exp(std::lgamma(alpha / 2.0 + 1.0)) / std::pow(std::numbers::pi * density, alpha / 2.0);
}

double expected_sum_moment(double alpha, int kappa) { return 2.0 / (kappa * alpha - 2.0); }

double cross_moment_bound(double alpha) { return 1.0 / (alpha - 1.0); }

std::vector<double> sample_serving_distances(double density, long n, std::uint64_t seed) {
  // P(no BS within r0) = exp(-pi D r0^2); r0 is picked so this is below 1e-30.
  const double r0 = std::sqrt(70.0 / (std::numbers::pi * density));
  std::vector<double> out;
  out.reserve(n);
  for (long t = 0; t < n; ++t) {
    Rng rng(seed, {kCheckStream, 0x44ULL, static_cast<std::uint64_t>(t)});
    int nb = rng.poisson(density * std::numbers::pi * r0 * r0);
    double best = INFINITY;
    for (int b = 0; b < nb; ++b) {
      Point p = uniform_in_disc(rng, r0);
      best = std::min(best, std::hypot(p.x, p.y));
    }
    out.push_back(best);
  }
  return out;
}

LsfMomentReport lsf_moment_check(const SystemConfig& cfg, long n_trials, std::uint64_t seed,
                                 const MomentCheckOptions& opt) {
  LsfMomentReport rep;
  rep.trials = n_trials;
  const double a = cfg.alpha;
  double sd = 0, sd2 = 0, s1 = 0, s12 = 0, s2 = 0, s22 = 0, sc = 0, sc2 = 0;
  long nd = 0;

  if (opt.model == MomentModel::kPlaneTypical) {
    const double R = opt.disc_radius_km;
    const double area = std::numbers::pi * R * R;
    const double cell = 1.0 / std::sqrt(cfg.density);
    std::vector<Point> bs;
    for (long t = 0; t < n_trials; ++t) {
      Rng rng(seed, {kCheckStream, 0x50ULL, static_cast<std::uint64_t>(t)});
      int nb = rng.poisson(cfg.density * area);
      bs.assign(1, Point{0.0, 0.0});
      for (int b = 0; b < nb; ++b) bs.push_back(uniform_in_disc(rng, R));
      PointGrid grid(bs, R, cell);
      int nu = rng.poisson(cfg.density * area);
      double k1 = 0, k2 = 0, dsum = 0;
      long dcount = 0;
      for (int u = 0; u < nu; ++u) {
        Point p = uniform_in_disc(rng, R);
        auto [l, ds] = grid.nearest(p);
        double rr = std::hypot(p.x, p.y);
        if (rr < opt.inner_radius_km) {
          dsum += std::pow(ds, a);
          ++dcount;
        }
        if (l == 0) continue;
        double r = std::pow(ds / rr, a);
        k1 += r;
        k2 += r * r;
      }
      accumulate(k1, s1, s12);
      accumulate(k2, s2, s22);
      if (dcount > 0) {
        accumulate(dsum / dcount, sd, sd2);
        ++nd;
      }
    }
    rep.d_alpha = finish(sd, sd2, nd);
    rep.sum_k1 = finish(s1, s12, n_trials);
    rep.sum_k2 = finish(s2, s22, n_trials);
    return rep;
  }

  SystemConfig c = cfg;
  c.K = std::max(2, cfg.K);
  c.tau_p = std::max(c.tau_p, c.K);
  c.tau_c = std::max(c.tau_c, c.tau_p);
  for (long t = 0; t < n_trials; ++t) {
    auto net = sample_network_retry(c, stream_key(seed, {kCheckStream, 0x43ULL, static_cast<std::uint64_t>(t)}),
                                    opt.deployment);
    double dsum = 0;
    for (int lp = 0; lp < net.n_bs; ++lp)
      for (int i = 0; i < net.K; ++i) dsum += std::pow(net.dist(lp, lp, i), a);
    accumulate(dsum / (net.n_bs * net.K), sd, sd2);
    double k1 = 0, k2 = 0, cr = 0;
    for (int lp = 1; lp < net.n_bs; ++lp) {
      double r0 = std::pow(net.dist(lp, lp, 0) / net.dist(0, lp, 0), a);
      double r1 = std::pow(net.dist(lp, lp, 1) / net.dist(0, lp, 1), a);
      k1 += r0;
      k2 += r0 * r0;
      cr += r0 * r1;
    }
    accumulate(k1, s1, s12);
    accumulate(k2, s2, s22);
    accumulate(cr, sc, sc2);
  }
  rep.d_alpha = finish(sd, sd2, n_trials);
  rep.sum_k1 = finish(s1, s12, n_trials);
  rep.sum_k2 = finish(s2, s22, n_trials);
  rep.cross = finish(sc, sc2, n_trials);
  return rep;
}

}  // namespace spmimo
