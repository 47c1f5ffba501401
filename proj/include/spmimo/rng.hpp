#ifndef SPMIMO_RNG_HPP
#define SPMIMO_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <random>

#include <boost/random/normal_distribution.hpp>

namespace spmimo {

using cdouble = std::complex<double>;

std::uint64_t splitmix64(std::uint64_t x);

// Derives a stream key from a base seed and a path of stream ids, e.g.
// (seed, {kNetworkStream, network_index}). Distinct paths give keys that are
// independent for all practical purposes; the engine is seeded from the key
// through a seed_seq so nearby keys do not give correlated states.
std::uint64_t stream_key(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

class Rng {
 public:
  explicit Rng(std::uint64_t key);
  Rng(std::uint64_t seed, std::initializer_list<std::uint64_t> path)
      : Rng(stream_key(seed, path)) {}

  double uniform() { return unif_(eng_); }
  double normal() { return norm_(eng_); }
  // Circularly-symmetric complex Gaussian with E|x|^2 = var.
  cdouble cnormal(double var = 1.0) {
    double s = std::sqrt(0.5 * var);
    double re = norm_(eng_);
    double im = norm_(eng_);
    return {s * re, s * im};
  }
  std::uint64_t next_u64() { return eng_(); }
  int poisson(double mean) { return std::poisson_distribution<int>(mean)(eng_); }
  // Uniform integer in [0, n).
  int below(int n) { return std::uniform_int_distribution<int>(0, n - 1)(eng_); }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
  std::uniform_real_distribution<double> unif_{0.0, 1.0};
  boost::random::normal_distribution<double> norm_{0.0, 1.0};  // ziggurat
};

// Stream ids of the top-level randomness consumers.
enum StreamId : std::uint64_t {
  kNetworkStream = 1,
  kFadingStream = 2,
  kTypicalStream = 3,
  kCheckStream = 4,
};

// Runs fn(i) for i in [0, n) on up to `threads` workers. Work is pulled from a
// shared counter; callers write results into slot i so the reduction order is
// fixed regardless of scheduling. threads <= 1 runs inline.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

int default_threads();

}  // namespace spmimo

#endif
