#pragma once

#include <cstdint>
#include <vector>

#include "mars/config.hpp"
#include "mars/random.hpp"

namespace mars::test {

/// Hand-rolled generator for property tests; each case gets its own stream.
class Gen {
 public:
  explicit Gen(std::uint64_t stream) : rng_(0xC0FFEE, StreamPurpose::test, stream) {}

  double uniform(double lo, double hi) { return lo + (hi - lo) * rng_.uniform(); }
  double log_uniform(double lo, double hi);
  std::uint32_t integer(std::uint32_t lo, std::uint32_t hi) {
    return lo + static_cast<std::uint32_t>(rng_.uniform() * (hi - lo + 1));
  }
  bool coin() { return rng_.uniform() < 0.5; }

  /// Random physical configuration with n_b in [lo_bins, hi_bins].
  SystemConfig config(std::uint32_t lo_bins = 16, std::uint32_t hi_bins = 128);
  /// Strictly positive probability vector summing to one, with some tiny masses.
  std::vector<double> simplex(std::size_t n);

  RandomStream& stream() { return rng_; }

 private:
  RandomStream rng_;
};

/// Row-major dense oracle of the transition matrix built straight from the
/// arrival law: w_ij = lambda(s_j) exp(-(F(s_j) - F(s_r)) - Lambda [j < r]).
std::vector<std::vector<double>> reference_transition(const SystemConfig& cfg);

inline constexpr int kCases = 40;

}  // namespace mars::test
