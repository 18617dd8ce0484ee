#include "mars/oracle/baselines.hpp"

#include <algorithm>
#include <random>
#include <vector>

#include "mars/flux.hpp"
#include "mars/parallel.hpp"
#include "mars/random.hpp"

namespace mars::oracle {

SequentialResult poisson_simulate(const SystemConfig& cfg, std::uint64_t seed,
                                  const PoissonOptions& options) {
  cfg.validate();
  const std::uint32_t n_b = cfg.num_bins;
  std::vector<double> means(n_b);
  double previous = 0.0;
  for (std::uint32_t j = 0; j < n_b; ++j) {
    const double edge = j + 1 == n_b ? cfg.rep_period : (j + 1) * cfg.bin_width();
    const double current = cumulative_flux(cfg, edge);
    means[j] = static_cast<double>(cfg.num_pulses) * std::max(current - previous, 0.0);
    previous = current;
  }

  SequentialResult result;
  result.num_bins = n_b;
  result.num_realizations = cfg.num_realizations;
  result.totals.assign(cfg.num_realizations, 0);
  result.counts.assign(static_cast<std::size_t>(cfg.num_realizations) * n_b, 0);
  parallel_for(cfg.num_realizations, options.threads, [&](std::size_t r) {
    RandomStream rng(seed, StreamPurpose::poisson, options.stream, static_cast<std::uint32_t>(r));
    std::uint64_t total = 0;
    std::uint32_t* out = result.counts.data() + r * n_b;
    for (std::uint32_t j = 0; j < n_b; ++j) {
      if (means[j] <= 0.0) continue;
      std::poisson_distribution<std::uint32_t> dist(means[j]);
      out[j] = dist(rng);
      total += out[j];
    }
    result.totals[r] = static_cast<std::uint32_t>(total);
  });
  return result;
}

RenewalLaw renewal_law(const SystemConfig& cfg) {
  cfg.validate();
  const double rate = cfg.total_flux() / cfg.rep_period;
  const double t = cfg.exposure();
  const double d = 1.0 + rate * cfg.dead_time;
  return {rate * t / d, rate * t / (d * d * d)};
}

}  // namespace mars::oracle
