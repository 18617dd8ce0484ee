#include "support.hpp"

#include <cmath>

#include "mars/flux.hpp"

namespace mars::test {

double Gen::log_uniform(double lo, double hi) {
  return std::exp(uniform(std::log(lo), std::log(hi)));
}

SystemConfig Gen::config(std::uint32_t lo_bins, std::uint32_t hi_bins) {
  SystemConfig cfg;
  cfg.rep_period = log_uniform(20e-9, 500e-9);
  cfg.num_bins = integer(lo_bins, hi_bins);
  cfg.pulse_width = cfg.rep_period * uniform(0.01, 0.05);
  cfg.delay = cfg.rep_period * uniform(0.2, 0.8);
  cfg.dead_time = cfg.rep_period * uniform(0.0, 2.5);
  cfg.signal = log_uniform(0.05, 10.0);
  cfg.background = log_uniform(0.05, 5.0);
  cfg.num_pulses = integer(100, 2000);
  return cfg;
}

std::vector<double> Gen::simplex(std::size_t n) {
  std::vector<double> p(n);
  double total = 0.0;
  for (double& x : p) {
    x = coin() ? rng_.exponential() : 1e-9 * rng_.uniform_positive();
    total += x;
  }
  for (double& x : p) x /= total;
  return p;
}

std::vector<std::vector<double>> reference_transition(const SystemConfig& cfg) {
  const std::size_t n = cfg.num_bins;
  const double delta = cfg.bin_width();
  const double x_d = std::fmod(cfg.dead_time, cfg.rep_period);
  const double ratio = x_d / delta;
  const double snapped = std::abs(ratio - std::round(ratio)) < 1e-9 ? std::round(ratio) : std::ceil(ratio);
  const auto d = static_cast<std::size_t>(snapped) % n;
  const double lambda_total = cfg.total_flux();
  std::vector<double> f(n);
  std::vector<double> rate(n);
  for (std::size_t j = 0; j < n; ++j) {
    f[j] = cumulative_flux(cfg, cfg.bin_center(static_cast<std::uint32_t>(j)));
    rate[j] = flux_at(cfg, cfg.bin_center(static_cast<std::uint32_t>(j)));
  }
  std::vector<std::vector<double>> p(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = (i + d) % n;
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double gap = f[j] - f[r] + (j < r ? lambda_total : 0.0);
      p[i][j] = rate[j] * std::exp(-gap);
      total += p[i][j];
    }
    for (double& x : p[i]) x /= total;
  }
  return p;
}

}  // namespace mars::test
