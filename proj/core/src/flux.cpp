#include "mars/flux.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mars/error.hpp"

namespace mars {

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_cdf_difference(double a, double b) noexcept {
  // Upper tail: Phi(b) - Phi(a) = Q(a) - Q(b), with Q small and accurate.
  if (a > 0.0 && b > 0.0) {
    return 0.5 * std::erfc(a / std::numbers::sqrt2) - 0.5 * std::erfc(b / std::numbers::sqrt2);
  }
  return normal_cdf(b) - normal_cdf(a);
}

double flux_at(const SystemConfig& cfg, double t) {
  if (!(t >= 0.0 && t < cfg.rep_period)) {
    throw Error(ErrorCode::domain, "flux_at: t = " + std::to_string(t) + " outside [0, t_r)");
  }
  const double z = (t - cfg.delay) / cfg.pulse_width;
  const double pulse = std::exp(-0.5 * z * z) / (cfg.pulse_width * std::sqrt(2.0 * std::numbers::pi));
  return cfg.signal * pulse + cfg.background / cfg.rep_period;
}

double cumulative_flux(const SystemConfig& cfg, double t) {
  if (!(t >= 0.0 && t <= cfg.rep_period)) {
    throw Error(ErrorCode::domain,
                "cumulative_flux: t = " + std::to_string(t) + " outside [0, t_r]");
  }
  const double lo = -cfg.delay / cfg.pulse_width;
  const double hi = (t - cfg.delay) / cfg.pulse_width;
  return cfg.signal * normal_cdf_difference(lo, hi) + cfg.background / cfg.rep_period * t;
}

FluxVector discretize_flux(const SystemConfig& cfg) {
  cfg.validate();
  FluxVector out;
  out.bin_width = cfg.bin_width();
  out.pulse_clipped = cfg.pulse_clipped();
  out.values.resize(cfg.num_bins);
  for (std::uint32_t i = 0; i < cfg.num_bins; ++i) out.values[i] = flux_at(cfg, cfg.bin_center(i));
  return out;
}

std::vector<double> cumulative_flux_at_centers(const SystemConfig& cfg) {
  std::vector<double> f(cfg.num_bins);
  for (std::uint32_t i = 0; i < cfg.num_bins; ++i) f[i] = cumulative_flux(cfg, cfg.bin_center(i));
  return f;
}

}  // namespace mars
