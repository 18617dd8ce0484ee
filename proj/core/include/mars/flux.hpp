#pragma once

#include <vector>

#include "mars/config.hpp"

namespace mars {

/// Arrival rate lambda(s_i) sampled at the bin centers s_i = (i + 0.5) * Delta.
struct FluxVector {
  std::vector<double> values;  ///< photons / second
  double bin_width = 0.0;
  bool pulse_clipped = false;  ///< pulse mass leaks past the period boundary
};

/// lambda(t) = S * N(t; tau, sigma_t^2) + B / t_r for t in [0, t_r).
double flux_at(const SystemConfig& cfg, double t);

/// F(t) = integral of lambda over [0, t], for t in [0, t_r].
double cumulative_flux(const SystemConfig& cfg, double t);

FluxVector discretize_flux(const SystemConfig& cfg);

/// F evaluated at every bin center.
std::vector<double> cumulative_flux_at_centers(const SystemConfig& cfg);

/// Standard normal CDF.
double normal_cdf(double x) noexcept;

/// Phi(b) - Phi(a) without cancellation when both lie in the same tail.
double normal_cdf_difference(double a, double b) noexcept;

}  // namespace mars
