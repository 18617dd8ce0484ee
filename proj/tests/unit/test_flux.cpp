#include <gtest/gtest.h>

#include <cmath>

#include "mars/flux.hpp"

namespace mars {
namespace {

SystemConfig regime() {
  SystemConfig cfg;
  cfg.signal = 8.2;
  cfg.background = 1.2;
  cfg.delay = 50e-9;
  cfg.num_bins = 256;
  return cfg;
}

TEST(Flux, CumulativeReachesTotalOverPeriod) {
  const SystemConfig cfg = regime();
  EXPECT_NEAR(cumulative_flux(cfg, cfg.rep_period), cfg.total_flux(), 1e-12 * cfg.total_flux());
  EXPECT_EQ(cumulative_flux(cfg, 0.0), 0.0);
}

TEST(Flux, CumulativeMatchesQuadrature) {
  const SystemConfig cfg = regime();
  // Composite Simpson on a fine grid as an independent integral.
  for (double t : {10e-9, 49e-9, 50e-9, 51.5e-9, 90e-9}) {
    const int m = 20000;
    const double h = t / m;
    double s = flux_at(cfg, 0.0) + flux_at(cfg, t);
    for (int k = 1; k < m; ++k) s += (k % 2 ? 4.0 : 2.0) * flux_at(cfg, k * h);
    EXPECT_NEAR(cumulative_flux(cfg, t), s * h / 3.0, 1e-9) << "t = " << t;
  }
}

TEST(Flux, DiscretizedAtBinCenters) {
  const SystemConfig cfg = regime();
  const FluxVector v = discretize_flux(cfg);
  ASSERT_EQ(v.values.size(), cfg.num_bins);
  EXPECT_DOUBLE_EQ(v.bin_width, cfg.bin_width());
  for (std::uint32_t i = 0; i < cfg.num_bins; i += 17) {
    EXPECT_DOUBLE_EQ(v.values[i], flux_at(cfg, cfg.bin_center(i)));
  }
  const auto f = cumulative_flux_at_centers(cfg);
  for (std::size_t i = 1; i < f.size(); ++i) EXPECT_GT(f[i], f[i - 1]);
}

TEST(Flux, BackgroundOnlyIsUniform) {
  SystemConfig cfg = regime();
  cfg.signal = 0.0;
  EXPECT_NEAR(flux_at(cfg, 3e-9), cfg.background / cfg.rep_period, 1e-6);
  EXPECT_NEAR(cumulative_flux(cfg, cfg.rep_period / 4), cfg.background / 4, 1e-12);
}

TEST(NormalCdf, MatchesErfc) {
  for (double x : {-8.0, -3.0, -0.5, 0.0, 0.7, 2.5, 6.0}) {
    EXPECT_NEAR(normal_cdf(x), 0.5 * std::erfc(-x / std::sqrt(2.0)), 1e-15);
  }
}

TEST(NormalCdf, DifferenceKeepsTailPrecision) {
  // Phi(-30) - Phi(-31) is ~5e-198; naive subtraction in the upper tail
  // would return zero.
  const double lower = normal_cdf_difference(-31.0, -30.0);
  const double upper = normal_cdf_difference(30.0, 31.0);
  EXPECT_GT(upper, 0.0);
  EXPECT_NEAR(upper / lower, 1.0, 1e-12);
  EXPECT_NEAR(normal_cdf_difference(-1.0, 1.0), std::erf(1.0 / std::sqrt(2.0)), 1e-15);
}

}  // namespace
}  // namespace mars
