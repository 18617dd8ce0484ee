#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mars/eval/metrics.hpp"
#include "mars/oracle/sequential.hpp"

namespace mars::oracle {

struct EmpiricalLaw {
  double mean = 0.0;              ///< of the totals, unbiased
  double variance = 0.0;
  eval::IntegerPmf pmf;           ///< over the observed range of totals
  double holding_mean = 0.0;      ///< pooled steady-state holding time, seconds
  std::vector<double> lag_covariance;  ///< lags 1..L, seconds^2
  std::size_t holding_samples = 0;
};

/// Registrations discarded at the start of each trace before holding-time
/// statistics are pooled.
inline constexpr std::size_t kBurnIn = 10;

/// Sample moments and pmf of the totals plus, when traces are given, the
/// pooled lag-l autocovariances of the holding times after burn-in. Lag
/// pairs never straddle two traces. Throws insufficient_data for fewer than
/// two totals or too few holding times for the requested lag.
EmpiricalLaw empirical_law(std::span<const std::uint32_t> totals,
                           std::span<const RegistrationTrace> traces = {},
                           std::size_t max_lag = 0, std::size_t burn_in = kBurnIn);

}  // namespace mars::oracle
