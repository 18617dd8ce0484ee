#pragma once

#include <cstddef>

#include "mars/config.hpp"

namespace mars::mrp {

/// Phase-independent scalars of the conditional holding-time moments.
///
/// mu_ij = t_d + t_{i'j} + K t_r,  sigma2_ij = sigma2_const for all (i, j),
/// with t_{i'j} = (s_j - x_{i'}) mod t_r and x_{i'} = (s_i + t_d) mod t_r.
struct HoldingMoments {
  double dead_time = 0.0;
  double rep_period = 0.0;
  double K = 0.0;              ///< e^{-Lambda} / (1 - e^{-Lambda}), expected extra periods
  double sigma2_const = 0.0;   ///< e^{-Lambda} / (1 - e^{-Lambda})^2 t_r^2
  double offset = 0.0;         ///< d Delta - (t_d mod t_r), in [0, Delta)
};

struct HoldingMoment {
  double mu = 0.0;
  double sigma2 = 0.0;
};

HoldingMoments holding_moments(const SystemConfig& cfg);

/// Conditional moments of the gap from a registration in bin i to the next one
/// in bin j.
HoldingMoment holding_moment(const SystemConfig& cfg, std::size_t i, std::size_t j);

}  // namespace mars::mrp
