#include "mars/mrp/holding.hpp"

#include <cmath>
#include <string>

#include "mars/error.hpp"
#include "mars/markov/transition.hpp"

namespace mars::mrp {

HoldingMoments holding_moments(const SystemConfig& cfg) {
  cfg.validate();
  const double lambda = cfg.total_flux();
  HoldingMoments h;
  h.dead_time = cfg.dead_time;
  h.rep_period = cfg.rep_period;
  h.K = 1.0 / std::expm1(lambda);
  if (!std::isfinite(h.K)) {
    throw Error(ErrorCode::invalid_config, "holding moments diverge for S + B = 0");
  }
  h.sigma2_const = h.K * (1.0 + h.K) * cfg.rep_period * cfg.rep_period;
  const double x_d = std::fmod(cfg.dead_time, cfg.rep_period);
  const auto d = static_cast<double>(markov::dead_time_shift(cfg));
  h.offset = std::max(0.0, d * cfg.bin_width() - x_d);
  if (d == 0.0 && x_d > 0.5 * cfg.rep_period) h.offset = cfg.rep_period - x_d;
  return h;
}

HoldingMoment holding_moment(const SystemConfig& cfg, std::size_t i, std::size_t j) {
  if (i >= cfg.num_bins || j >= cfg.num_bins) {
    throw Error(ErrorCode::dimension, "holding_moment: bin index out of range");
  }
  const HoldingMoments h = holding_moments(cfg);
  const std::size_t r = (i + markov::dead_time_shift(cfg)) % cfg.num_bins;
  const double s_j = cfg.bin_center(static_cast<std::uint32_t>(j));
  const double s_r = cfg.bin_center(static_cast<std::uint32_t>(r));
  const double wrap = j < r ? cfg.rep_period : 0.0;
  return {h.dead_time + h.offset + (s_j - s_r) + wrap + h.K * cfg.rep_period, h.sigma2_const};
}

}  // namespace mars::mrp
