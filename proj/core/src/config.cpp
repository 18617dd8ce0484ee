#include "mars/config.hpp"

#include <cmath>
#include <string>

#include "mars/error.hpp"

namespace mars {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::invalid_config, std::string("invalid configuration: ") + what);
}

}  // namespace

bool SystemConfig::pulse_clipped() const noexcept {
  if (signal == 0.0) return false;
  return delay < 6.0 * pulse_width || delay > rep_period - 6.0 * pulse_width;
}

void SystemConfig::validate() const {
  require(std::isfinite(rep_period) && rep_period > 0.0, "t_r must be positive");
  require(num_bins >= 1, "n_b must be at least 1");
  require(num_pulses >= 1, "N_r must be at least 1");
  require(num_realizations >= 1, "N_iter must be at least 1");
  require(std::isfinite(signal) && signal >= 0.0, "S must be nonnegative");
  require(std::isfinite(background) && background >= 0.0, "B must be nonnegative");
  require(total_flux() > 0.0, "S + B must be positive");
  require(std::isfinite(delay) && delay >= 0.0 && delay < rep_period, "tau must lie in [0, t_r)");
  require(std::isfinite(dead_time) && dead_time >= 0.0, "t_d must be nonnegative");
  require(std::isfinite(pulse_width) && pulse_width > 0.0, "sigma_t must be positive");
}

}  // namespace mars
