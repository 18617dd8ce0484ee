#pragma once

#include <cstdint>

namespace mars {

/// Full system configuration of one acquisition: laser, detector, TCSPC
/// binning, target, and how many histogram realizations to draw.
///
/// All times are in seconds. The JSON spelling of each field is given in
/// its comment; see io/config_io.hpp.
struct SystemConfig {
  double rep_period = 100e-9;             ///< "t_r": laser repetition period
  std::uint64_t num_pulses = 1000;        ///< "N_r": emitted pulses per exposure
  double pulse_width = 1e-9;              ///< "sigma_t": Gaussian pulse RMS width
  double dead_time = 0.0;                 ///< "t_d": nonparalyzable dead time
  std::uint32_t num_bins = 1024;          ///< "n_b": histogram bins per period
  double delay = 50e-9;                   ///< "tau": depth-induced delay
  double signal = 1.0;                    ///< "S": mean signal photons per period
  double background = 1.0;                ///< "B": mean background photons per period
  std::uint32_t num_realizations = 1;     ///< "N_iter": histograms to generate

  /// Lambda = S + B, expected arrivals per period.
  double total_flux() const noexcept { return signal + background; }
  double bin_width() const noexcept { return rep_period / num_bins; }
  /// t = N_r * t_r.
  double exposure() const noexcept { return static_cast<double>(num_pulses) * rep_period; }
  double bin_center(std::uint32_t i) const noexcept { return (i + 0.5) * bin_width(); }

  /// True when more than a 6-sigma pulse tail falls outside [0, t_r).
  bool pulse_clipped() const noexcept;

  /// Throws Error(invalid_config) naming the first violated invariant.
  void validate() const;
};

}  // namespace mars
