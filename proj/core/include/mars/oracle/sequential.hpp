#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "mars/config.hpp"
#include "mars/random.hpp"

namespace mars::oracle {

/// Absolute registration timestamps of one realization, strictly increasing.
struct RegistrationTrace {
  std::vector<double> times;

  /// W_k = T_k - T_{k-1}, k >= 1.
  std::vector<double> holding_times() const;
  /// floor((T_k mod t_r) / Delta).
  std::vector<std::uint32_t> bins(const SystemConfig& cfg) const;
};

/// Inverse of the normalized cumulative flux F(t) / Lambda on [0, t_r),
/// tabulated at `points` nodes with linear interpolation and a guide table.
class PhaseSampler {
 public:
  PhaseSampler(const SystemConfig& cfg, std::size_t points);

  /// Phase t in [0, t_r) with F(t) = v, for v in [0, Lambda).
  double phase_at(double v) const noexcept;
  double total() const noexcept { return total_; }
  std::size_t points() const noexcept { return cumulative_.size() - 1; }

 private:
  double step_ = 0.0;
  double total_ = 0.0;
  double guide_scale_ = 0.0;
  std::vector<double> cumulative_;   ///< F at k * step, k = 0..points
  std::vector<std::uint32_t> guide_;
};

/// Table resolution used by sequential_simulate: max(16 n_b, 4096).
std::size_t phase_table_points(const SystemConfig& cfg);

struct SequentialOptions {
  bool keep_traces = false;
  unsigned threads = 1;
  std::uint64_t stream = 0;   ///< pixel index when simulating a cube
};

struct SequentialResult {
  std::uint32_t num_bins = 0;
  std::uint32_t num_realizations = 0;
  std::vector<std::uint32_t> totals;   ///< registrations per realization
  std::vector<std::uint32_t> counts;   ///< num_realizations x num_bins
  std::vector<RegistrationTrace> traces;
};

/// Per-photon simulation with nonparalyzable dead time. Photon arrivals are
/// an inhomogeneous Poisson process with the periodic flux, generated in
/// order by unit-rate exponential steps in cumulative-flux space; an arrival
/// is registered iff it comes at least t_d after the previous registration.
/// The detector is armed at t = 0. Realization r uses stream
/// (seed, options.stream, r).
SequentialResult sequential_simulate(const SystemConfig& cfg, std::uint64_t seed,
                                     const SequentialOptions& options = {});

/// One realization using an existing phase table.
RegistrationTrace simulate_realization(const SystemConfig& cfg, const PhaseSampler& sampler,
                                       RandomStream& rng, std::uint32_t* histogram);

/// CSV with header "realization,k,T_k".
void write_trace_csv(const std::vector<RegistrationTrace>& traces, std::ostream& out);

}  // namespace mars::oracle
