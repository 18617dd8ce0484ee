#include "mars/oracle/sequential.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "mars/error.hpp"
#include "mars/flux.hpp"
#include "mars/parallel.hpp"

namespace mars::oracle {

std::vector<double> RegistrationTrace::holding_times() const {
  std::vector<double> w;
  if (times.size() < 2) return w;
  w.reserve(times.size() - 1);
  for (std::size_t k = 1; k < times.size(); ++k) w.push_back(times[k] - times[k - 1]);
  return w;
}

std::vector<std::uint32_t> RegistrationTrace::bins(const SystemConfig& cfg) const {
  std::vector<std::uint32_t> out;
  out.reserve(times.size());
  const double delta = cfg.bin_width();
  for (double t : times) {
    const double phase = std::fmod(t, cfg.rep_period);
    out.push_back(std::min(cfg.num_bins - 1, static_cast<std::uint32_t>(phase / delta)));
  }
  return out;
}

PhaseSampler::PhaseSampler(const SystemConfig& cfg, std::size_t points) {
  cfg.validate();
  if (points < 1) throw Error(ErrorCode::dimension, "phase table needs at least one interval");
  step_ = cfg.rep_period / static_cast<double>(points);
  cumulative_.resize(points + 1);
  for (std::size_t k = 0; k < points; ++k) {
    cumulative_[k] = cumulative_flux(cfg, static_cast<double>(k) * step_);
  }
  cumulative_[points] = cumulative_flux(cfg, cfg.rep_period);
  total_ = cumulative_[points];

  // guide_[g] = last node k with cumulative_[k] <= g * total / points.
  guide_.resize(points);
  guide_scale_ = static_cast<double>(points) / total_;
  std::size_t k = 0;
  for (std::size_t g = 0; g < points; ++g) {
    const double level = static_cast<double>(g) / guide_scale_;
    while (k + 1 < points && cumulative_[k + 1] <= level) ++k;
    guide_[g] = static_cast<std::uint32_t>(k);
  }
}

double PhaseSampler::phase_at(double v) const noexcept {
  const std::size_t last = guide_.size() - 1;
  std::size_t k = guide_[std::min(last, static_cast<std::size_t>(v * guide_scale_))];
  while (k < last && cumulative_[k + 1] <= v) ++k;
  const double lo = cumulative_[k];
  const double width = cumulative_[k + 1] - lo;
  const double frac = width > 0.0 ? (v - lo) / width : 0.0;
  return (static_cast<double>(k) + std::clamp(frac, 0.0, 1.0)) * step_;
}

std::size_t phase_table_points(const SystemConfig& cfg) {
  return std::max<std::size_t>(16 * static_cast<std::size_t>(cfg.num_bins), 4096);
}

RegistrationTrace simulate_realization(const SystemConfig& cfg, const PhaseSampler& sampler,
                                       RandomStream& rng, std::uint32_t* histogram) {
  RegistrationTrace trace;
  const double lambda = sampler.total();
  const double t_r = cfg.rep_period;
  const double t_d = cfg.dead_time;
  const double delta = cfg.bin_width();
  const std::uint64_t cycles = cfg.num_pulses;
  const std::uint32_t last_bin = cfg.num_bins - 1;

  std::uint64_t cycle = 0;
  double within = 0.0;   // position inside the current cycle, in flux units
  double ready = 0.0;    // earliest absolute time the detector accepts a photon
  for (;;) {
    within += rng.exponential();
    if (within >= lambda) {
      const double skipped = std::floor(within / lambda);
      cycle += static_cast<std::uint64_t>(skipped);
      within -= skipped * lambda;
      if (within >= lambda) within = 0.0;
    }
    if (cycle >= cycles) break;
    const double phase = sampler.phase_at(within);
    const double t = static_cast<double>(cycle) * t_r + phase;
    if (t < ready) continue;
    trace.times.push_back(t);
    ready = t + t_d;
    if (histogram != nullptr) ++histogram[std::min(last_bin, static_cast<std::uint32_t>(phase / delta))];
  }
  return trace;
}

SequentialResult sequential_simulate(const SystemConfig& cfg, std::uint64_t seed,
                                     const SequentialOptions& options) {
  cfg.validate();
  const PhaseSampler sampler(cfg, phase_table_points(cfg));
  SequentialResult result;
  result.num_bins = cfg.num_bins;
  result.num_realizations = cfg.num_realizations;
  result.totals.assign(cfg.num_realizations, 0);
  result.counts.assign(static_cast<std::size_t>(cfg.num_realizations) * cfg.num_bins, 0);
  if (options.keep_traces) result.traces.resize(cfg.num_realizations);

  parallel_for(cfg.num_realizations, options.threads, [&](std::size_t r) {
    RandomStream rng(seed, StreamPurpose::arrivals, options.stream, static_cast<std::uint32_t>(r));
    RegistrationTrace trace =
        simulate_realization(cfg, sampler, rng, result.counts.data() + r * cfg.num_bins);
    result.totals[r] = static_cast<std::uint32_t>(trace.times.size());
    if (options.keep_traces) result.traces[r] = std::move(trace);
  });
  return result;
}

void write_trace_csv(const std::vector<RegistrationTrace>& traces, std::ostream& out) {
  out << "realization,k,T_k\n";
  char buf[64];
  for (std::size_t r = 0; r < traces.size(); ++r) {
    for (std::size_t k = 0; k < traces[r].times.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", traces[r].times[k]);
      out << r << ',' << k << ',' << buf << '\n';
    }
  }
}

}  // namespace mars::oracle
