#include "mars/oracle/empirical.hpp"

#include "mars/error.hpp"

namespace mars::oracle {

EmpiricalLaw empirical_law(std::span<const std::uint32_t> totals,
                           std::span<const RegistrationTrace> traces, std::size_t max_lag,
                           std::size_t burn_in) {
  if (totals.size() < 2) throw Error(ErrorCode::insufficient_data, "empirical law needs two or more realizations");
  EmpiricalLaw law;
  const eval::SampleMoments m = eval::sample_moments(totals);
  law.mean = m.mean;
  law.variance = m.variance;
  law.pmf = eval::IntegerPmf::from_samples(totals);
  if (traces.empty() || max_lag == 0) return law;

  // W_k = T_k - T_{k-1} is kept once T_{k-1} is past the burn-in.
  std::vector<std::vector<double>> steady;
  steady.reserve(traces.size());
  double sum = 0.0;
  for (const RegistrationTrace& trace : traces) {
    std::vector<double> w;
    for (std::size_t k = burn_in + 1; k < trace.times.size(); ++k) {
      w.push_back(trace.times[k] - trace.times[k - 1]);
      sum += w.back();
    }
    law.holding_samples += w.size();
    steady.push_back(std::move(w));
  }
  if (law.holding_samples <= max_lag + 1) {
    throw Error(ErrorCode::insufficient_data, "too few steady-state holding times for the requested lag");
  }
  law.holding_mean = sum / static_cast<double>(law.holding_samples);
  law.lag_covariance.assign(max_lag, 0.0);
  for (std::size_t l = 1; l <= max_lag; ++l) {
    double acc = 0.0;
    std::size_t pairs = 0;
    for (const auto& w : steady) {
      for (std::size_t k = 0; k + l < w.size(); ++k) {
        acc += (w[k] - law.holding_mean) * (w[k + l] - law.holding_mean);
        ++pairs;
      }
    }
    if (pairs == 0) throw Error(ErrorCode::insufficient_data, "no holding-time pairs at lag " + std::to_string(l));
    law.lag_covariance[l - 1] = acc / static_cast<double>(pairs);
  }
  return law;
}

}  // namespace mars::oracle
