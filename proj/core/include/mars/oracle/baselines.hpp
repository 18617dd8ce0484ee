#pragma once

#include <cstdint>

#include "mars/config.hpp"
#include "mars/oracle/sequential.hpp"

namespace mars::oracle {

struct PoissonOptions {
  unsigned threads = 1;
  std::uint64_t stream = 0;   ///< pixel index when simulating a cube
};

/// Dead time ignored: bin j of every realization is an independent
/// Poisson(N_r (F(b_{j+1}) - F(b_j))) count. Realization r uses stream
/// (seed, options.stream, r).
SequentialResult poisson_simulate(const SystemConfig& cfg, std::uint64_t seed,
                                  const PoissonOptions& options = {});

/// Counting law of a delayed renewal process with constant rate
/// lambda_0 = Lambda / t_r and dead time t_d over t = N_r t_r.
struct RenewalLaw {
  double count_mean = 0.0;   ///< lambda_0 t / (1 + lambda_0 t_d)
  double count_var = 0.0;    ///< lambda_0 t / (1 + lambda_0 t_d)^3
};

RenewalLaw renewal_law(const SystemConfig& cfg);

}  // namespace mars::oracle
