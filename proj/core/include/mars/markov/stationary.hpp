#pragma once

#include <cstddef>
#include <vector>

#include "mars/markov/transition.hpp"

namespace mars::markov {

/// Stationary distribution of registration phases over the n_b bins.
struct TemporalPdf {
  std::vector<double> pi;
};

struct StationaryOptions {
  double tolerance = 1e-13;          ///< L1 gap between successive iterates
  std::size_t max_iterations = 100000;
};

/// Left power iteration pi <- pi P~ from the uniform vector, renormalized
/// each step. Throws ConvergenceError with the last L1 gap on failure.
TemporalPdf stationary_pdf(const TransitionOperator& op, const StationaryOptions& options = {});

/// ||pi P~ - pi||_1.
double fixed_point_residual(const TransitionOperator& op, const TemporalPdf& pdf);

}  // namespace mars::markov
