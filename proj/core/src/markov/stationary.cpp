#include "mars/markov/stationary.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "mars/error.hpp"

namespace mars::markov {

TemporalPdf stationary_pdf(const TransitionOperator& op, const StationaryOptions& options) {
  const std::size_t n = op.size();
  std::vector<double> pi(n, 1.0 / static_cast<double>(n));
  std::vector<double> next(n);
  double gap = 0.0;
  for (std::size_t it = 1; it <= options.max_iterations; ++it) {
    op.left_apply(pi, next);
    const double total = std::accumulate(next.begin(), next.end(), 0.0);
    gap = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      next[j] /= total;
      gap += std::abs(next[j] - pi[j]);
    }
    pi.swap(next);
    if (gap <= options.tolerance) return TemporalPdf{std::move(pi)};
  }
  throw ConvergenceError("stationary_pdf: power iteration did not converge (L1 gap " +
                             std::to_string(gap) + ")",
                         gap, options.max_iterations);
}

double fixed_point_residual(const TransitionOperator& op, const TemporalPdf& pdf) {
  const auto next = op.left_apply(pdf.pi);
  double r = 0.0;
  for (std::size_t j = 0; j < next.size(); ++j) r += std::abs(next[j] - pdf.pi[j]);
  return r;
}

}  // namespace mars::markov
