#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>

#include "mars/markov/stationary.hpp"
#include "mars/markov/transition.hpp"

namespace mars::markov {

/// Leading eigenpairs of P~, ordered by decreasing magnitude.
///
/// Column 0 is lambda_1 = 1 with right vector 1 and left vector pi. The
/// columns satisfy U^T V = I (plain transpose, not conjugate).
struct EigenData {
  std::size_t p = 0;
  Eigen::VectorXcd eigenvalues;
  Eigen::MatrixXcd right_vectors;  ///< V_p, n_b x p
  Eigen::MatrixXcd left_vectors;   ///< U_p, n_b x p
  std::size_t iterations = 0;      ///< subspace iterations used (0 for dense)
};

enum class EigenMethod { automatic, dense, subspace };

struct EigenOptions {
  EigenMethod method = EigenMethod::automatic;
  double tolerance = 1e-10;        ///< Ritz residual target
  std::size_t max_iterations = 20000;
  std::uint64_t seed = 0x5eed;     ///< starting block
};

/// Returns p modes, or p + 1 when the p-th mode would split a conjugate pair.
EigenData leading_eigenpairs(const TransitionOperator& op, const TemporalPdf& pdf, std::size_t p,
                             const EigenOptions& options = {});

/// Full spectrum of the dense matrix, sorted by decreasing magnitude.
Eigen::VectorXcd dense_spectrum(const Eigen::MatrixXd& p);

}  // namespace mars::markov
