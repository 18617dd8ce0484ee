#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mars/markov/transition.hpp"
#include "mars/mrp/holding.hpp"

namespace mars::mrp {

/// Moment kernels Q_mu = P~ (.) M, Q_mu2 = P~ (.) M (.) M and
/// Q_sigma2 = sigma2_const P~, applied through the operator's factored form.
///
/// Every M_ij is affine in s_j within a row, with one intercept for j >= r
/// and one for the wrapped entries, so (M - c)^k is a polynomial weight and
/// each kernel product costs O(n_b). The shift c lets callers work with
/// centered moments M - mu, which avoids cancellation in variances.
class MomentKernels {
 public:
  explicit MomentKernels(const markov::TransitionOperator& op);

  const markov::TransitionOperator& op() const noexcept { return *op_; }
  const HoldingMoments& moments() const noexcept { return moments_; }
  double sigma2_const() const noexcept { return moments_.sigma2_const; }

  /// Weights of (M - center)^power for power in {0, 1, 2}.
  markov::PolynomialWeights weights(int power, double center = 0.0) const;

  /// out = (P~ (.) (M - center)^power) v.
  void right_apply(int power, double center, std::span<const double> v,
                   std::span<double> out) const;
  /// out = v (P~ (.) (M - center)^power).
  void left_apply(int power, double center, std::span<const double> v,
                  std::span<double> out) const;

  /// (P~ (.) (M - center)^power) 1.
  std::vector<double> row_sums(int power, double center = 0.0) const;
  /// Q_sigma2 1, identically sigma2_const.
  std::vector<double> sigma2_row_sums() const;

  /// Dense Q_mu, Q_mu2 and Q_sigma2, for inspection and small problems.
  Eigen::MatrixXd dense_mu() const;
  Eigen::MatrixXd dense_mu2() const;
  Eigen::MatrixXd dense_sigma2() const;

 private:
  const markov::TransitionOperator* op_;
  HoldingMoments moments_;
  /// M_ij = intercept[r] + y_j (+ t_r when wrapped), y_j the centered phase.
  std::vector<double> intercept_;
};

}  // namespace mars::mrp
