#include "mars/mrp/kernels.hpp"

#include <string>

#include "mars/error.hpp"

namespace mars::mrp {

MomentKernels::MomentKernels(const markov::TransitionOperator& op)
    : op_(&op), moments_(holding_moments(op.config())) {
  const std::size_t n = op.size();
  const double t_r = op.config().rep_period;
  const auto& s = op.centers();
  intercept_.resize(n);
  // M_ij = t_d + offset + (s_j - s_r) + K t_r = intercept_r + (s_j - t_r / 2).
  for (std::size_t r = 0; r < n; ++r) {
    intercept_[r] = moments_.dead_time + moments_.offset - s[r] + moments_.K * t_r + 0.5 * t_r;
  }
}

markov::PolynomialWeights MomentKernels::weights(int power, double center) const {
  if (power < 0 || power > 2) {
    throw Error(ErrorCode::domain, "moment kernel power must be 0, 1 or 2");
  }
  const std::size_t n = op_->size();
  const double t_r = op_->config().rep_period;
  markov::PolynomialWeights w;
  w.degree = power;
  for (int k = 0; k <= power; ++k) {
    w.direct[k].resize(n);
    w.wrapped[k].resize(n);
  }
  for (std::size_t r = 0; r < n; ++r) {
    const double a = intercept_[r] - center;
    const double b = a + t_r;
    // (a + y)^power expanded in powers of y.
    switch (power) {
      case 0:
        w.direct[0][r] = 1.0;
        w.wrapped[0][r] = 1.0;
        break;
      case 1:
        w.direct[0][r] = a;
        w.direct[1][r] = 1.0;
        w.wrapped[0][r] = b;
        w.wrapped[1][r] = 1.0;
        break;
      default:
        w.direct[0][r] = a * a;
        w.direct[1][r] = 2.0 * a;
        w.direct[2][r] = 1.0;
        w.wrapped[0][r] = b * b;
        w.wrapped[1][r] = 2.0 * b;
        w.wrapped[2][r] = 1.0;
        break;
    }
  }
  return w;
}

void MomentKernels::right_apply(int power, double center, std::span<const double> v,
                                std::span<double> out) const {
  op_->right_apply_weighted(weights(power, center), v, out);
}

void MomentKernels::left_apply(int power, double center, std::span<const double> v,
                               std::span<double> out) const {
  op_->left_apply_weighted(weights(power, center), v, out);
}

std::vector<double> MomentKernels::row_sums(int power, double center) const {
  const std::vector<double> ones(op_->size(), 1.0);
  std::vector<double> out(op_->size());
  right_apply(power, center, ones, out);
  return out;
}

std::vector<double> MomentKernels::sigma2_row_sums() const {
  return std::vector<double>(op_->size(), moments_.sigma2_const);
}

Eigen::MatrixXd MomentKernels::dense_mu() const {
  const std::size_t n = op_->size();
  const double t_r = op_->config().rep_period;
  const auto& y = op_->centered_phases();
  Eigen::MatrixXd q(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = op_->reactivation_bin(i);
    for (std::size_t j = 0; j < n; ++j) {
      const double m = intercept_[r] + y[j] + (j < r ? t_r : 0.0);
      q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = op_->entry(i, j) * m;
    }
  }
  return q;
}

Eigen::MatrixXd MomentKernels::dense_mu2() const {
  const std::size_t n = op_->size();
  const double t_r = op_->config().rep_period;
  const auto& y = op_->centered_phases();
  Eigen::MatrixXd q(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = op_->reactivation_bin(i);
    for (std::size_t j = 0; j < n; ++j) {
      const double m = intercept_[r] + y[j] + (j < r ? t_r : 0.0);
      q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = op_->entry(i, j) * m * m;
    }
  }
  return q;
}

Eigen::MatrixXd MomentKernels::dense_sigma2() const {
  return moments_.sigma2_const * op_->to_dense();
}

}  // namespace mars::mrp
