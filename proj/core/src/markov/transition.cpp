#include "mars/markov/transition.hpp"

#include <cmath>
#include <string>

#include "mars/error.hpp"
#include "mars/flux.hpp"
#include "mars/io/binary.hpp"

namespace mars::markov {

namespace {

constexpr std::uint32_t kDumpVersion = 1;

}  // namespace

std::size_t dead_time_shift(const SystemConfig& cfg) {
  const double relative = std::fmod(cfg.dead_time, cfg.rep_period);
  const double bins = relative / cfg.bin_width();
  // Ratios that are integral up to rounding (75 ns / (100 ns / 4096)) must
  // not be pushed to the next bin by the ceiling.
  const double nearest = std::round(bins);
  const double d = std::abs(bins - nearest) <= 1e-9 * std::max(1.0, nearest) ? nearest
                                                                            : std::ceil(bins);
  return static_cast<std::size_t>(d) % cfg.num_bins;
}

double exponent_entry(const SystemConfig& cfg, std::size_t i, std::size_t j) {
  const double si = cfg.bin_center(static_cast<std::uint32_t>(i));
  const double sj = cfg.bin_center(static_cast<std::uint32_t>(j));
  const double wrap = si > sj ? cfg.total_flux() : 0.0;
  return std::exp(-wrap - cumulative_flux(cfg, sj) + cumulative_flux(cfg, si));
}

TransitionOperator build_transition(const SystemConfig& cfg, const TransitionOptions& options) {
  cfg.validate();
  TransitionOperator op;
  op.cfg_ = cfg;
  op.n_ = cfg.num_bins;
  op.shift_ = dead_time_shift(cfg);
  const std::size_t n = op.n_;

  op.centers_.resize(n);
  op.centered_.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    op.centers_[j] = cfg.bin_center(static_cast<std::uint32_t>(j));
    op.centered_[j] = op.centers_[j] - 0.5 * cfg.rep_period;
  }

  FactoredForm& f = op.factors_;
  f.flux = discretize_flux(cfg).values;
  f.cumulative = cumulative_flux_at_centers(cfg);
  f.wrap_weight = std::exp(-cfg.total_flux());
  f.column.resize(n);
  for (std::size_t j = 0; j < n; ++j) f.column[j] = f.flux[j] * std::exp(-f.cumulative[j]);

  // Z_r = sum_{j >= r} column_j + e^{-Lambda} sum_{j < r} column_j.
  std::vector<double> suffix(n + 1, 0.0);
  for (std::size_t j = n; j-- > 0;) suffix[j] = suffix[j + 1] + f.column[j];
  f.row_scale.resize(n);
  double prefix = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const double z = suffix[r] + f.wrap_weight * prefix;
    if (!(z > 0.0) || !std::isfinite(z)) {
      throw Error(ErrorCode::invalid_config,
                  "transition row " + std::to_string(r) + " has zero total weight");
    }
    f.row_scale[r] = 1.0 / z;
    prefix += f.column[r];
  }

  op.representation_ = options.representation.value_or(
      n > options.implicit_threshold ? Representation::implicit : Representation::dense);

  if (op.representation_ == Representation::dense) {
    // Built entry by entry from the base exponent matrix, independently of
    // the prefix-sum path, then row-rolled by d and normalized.
    Eigen::MatrixXd base(n, n);
    const double lambda = cfg.total_flux();
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t j = 0; j < n; ++j) {
        const double wrap = op.centers_[r] > op.centers_[j] ? lambda : 0.0;
        base(r, j) = f.flux[j] * std::exp(-wrap - f.cumulative[j] + f.cumulative[r]);
      }
    }
    Eigen::MatrixXd p(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto r = static_cast<Eigen::Index>(op.reactivation_bin(i));
      const double total = base.row(r).sum();
      if (!(total > 0.0)) {
        throw Error(ErrorCode::invalid_config,
                    "transition row " + std::to_string(i) + " has zero total weight");
      }
      p.row(static_cast<Eigen::Index>(i)) = base.row(r) / total;
    }
    op.dense_ = std::move(p);
  }
  return op;
}

void TransitionOperator::check_length(std::size_t got) const {
  if (got != n_) {
    throw Error(ErrorCode::dimension, "vector length " + std::to_string(got) +
                                          " does not match operator size " + std::to_string(n_));
  }
}

double TransitionOperator::entry(std::size_t i, std::size_t j) const {
  if (dense_) return (*dense_)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  const std::size_t r = reactivation_bin(i);
  return factors_.row_scale[r] * factors_.column[j] * (j >= r ? 1.0 : factors_.wrap_weight);
}

void TransitionOperator::right_apply(std::span<const double> v, std::span<double> out) const {
  check_length(v.size());
  check_length(out.size());
  if (dense_) {
    Eigen::Map<const Eigen::VectorXd> x(v.data(), static_cast<Eigen::Index>(n_));
    Eigen::Map<Eigen::VectorXd> y(out.data(), static_cast<Eigen::Index>(n_));
    y.noalias() = *dense_ * x;
    return;
  }
  const auto& f = factors_;
  // base_r = row_scale_r (sum_{j>=r} c_j v_j + q sum_{j<r} c_j v_j); suffix and
  // prefix are accumulated separately to avoid cancellation.
  std::vector<double> suffix(n_ + 1, 0.0);
  for (std::size_t j = n_; j-- > 0;) suffix[j] = suffix[j + 1] + f.column[j] * v[j];
  std::vector<double> base(n_);
  double prefix = 0.0;
  for (std::size_t r = 0; r < n_; ++r) {
    base[r] = f.row_scale[r] * (suffix[r] + f.wrap_weight * prefix);
    prefix += f.column[r] * v[r];
  }
  for (std::size_t i = 0; i < n_; ++i) out[i] = base[reactivation_bin(i)];
}

void TransitionOperator::left_apply(std::span<const double> v, std::span<double> out) const {
  check_length(v.size());
  check_length(out.size());
  if (dense_) {
    Eigen::Map<const Eigen::RowVectorXd> x(v.data(), static_cast<Eigen::Index>(n_));
    Eigen::Map<Eigen::RowVectorXd> y(out.data(), static_cast<Eigen::Index>(n_));
    y.noalias() = x * *dense_;
    return;
  }
  const auto& f = factors_;
  // u_r collects the mass of the row whose reactivation bin is r.
  std::vector<double> u(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t r = reactivation_bin(i);
    u[r] = v[i] * f.row_scale[r];
  }
  std::vector<double> later(n_ + 1, 0.0);  // sum_{r > j} u_r
  for (std::size_t j = n_; j-- > 0;) later[j] = later[j + 1] + (j + 1 < n_ ? u[j + 1] : 0.0);
  double upto = 0.0;  // sum_{r <= j} u_r
  for (std::size_t j = 0; j < n_; ++j) {
    upto += u[j];
    out[j] = f.column[j] * (upto + f.wrap_weight * later[j]);
  }
}

std::vector<double> TransitionOperator::left_apply(std::span<const double> v) const {
  std::vector<double> out(n_);
  left_apply(v, out);
  return out;
}

std::vector<double> TransitionOperator::right_apply(std::span<const double> v) const {
  std::vector<double> out(n_);
  right_apply(v, out);
  return out;
}

void TransitionOperator::right_apply_weighted(const PolynomialWeights& w,
                                              std::span<const double> v,
                                              std::span<double> out) const {
  check_length(v.size());
  check_length(out.size());
  const auto& f = factors_;
  const int degree = w.degree;
  std::array<std::vector<double>, 3> suffix;
  std::array<double, 3> prefix{0.0, 0.0, 0.0};
  for (int k = 0; k <= degree; ++k) suffix[k].assign(n_ + 1, 0.0);
  for (std::size_t j = n_; j-- > 0;) {
    double term = f.column[j] * v[j];
    for (int k = 0; k <= degree; ++k) {
      suffix[k][j] = suffix[k][j + 1] + term;
      term *= centered_[j];
    }
  }
  std::vector<double> base(n_);
  for (std::size_t r = 0; r < n_; ++r) {
    double acc = 0.0;
    for (int k = 0; k <= degree; ++k) {
      acc += w.direct[k][r] * suffix[k][r] + f.wrap_weight * w.wrapped[k][r] * prefix[k];
    }
    base[r] = f.row_scale[r] * acc;
    double term = f.column[r] * v[r];
    for (int k = 0; k <= degree; ++k) {
      prefix[k] += term;
      term *= centered_[r];
    }
  }
  for (std::size_t i = 0; i < n_; ++i) out[i] = base[reactivation_bin(i)];
}

void TransitionOperator::left_apply_weighted(const PolynomialWeights& w,
                                             std::span<const double> v,
                                             std::span<double> out) const {
  check_length(v.size());
  check_length(out.size());
  const auto& f = factors_;
  const int degree = w.degree;
  std::vector<double> u(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t r = reactivation_bin(i);
    u[r] = v[i] * f.row_scale[r];
  }
  std::array<std::vector<double>, 3> later;  // sum_{r > j} u_r c_k^wrapped(r)
  for (int k = 0; k <= degree; ++k) {
    later[k].assign(n_ + 1, 0.0);
    for (std::size_t j = n_ - 1; j-- > 0;) {
      later[k][j] = later[k][j + 1] + u[j + 1] * w.wrapped[k][j + 1];
    }
  }
  std::array<double, 3> upto{0.0, 0.0, 0.0};  // sum_{r <= j} u_r c_k^direct(r)
  for (std::size_t j = 0; j < n_; ++j) {
    double acc = 0.0;
    double power = 1.0;
    for (int k = 0; k <= degree; ++k) {
      upto[k] += u[j] * w.direct[k][j];
      acc += power * (upto[k] + f.wrap_weight * later[k][j]);
      power *= centered_[j];
    }
    out[j] = f.column[j] * acc;
  }
}

Eigen::MatrixXd TransitionOperator::to_dense() const {
  if (dense_) return *dense_;
  Eigen::MatrixXd p(n_, n_);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j < n_; ++j) {
      p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = entry(i, j);
    }
  }
  return p;
}

void write_operator_dump(const TransitionOperator& op, std::ostream& out) {
  const Eigen::MatrixXd p = op.to_dense();
  io::write_magic(out, "MRSP");
  io::write_u32(out, kDumpVersion);
  io::write_u32(out, static_cast<std::uint32_t>(op.size()));
  io::write_u32(out, 0u);
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    for (Eigen::Index j = 0; j < p.cols(); ++j) io::write_f64(out, p(i, j));
  }
  if (!out) throw Error(ErrorCode::io, "failed writing operator dump");
}

Eigen::MatrixXd read_operator_dump(std::istream& in) {
  io::expect_magic(in, "MRSP");
  const auto version = io::read_u32(in);
  if (version != kDumpVersion) {
    throw Error(ErrorCode::format, "unsupported MRSP version " + std::to_string(version));
  }
  const auto n = static_cast<Eigen::Index>(io::read_u32(in));
  io::read_u32(in);
  Eigen::MatrixXd p(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) p(i, j) = io::read_f64(in);
  }
  return p;
}

}  // namespace mars::markov
