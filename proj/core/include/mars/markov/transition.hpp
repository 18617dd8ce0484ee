#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mars/config.hpp"

namespace mars::markov {

enum class Representation { dense, implicit };

struct TransitionOptions {
  /// Above this many bins the operator is kept only in factored form.
  std::size_t implicit_threshold = 256;
  /// Forces a representation regardless of the threshold.
  std::optional<Representation> representation;
};

/// Factored form of the embedded-chain operator.
///
/// With r = (i + d) mod n the reactivation bin of row i,
///   P~_ij = row_scale[r] * column[j] * (j >= r ? 1 : wrap_weight),
///   column[j] = lambda(s_j) * exp(-F(s_j)).
/// The exp(+F(s_r)) factor of the raw weights cancels in the row normalization.
struct FactoredForm {
  std::vector<double> flux;                ///< lambda(s_j)
  std::vector<double> cumulative;          ///< F(s_j)
  std::vector<double> column;              ///< lambda(s_j) exp(-F(s_j))
  std::vector<double> row_scale;           ///< 1 / sum_j column[j] w(r, j), indexed by r
  double wrap_weight = 0.0;                ///< exp(-Lambda)
};

/// Per-reactivation-bin polynomial weights G_ij = sum_k c_k(r, wrapped) y_j^k
/// where y_j = s_j - t_r / 2 is the centered phase of bin j. Used to apply
/// Hadamard products P~ (.) G in O(n) without forming G.
struct PolynomialWeights {
  int degree = 0;                                 ///< 0, 1 or 2
  std::array<std::vector<double>, 3> direct;      ///< c_k(r) for j >= r
  std::array<std::vector<double>, 3> wrapped;     ///< c_k(r) for j < r
};

/// Row-stochastic transition operator P~ of the embedded registration-phase
/// chain. Immutable once built; safe for concurrent reads.
class TransitionOperator {
 public:
  std::size_t size() const noexcept { return n_; }
  /// Dead-time row shift d = ceil((t_d mod t_r) / Delta).
  std::size_t shift() const noexcept { return shift_; }
  Representation representation() const noexcept { return representation_; }
  const FactoredForm& factors() const noexcept { return factors_; }
  const SystemConfig& config() const noexcept { return cfg_; }
  std::size_t reactivation_bin(std::size_t i) const noexcept { return (i + shift_) % n_; }

  /// Bin-center phases s_j.
  const std::vector<double>& centers() const noexcept { return centers_; }
  /// Centered phases y_j = s_j - t_r / 2 (the PolynomialWeights abscissa).
  const std::vector<double>& centered_phases() const noexcept { return centered_; }

  double entry(std::size_t i, std::size_t j) const;

  /// out = v P~ (row vector).
  void left_apply(std::span<const double> v, std::span<double> out) const;
  /// out = P~ v (column vector).
  void right_apply(std::span<const double> v, std::span<double> out) const;
  std::vector<double> left_apply(std::span<const double> v) const;
  std::vector<double> right_apply(std::span<const double> v) const;

  /// out = v (P~ (.) G), always through the factored form.
  void left_apply_weighted(const PolynomialWeights& w, std::span<const double> v,
                           std::span<double> out) const;
  /// out = (P~ (.) G) v, always through the factored form.
  void right_apply_weighted(const PolynomialWeights& w, std::span<const double> v,
                            std::span<double> out) const;

  /// Stored matrix, or nullptr for the implicit representation.
  const Eigen::MatrixXd* dense_matrix() const noexcept {
    return dense_ ? &*dense_ : nullptr;
  }
  /// Materializes the full matrix from whichever representation is held.
  Eigen::MatrixXd to_dense() const;

 private:
  friend TransitionOperator build_transition(const SystemConfig&, const TransitionOptions&);
  TransitionOperator() = default;

  void check_length(std::size_t got) const;

  SystemConfig cfg_;
  std::size_t n_ = 0;
  std::size_t shift_ = 0;
  Representation representation_ = Representation::implicit;
  FactoredForm factors_;
  std::vector<double> centers_;
  std::vector<double> centered_;
  std::optional<Eigen::MatrixXd> dense_;
};

/// d = ceil(x_d / Delta) with x_d = t_d mod t_r.
std::size_t dead_time_shift(const SystemConfig& cfg);

/// Base exponent entry exp[-Lambda 1{s_i > s_j} - F(s_j) + F(s_i)].
double exponent_entry(const SystemConfig& cfg, std::size_t i, std::size_t j);

TransitionOperator build_transition(const SystemConfig& cfg, const TransitionOptions& options = {});

/// Debug dump: "MRSP", u32 version, u32 n_b, u32 reserved, then the dense
/// matrix as row-major little-endian f64.
void write_operator_dump(const TransitionOperator& op, std::ostream& out);
Eigen::MatrixXd read_operator_dump(std::istream& in);

}  // namespace mars::markov
