#include "mars/markov/eigenpairs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "mars/error.hpp"
#include "mars/random.hpp"

namespace mars::markov {

namespace {

using cd = std::complex<double>;

/// Indices of `values` by decreasing magnitude; conjugate partners end up
/// adjacent with the positive imaginary part first.
std::vector<Eigen::Index> order_by_magnitude(const Eigen::VectorXcd& values) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(values.size()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double ma = std::abs(values[a]);
    const double mb = std::abs(values[b]);
    if (std::abs(ma - mb) > 1e-12 * std::max(ma, mb)) return ma > mb;
    return values[a].imag() > values[b].imag();
  });
  return idx;
}

bool is_complex(cd z) { return std::abs(z.imag()) > 1e-12 * std::max(1.0, std::abs(z)); }

bool conjugates(cd a, cd b) {
  return std::abs(a - std::conj(b)) <= 1e-8 * std::max(1.0, std::abs(a));
}

/// Number of leading entries of `sorted` to keep so that `want` is reached
/// without separating a conjugate pair.
std::size_t keep_count(const std::vector<cd>& sorted, std::size_t want) {
  if (want == 0 || want >= sorted.size()) return std::min(want, sorted.size());
  const cd last = sorted[want - 1];
  if (is_complex(last) && last.imag() > 0.0 && conjugates(last, sorted[want])) return want + 1;
  return want;
}

void normalize_columns(Eigen::MatrixXcd& v) {
  for (Eigen::Index k = 0; k < v.cols(); ++k) {
    const double norm = v.col(k).norm();
    if (norm > 0.0) v.col(k) /= norm;
  }
}

/// U <- U G^{-T} with G = U^T V, so that U^T V = I.
void biorthogonalize(Eigen::MatrixXcd& u, const Eigen::MatrixXcd& v) {
  const Eigen::MatrixXcd g = u.transpose() * v;
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(g);
  if (!lu.isInvertible()) {
    throw Error(ErrorCode::consistency, "leading_eigenpairs: left and right modes are not dual");
  }
  u = u * lu.inverse().transpose();
}

/// Rotates a column by its largest entry's phase and drops the imaginary part.
void make_real(Eigen::MatrixXcd& m, Eigen::Index c) {
  Eigen::Index at = 0;
  m.col(c).cwiseAbs().maxCoeff(&at);
  const cd entry = m(at, c);
  if (std::abs(entry) > 0.0) m.col(c) *= std::abs(entry) / entry;
  m.col(c) = m.col(c).real().cast<cd>();
}

/// The operator is real: real modes get real vectors and the second member of
/// each pair is set to the exact conjugate of the first, so imaginary parts
/// cancel to rounding in sums over modes.
void mirror_pairs(std::vector<cd>& values, Eigen::MatrixXcd& right, Eigen::MatrixXcd& left) {
  for (std::size_t k = 0; k < values.size(); ++k) {
    const auto c = static_cast<Eigen::Index>(k);
    if (!is_complex(values[k])) {
      values[k] = values[k].real();
      make_real(right, c);
      make_real(left, c);
      continue;
    }
    if (k + 1 >= values.size() || values[k].imag() < 0.0 || !conjugates(values[k], values[k + 1])) continue;
    values[k + 1] = std::conj(values[k]);
    right.col(c + 1) = right.col(c).conjugate();
    left.col(c + 1) = left.col(c).conjugate();
    ++k;
  }
}

EigenData assemble(const TemporalPdf& pdf, std::vector<cd> values, Eigen::MatrixXcd right,
                   Eigen::MatrixXcd left, std::size_t iterations) {
  const auto n = static_cast<Eigen::Index>(pdf.pi.size());
  const auto extra = static_cast<Eigen::Index>(values.size());
  EigenData out;
  out.p = values.size() + 1;
  out.iterations = iterations;
  out.eigenvalues.resize(extra + 1);
  out.right_vectors.resize(n, extra + 1);
  out.left_vectors.resize(n, extra + 1);
  out.eigenvalues[0] = 1.0;
  out.right_vectors.col(0).setConstant(cd(1.0, 0.0));
  for (Eigen::Index j = 0; j < n; ++j) out.left_vectors(j, 0) = pdf.pi[static_cast<std::size_t>(j)];
  if (extra > 0) {
    mirror_pairs(values, right, left);
    biorthogonalize(left, right);
    for (Eigen::Index k = 0; k < extra; ++k) out.eigenvalues[k + 1] = values[static_cast<std::size_t>(k)];
    out.right_vectors.rightCols(extra) = right;
    out.left_vectors.rightCols(extra) = left;
  }
  return out;
}

EigenData dense_pairs(const TransitionOperator& op, const TemporalPdf& pdf, std::size_t p) {
  const Eigen::MatrixXd dense = op.dense_matrix() ? *op.dense_matrix() : op.to_dense();
  Eigen::EigenSolver<Eigen::MatrixXd> es(dense, true);
  if (es.info() != Eigen::Success) {
    throw ConvergenceError("leading_eigenpairs: dense eigensolver failed", 0.0, 0);
  }
  const Eigen::VectorXcd values = es.eigenvalues();
  const Eigen::MatrixXcd vectors = es.eigenvectors();
  const Eigen::MatrixXcd dual = vectors.inverse();

  // The unit mode is represented exactly by (1, pi); drop its numerical copy.
  Eigen::Index unit = 0;
  for (Eigen::Index k = 1; k < values.size(); ++k) {
    if (std::abs(values[k] - 1.0) < std::abs(values[unit] - 1.0)) unit = k;
  }
  std::vector<cd> sorted;
  std::vector<Eigen::Index> source;
  for (Eigen::Index k : order_by_magnitude(values)) {
    if (k == unit) continue;
    sorted.push_back(values[k]);
    source.push_back(k);
  }
  const std::size_t keep = keep_count(sorted, p - 1);
  const auto n = dense.rows();
  Eigen::MatrixXcd right(n, static_cast<Eigen::Index>(keep));
  Eigen::MatrixXcd left(n, static_cast<Eigen::Index>(keep));
  for (std::size_t k = 0; k < keep; ++k) {
    right.col(static_cast<Eigen::Index>(k)) = vectors.col(source[k]);
    left.col(static_cast<Eigen::Index>(k)) = dual.row(source[k]).transpose();
  }
  normalize_columns(right);
  sorted.resize(keep);
  return assemble(pdf, sorted, right, left, 0);
}

struct RitzResult {
  std::vector<cd> values;
  Eigen::MatrixXcd vectors;
  std::size_t iterations = 0;
};

/// Block subspace iteration with Rayleigh-Ritz extraction on the deflated
/// operator. `apply` maps an n x m block X to A X.
template <typename Apply>
RitzResult subspace_iteration(Apply&& apply, Eigen::Index n, Eigen::Index m, std::size_t want,
                              const EigenOptions& options, std::uint32_t direction) {
  RandomStream rng(options.seed, StreamPurpose::solver, direction);
  Eigen::MatrixXd q(n, m);
  for (Eigen::Index c = 0; c < m; ++c) {
    for (Eigen::Index r = 0; r < n; ++r) q(r, c) = rng.normal();
  }
  q = Eigen::HouseholderQR<Eigen::MatrixXd>(q).householderQ() * Eigen::MatrixXd::Identity(n, m);

  double residual = 0.0;
  for (std::size_t it = 1; it <= options.max_iterations; ++it) {
    const Eigen::MatrixXd z = apply(q);
    const Eigen::MatrixXd h = q.transpose() * z;
    Eigen::EigenSolver<Eigen::MatrixXd> es(h, true);
    if (es.info() == Eigen::Success) {
      const Eigen::VectorXcd theta = es.eigenvalues();
      const Eigen::MatrixXcd y = es.eigenvectors();
      const auto order = order_by_magnitude(theta);
      std::vector<cd> sorted;
      for (auto k : order) sorted.push_back(theta[k]);
      const std::size_t keep = keep_count(sorted, want);
      residual = 0.0;
      Eigen::MatrixXcd x(n, static_cast<Eigen::Index>(keep));
      for (std::size_t k = 0; k < keep; ++k) {
        const Eigen::VectorXcd yk = y.col(order[k]) / y.col(order[k]).norm();
        const Eigen::VectorXcd r = z.cast<cd>() * yk - theta[order[k]] * (q.cast<cd>() * yk);
        residual = std::max(residual, r.norm());
        x.col(static_cast<Eigen::Index>(k)) = q.cast<cd>() * yk;
      }
      if (residual <= options.tolerance) {
        sorted.resize(keep);
        return RitzResult{std::move(sorted), std::move(x), it};
      }
    }
    q = Eigen::HouseholderQR<Eigen::MatrixXd>(z).householderQ() * Eigen::MatrixXd::Identity(n, m);
  }
  throw ConvergenceError("leading_eigenpairs: subspace iteration stagnated (Ritz residual " +
                             std::to_string(residual) + ")",
                         residual, options.max_iterations);
}

EigenData subspace_pairs(const TransitionOperator& op, const TemporalPdf& pdf, std::size_t p,
                         const EigenOptions& options) {
  const auto n = static_cast<Eigen::Index>(op.size());
  const auto m = static_cast<Eigen::Index>(std::max<std::size_t>(2 * p, 12));
  const std::size_t want = p - 1;
  const Eigen::Map<const Eigen::VectorXd> pi(pdf.pi.data(), n);

  // A = P~ - 1 pi^T removes the unit mode without touching the others.
  auto right_block = [&](const Eigen::MatrixXd& x) {
    Eigen::MatrixXd out(n, x.cols());
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      op.right_apply(std::span<const double>(x.col(c).data(), static_cast<std::size_t>(n)),
                     std::span<double>(out.col(c).data(), static_cast<std::size_t>(n)));
      out.col(c).array() -= pi.dot(x.col(c));
    }
    return out;
  };
  auto left_block = [&](const Eigen::MatrixXd& x) {
    Eigen::MatrixXd out(n, x.cols());
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      op.left_apply(std::span<const double>(x.col(c).data(), static_cast<std::size_t>(n)),
                    std::span<double>(out.col(c).data(), static_cast<std::size_t>(n)));
      out.col(c) -= x.col(c).sum() * pi;
    }
    return out;
  };

  RitzResult right = subspace_iteration(right_block, n, m, want, options, 0);
  RitzResult left = subspace_iteration(left_block, n, m, right.values.size(), options, 1);

  // Pair each right mode with the nearest unused left Ritz value.
  const std::size_t keep = right.values.size();
  Eigen::MatrixXcd matched(n, static_cast<Eigen::Index>(keep));
  std::vector<bool> used(left.values.size(), false);
  for (std::size_t k = 0; k < keep; ++k) {
    std::size_t best = left.values.size();
    for (std::size_t l = 0; l < left.values.size(); ++l) {
      if (used[l]) continue;
      if (best == left.values.size() ||
          std::abs(left.values[l] - right.values[k]) < std::abs(left.values[best] - right.values[k])) {
        best = l;
      }
    }
    if (best == left.values.size() ||
        std::abs(left.values[best] - right.values[k]) > 1e-6 * std::max(1.0, std::abs(right.values[k]))) {
      throw Error(ErrorCode::consistency,
                  "leading_eigenpairs: left and right Ritz values disagree");
    }
    used[best] = true;
    matched.col(static_cast<Eigen::Index>(k)) = left.vectors.col(static_cast<Eigen::Index>(best));
  }
  return assemble(pdf, right.values, right.vectors, matched,
                  std::max(right.iterations, left.iterations));
}

}  // namespace

Eigen::VectorXcd dense_spectrum(const Eigen::MatrixXd& p) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(p, false);
  const Eigen::VectorXcd values = es.eigenvalues();
  Eigen::VectorXcd sorted(values.size());
  const auto order = order_by_magnitude(values);
  for (std::size_t k = 0; k < order.size(); ++k) sorted[static_cast<Eigen::Index>(k)] = values[order[k]];
  return sorted;
}

EigenData leading_eigenpairs(const TransitionOperator& op, const TemporalPdf& pdf, std::size_t p,
                             const EigenOptions& options) {
  const std::size_t n = op.size();
  if (p < 1 || p > n) {
    throw Error(ErrorCode::dimension, "leading_eigenpairs: p = " + std::to_string(p) +
                                          " outside [1, " + std::to_string(n) + "]");
  }
  if (pdf.pi.size() != n) throw Error(ErrorCode::dimension, "leading_eigenpairs: pi has wrong length");
  if (p == 1) return assemble(pdf, {}, Eigen::MatrixXcd(static_cast<Eigen::Index>(n), 0),
                              Eigen::MatrixXcd(static_cast<Eigen::Index>(n), 0), 0);

  const std::size_t m = std::max<std::size_t>(2 * p, 12);
  EigenMethod method = options.method;
  if (method == EigenMethod::automatic) {
    method = op.dense_matrix() ? EigenMethod::dense : EigenMethod::subspace;
  }
  if (method == EigenMethod::subspace && m + 1 >= n) method = EigenMethod::dense;
  return method == EigenMethod::dense ? dense_pairs(op, pdf, p) : subspace_pairs(op, pdf, p, options);
}

}  // namespace mars::markov
