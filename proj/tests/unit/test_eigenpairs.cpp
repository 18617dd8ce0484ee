#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "mars/error.hpp"
#include "mars/markov/eigenpairs.hpp"
#include "mars/markov/stationary.hpp"
#include "mars/markov/transition.hpp"

namespace mars::markov {
namespace {

SystemConfig regime(std::uint32_t n_b, double s = 8.2, double b = 1.2, double td = 75e-9) {
  SystemConfig cfg;
  cfg.signal = s;
  cfg.background = b;
  cfg.dead_time = td;
  cfg.num_bins = n_b;
  return cfg;
}

void expect_valid_pairs(const TransitionOperator& op, const EigenData& eig) {
  const Eigen::MatrixXd p = op.to_dense();
  const auto k = eig.eigenvalues.size();
  // Right: P v = lambda v, left: u^T P = lambda u^T.
  for (Eigen::Index i = 0; i < k; ++i) {
    const Eigen::VectorXcd v = eig.right_vectors.col(i);
    const Eigen::VectorXcd u = eig.left_vectors.col(i);
    EXPECT_LE((p.cast<std::complex<double>>() * v - eig.eigenvalues[i] * v).norm(), 1e-8 * v.norm()) << i;
    EXPECT_LE((p.transpose().cast<std::complex<double>>() * u - eig.eigenvalues[i] * u).norm(), 1e-8 * u.norm())
        << i;
  }
  const Eigen::MatrixXcd g = eig.left_vectors.transpose() * eig.right_vectors;
  EXPECT_LE((g - Eigen::MatrixXcd::Identity(k, k)).norm(), 1e-9);
  EXPECT_EQ(eig.eigenvalues[0], std::complex<double>(1.0, 0.0));
  // Pairs come out as exact mirrors, real modes with real vectors.
  for (Eigen::Index i = 1; i < k; ++i) {
    const auto z = eig.eigenvalues[i];
    if (z.imag() > 0.0) {
      ASSERT_LT(i + 1, k);
      EXPECT_EQ(eig.eigenvalues[i + 1], std::conj(z));
      EXPECT_EQ(eig.right_vectors.col(i + 1), eig.right_vectors.col(i).conjugate());
    } else if (z.imag() == 0.0) {
      EXPECT_EQ(eig.right_vectors.col(i).imag().norm(), 0.0);
    }
  }
}

TEST(Eigenpairs, SubspaceMatchesDenseSpectrum) {
  for (double b : {0.2, 1.2}) {
    for (double td : {25e-9, 75e-9}) {
      const SystemConfig cfg = regime(128, 8.2, b, td);
      const TransitionOperator op = build_transition(cfg);
      const TemporalPdf pdf = stationary_pdf(op);
      const EigenData eig = leading_eigenpairs(op, pdf, 5, {.method = EigenMethod::subspace});
      const Eigen::VectorXcd spectrum = dense_spectrum(op.to_dense());
      ASSERT_GE(eig.eigenvalues.size(), 5);
      for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i) {
        EXPECT_NEAR(std::abs(eig.eigenvalues[i]), std::abs(spectrum[i]), 1e-9) << i;
        const double nearest = (spectrum.array() - eig.eigenvalues[i]).abs().minCoeff();
        EXPECT_LT(nearest, 1e-8) << i;
      }
      expect_valid_pairs(op, eig);
    }
  }
}

TEST(Eigenpairs, DenseMethodValid) {
  const SystemConfig cfg = regime(96);
  const TransitionOperator op = build_transition(cfg);
  const TemporalPdf pdf = stationary_pdf(op);
  expect_valid_pairs(op, leading_eigenpairs(op, pdf, 5, {.method = EigenMethod::dense}));
}

TEST(Eigenpairs, ImplicitOperatorUsesSubspace) {
  const SystemConfig cfg = regime(1024);
  const TransitionOperator op = build_transition(cfg);
  ASSERT_EQ(op.representation(), Representation::implicit);
  const EigenData eig = leading_eigenpairs(op, stationary_pdf(op), 5);
  EXPECT_GT(eig.iterations, 0u);
  EXPECT_GE(eig.eigenvalues.size(), 5);
  EXPECT_LE(eig.eigenvalues.size(), 6);
}

TEST(Eigenpairs, NeverSplitsConjugatePair) {
  const SystemConfig cfg = regime(128, 8.2, 1.2, 75e-9);
  const TransitionOperator op = build_transition(cfg);
  const TemporalPdf pdf = stationary_pdf(op);
  for (std::size_t p = 2; p <= 8; ++p) {
    const EigenData eig = leading_eigenpairs(op, pdf, p);
    const auto k = eig.eigenvalues.size();
    EXPECT_TRUE(k == static_cast<Eigen::Index>(p) || k == static_cast<Eigen::Index>(p) + 1);
    if (eig.eigenvalues[k - 1].imag() > 0.0) ADD_FAILURE() << "pair split at p = " << p;
  }
}

TEST(Eigenpairs, ModesBeyondFifthAreSmallAtReferenceRegime) {
  const SystemConfig cfg = regime(256);
  const Eigen::VectorXcd spectrum = dense_spectrum(build_transition(cfg).to_dense());
  for (Eigen::Index i = 5; i < spectrum.size(); ++i) EXPECT_LE(std::abs(spectrum[i]), 0.7) << i;
  EXPECT_NEAR(std::abs(spectrum[0]), 1.0, 1e-12);
}

TEST(Eigenpairs, RejectsBadCount) {
  const SystemConfig cfg = regime(32);
  const TransitionOperator op = build_transition(cfg);
  const TemporalPdf pdf = stationary_pdf(op);
  EXPECT_THROW(leading_eigenpairs(op, pdf, 0), Error);
  EXPECT_THROW(leading_eigenpairs(op, pdf, 33), Error);
  EXPECT_EQ(leading_eigenpairs(op, pdf, 1).eigenvalues.size(), 1);
}

}  // namespace
}  // namespace mars::markov
