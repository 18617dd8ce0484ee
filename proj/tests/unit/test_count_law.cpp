#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "mars/markov/eigenpairs.hpp"
#include "mars/mrp/count_law.hpp"
#include "mars/oracle/sequential.hpp"
#include "support.hpp"

namespace mars::mrp {
namespace {

SystemConfig regime(std::uint32_t n_b, double s = 8.2, double b = 1.2, double td = 75e-9) {
  SystemConfig cfg;
  cfg.signal = s;
  cfg.background = b;
  cfg.dead_time = td;
  cfg.num_bins = n_b;
  cfg.num_pulses = 1000;
  return cfg;
}

/// Dense-matrix moments: mu = pi Q 1, sigma_ss^2 = pi Q2 1 + c - mu^2 and
/// gamma_l = pi Q_c P^{l-1} Q_c 1 with Q_c = Q - mu P.
struct DenseMoments {
  double mu = 0.0;
  double sigma_ss2 = 0.0;
  std::vector<double> gamma;
};

DenseMoments dense_moments(const SystemConfig& cfg, std::size_t lags) {
  const auto op = markov::build_transition(cfg);
  const auto pdf = markov::stationary_pdf(op);
  const MomentKernels kernels(op);
  const Eigen::MatrixXd p = op.to_dense();
  const Eigen::Map<const Eigen::RowVectorXd> pi(pdf.pi.data(), static_cast<Eigen::Index>(pdf.pi.size()));
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(p.rows());
  DenseMoments out;
  out.mu = pi * kernels.dense_mu() * ones;
  out.sigma_ss2 = pi * kernels.dense_mu2() * ones;
  out.sigma_ss2 += kernels.sigma2_const() - out.mu * out.mu;
  const Eigen::MatrixXd qc = kernels.dense_mu() - out.mu * p;
  Eigen::RowVectorXd left = pi * qc;
  const Eigen::VectorXd right = qc * ones;
  for (std::size_t l = 1; l <= lags; ++l) {
    out.gamma.push_back(left * right);
    left = left * p;
  }
  return out;
}

TEST(CountLaw, MomentsMatchDenseOracle) {
  for (int c = 0; c < 10; ++c) {
    test::Gen gen(500 + c);
    const SystemConfig cfg = gen.config(24, 96);
    const DenseMoments ref = dense_moments(cfg, 12);
    const auto op = markov::build_transition(cfg);
    const auto pdf = markov::stationary_pdf(op);
    const MomentKernels kernels(op);
    const double mu = effective_mean(pdf, kernels);
    const double t2 = cfg.rep_period * cfg.rep_period;
    EXPECT_NEAR(mu, ref.mu, 1e-10 * ref.mu);
    EXPECT_NEAR(steady_state_variance(pdf, kernels, mu), ref.sigma_ss2, 1e-9 * ref.sigma_ss2 + 1e-14 * t2);
    const auto gamma = lag_covariances(pdf, kernels, 12, mu);
    for (std::size_t l = 0; l < gamma.size(); ++l) {
      EXPECT_NEAR(gamma[l], ref.gamma[l], 1e-9 * std::abs(ref.gamma[0]) + 1e-14 * t2) << "lag " << l + 1;
    }
    EXPECT_DOUBLE_EQ(lag_covariance(pdf, kernels, 3, mu), gamma[2]);
  }
}

TEST(CountLaw, PoissonLimitWithoutDeadTime) {
  for (double lam : {0.5, 2.0, 10.0}) {
    SystemConfig cfg = regime(4096, 0.0, lam, 0.0);
    const CountLaw law = count_law(cfg);
    const double expect = lam * static_cast<double>(cfg.num_pulses);
    EXPECT_NEAR(law.count_mean, expect, 0.005 * expect) << lam;
    EXPECT_NEAR(law.count_var, expect, 0.005 * expect) << lam;
  }
}

TEST(CountLaw, PulsedPoissonBiasIsFirstOrderInBinWidth) {
  auto mean_error = [](std::uint32_t n_b) {
    SystemConfig cfg = regime(n_b, 7.0, 3.0, 0.0);
    return count_law(cfg).count_mean / 10000.0 - 1.0;
  };
  const double coarse = mean_error(512);
  const double fine = mean_error(2048);
  EXPECT_GT(coarse, 0.0);
  EXPECT_NEAR(coarse / fine, 4.0, 0.6);
}

TEST(CountLaw, RenewalLimitUnderConstantFlux) {
  for (double lt : {0.1, 0.75, 2.0}) {
    SystemConfig cfg = regime(1024, 0.0, 2.0, 0.0);
    const double lambda0 = cfg.background / cfg.rep_period;
    cfg.dead_time = lt / lambda0;
    const CountLaw law = count_law(cfg);
    const double t = cfg.exposure();
    const double mean = lambda0 * t / (1.0 + lt);
    const double var = lambda0 * t / std::pow(1.0 + lt, 3);
    EXPECT_NEAR(law.count_mean, mean, 0.01 * mean) << lt;
    EXPECT_NEAR(law.count_var, var, 0.05 * var) << lt;
  }
}

TEST(CountLaw, GammaDecaysToZero) {
  const SystemConfig cfg = regime(256);
  const auto op = markov::build_transition(cfg);
  const auto pdf = markov::stationary_pdf(op);
  const MomentKernels kernels(op);
  const double mu = effective_mean(pdf, kernels);
  const auto gamma = lag_covariances(pdf, kernels, 200, mu);
  EXPECT_LE(std::abs(gamma.back()), 1e-12 * cfg.rep_period * cfg.rep_period);
}

TEST(CountLaw, SpectralTailReplacesLongSum) {
  for (double b : {0.2, 1.2}) {
    for (double td : {25e-9, 75e-9}) {
      const SystemConfig cfg = regime(256, 8.2, b, td);
      const auto op = markov::build_transition(cfg);
      const auto pdf = markov::stationary_pdf(op);
      const MomentKernels kernels(op);
      const double mu = effective_mean(pdf, kernels);
      const auto eig = markov::leading_eigenpairs(op, pdf, 5);
      const auto gamma200 = lag_covariances(pdf, kernels, 200, mu);
      const double full = std::accumulate(gamma200.begin(), gamma200.end(), 0.0);
      const auto gamma6 = lag_covariances(pdf, kernels, 6, mu);
      const double hat = std::accumulate(gamma6.begin(), gamma6.end(), 0.0) +
                         spectral_tail(eig, pdf, kernels, mu, 6);
      EXPECT_LE(std::abs(hat - full), 1e-3 * std::abs(full) + 1e-12 * cfg.rep_period * cfg.rep_period);
    }
  }
}

TEST(CountLaw, VarianceBreakdownAddsUp) {
  const SystemConfig cfg = regime(128);
  const CountLaw law = count_law(cfg);
  const auto& d = law.diagnostics;
  EXPECT_EQ(d.gamma.size(), 6u);
  const double gamma_ss = std::accumulate(d.gamma.begin(), d.gamma.end(), 0.0) + d.tail;
  EXPECT_NEAR(d.gamma_ss, gamma_ss, 1e-15 * std::abs(gamma_ss) + 1e-40);
  EXPECT_NEAR(law.sigma2, d.sigma_ss2 + 2.0 * gamma_ss, 1e-12 * law.sigma2);
  EXPECT_NEAR(law.count_mean, law.exposure / law.mu, 1e-9);
  EXPECT_NEAR(law.count_var, law.exposure * law.sigma2 / std::pow(law.mu, 3), 1e-9);
  EXPECT_LT(d.second_eigenvalue_magnitude, 1.0);
  EXPECT_FALSE(d.pulse_clipped);
}

TEST(CountLaw, DiagnosticsJson) {
  const CountLaw law = count_law(regime(64));
  std::stringstream out;
  write_diagnostics_json(law, out);
  const auto doc = nlohmann::json::parse(out.str());
  EXPECT_DOUBLE_EQ(doc.at("mu").get<double>(), law.mu);
  EXPECT_EQ(doc.at("gamma").size(), 6u);
  EXPECT_TRUE(doc.at("eigenvalues").at(0).is_array());
}

// Monte Carlo cross-check against the per-photon simulator at modest size.
TEST(CountLaw, AgreesWithSequentialOracle) {
  SystemConfig cfg = regime(256);
  cfg.num_realizations = 3000;
  const CountLaw law = count_law(cfg);
  const auto sim = oracle::sequential_simulate(cfg, 77);
  double mean = 0.0;
  for (auto t : sim.totals) mean += t;
  mean /= sim.totals.size();
  double var = 0.0;
  for (auto t : sim.totals) var += (t - mean) * (t - mean);
  var /= sim.totals.size() - 1;
  EXPECT_NEAR(law.count_mean, mean, 0.01 * mean);
  EXPECT_NEAR(law.count_var / var, 1.0, 0.1);
}

}  // namespace
}  // namespace mars::mrp
