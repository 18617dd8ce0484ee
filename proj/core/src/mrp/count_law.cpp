#include "mars/mrp/count_law.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <string>

#include <json.hpp>

#include "mars/error.hpp"

namespace mars::mrp {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

void check_pdf(const markov::TemporalPdf& pdf, const MomentKernels& kernels) {
  if (pdf.pi.size() != kernels.op().size()) {
    throw Error(ErrorCode::dimension, "pi length does not match the operator");
  }
}

std::string fmt_g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

}  // namespace

double effective_mean(const markov::TemporalPdf& pdf, const MomentKernels& kernels) {
  check_pdf(pdf, kernels);
  return dot(pdf.pi, kernels.row_sums(1));
}

double steady_state_variance(const markov::TemporalPdf& pdf, const MomentKernels& kernels,
                             double mu) {
  check_pdf(pdf, kernels);
  const double value = dot(pdf.pi, kernels.row_sums(2, mu)) + kernels.sigma2_const();
  const double t_r = kernels.op().config().rep_period;
  if (value < -1e-12 * t_r * t_r) {
    throw Error(ErrorCode::consistency,
                "steady-state variance is negative: " + std::to_string(value));
  }
  return std::max(value, 0.0);
}

CenteredProjections centered_projections(const markov::TemporalPdf& pdf,
                                         const MomentKernels& kernels, double mu) {
  check_pdf(pdf, kernels);
  // pi Q_c = pi Q_mu - mu pi and Q_c 1 = Q_mu 1 - mu 1, so
  // pi Q_c P^{l-1} Q_c 1 equals gamma_l exactly.
  CenteredProjections proj;
  proj.b = kernels.row_sums(1, mu);
  proj.a.resize(pdf.pi.size());
  proj.rep_period = kernels.op().config().rep_period;
  kernels.left_apply(1, mu, pdf.pi, proj.a);
  return proj;
}

std::vector<double> lag_covariances(const markov::TransitionOperator& op,
                                    const CenteredProjections& proj, std::size_t max_lag) {
  std::vector<double> a = proj.a;
  std::vector<double> next(a.size());
  std::vector<double> gamma;
  gamma.reserve(max_lag);
  for (std::size_t l = 1; l <= max_lag; ++l) {
    if (l > 1) {
      op.left_apply(a, next);
      a.swap(next);
    }
    gamma.push_back(dot(a, proj.b));
  }
  return gamma;
}

std::vector<double> lag_covariances(const markov::TemporalPdf& pdf, const MomentKernels& kernels,
                                    std::size_t max_lag, double mu) {
  return lag_covariances(kernels.op(), centered_projections(pdf, kernels, mu), max_lag);
}

double lag_covariance(const markov::TemporalPdf& pdf, const MomentKernels& kernels, std::size_t l,
                      double mu) {
  if (l < 1) throw Error(ErrorCode::domain, "lag must be at least 1");
  return lag_covariances(pdf, kernels, l, mu).back();
}

double spectral_tail(const markov::EigenData& eig, const CenteredProjections& proj,
                     std::size_t lags) {
  if (lags < 1) throw Error(ErrorCode::domain, "spectral_tail needs L >= 1");
  if (eig.p <= 1) return 0.0;
  const auto n = static_cast<Eigen::Index>(proj.a.size());
  if (eig.right_vectors.rows() != n || eig.left_vectors.rows() != n) {
    throw Error(ErrorCode::dimension, "eigenvectors do not match the operator size");
  }
  const Eigen::VectorXcd av =
      Eigen::Map<const Eigen::VectorXd>(proj.a.data(), n).cast<std::complex<double>>();
  const Eigen::VectorXcd bv =
      Eigen::Map<const Eigen::VectorXd>(proj.b.data(), n).cast<std::complex<double>>();

  std::complex<double> tail = 0.0;
  for (Eigen::Index i = 1; i < eig.eigenvalues.size(); ++i) {
    const std::complex<double> lambda = eig.eigenvalues[i];
    const std::complex<double> alpha = (av.transpose() * eig.right_vectors.col(i))(0);
    const std::complex<double> beta = (eig.left_vectors.col(i).transpose() * bv)(0);
    const std::complex<double> term =
        alpha * beta * std::pow(lambda, static_cast<double>(lags)) / (1.0 - lambda);
    tail += term;
  }
  // Absolute part in units of t_r^2, like every other absolute tolerance here.
  const double t_r2 = proj.rep_period * proj.rep_period;
  const double bound = 1e-9 * std::abs(tail.real()) + 1e-15 * t_r2;
  if (std::abs(tail.imag()) > bound) {
    throw Error(ErrorCode::conjugate_pairing,
                "spectral tail has imaginary residual " + fmt_g(tail.imag()) + " against real part " + fmt_g(tail.real()));
  }
  return tail.real();
}

double spectral_tail(const markov::EigenData& eig, const markov::TemporalPdf& pdf,
                     const MomentKernels& kernels, double mu, std::size_t lags) {
  return spectral_tail(eig, centered_projections(pdf, kernels, mu), lags);
}

VarianceBreakdown effective_variance(const markov::TemporalPdf& pdf, const MomentKernels& kernels,
                                     const markov::EigenData& eig, double mu, std::size_t lags) {
  VarianceBreakdown v;
  v.sigma_ss2 = steady_state_variance(pdf, kernels, mu);
  const CenteredProjections proj = centered_projections(pdf, kernels, mu);
  v.gamma = lag_covariances(kernels.op(), proj, lags);
  v.tail = spectral_tail(eig, proj, lags);
  const double gamma_ss = std::accumulate(v.gamma.begin(), v.gamma.end(), 0.0) + v.tail;
  v.sigma2 = v.sigma_ss2 + 2.0 * gamma_ss;
  if (!(v.sigma2 > 0.0)) {
    throw Error(ErrorCode::consistency,
                "effective variance is not positive: " + std::to_string(v.sigma2));
  }
  return v;
}

ModelSolution solve_model(const SystemConfig& cfg, const CountLawOptions& options) {
  auto op = markov::build_transition(cfg, options.transition);
  auto pdf = markov::stationary_pdf(op, options.stationary);
  const MomentKernels kernels(op);
  const double mu = effective_mean(pdf, kernels);

  const std::size_t modes = std::min<std::size_t>(options.modes, op.size());
  const markov::EigenData eig = markov::leading_eigenpairs(op, pdf, std::max<std::size_t>(modes, 1),
                                                           options.eigen);
  const VarianceBreakdown var = effective_variance(pdf, kernels, eig, mu, options.lags);

  CountLaw law;
  law.mu = mu;
  law.sigma2 = var.sigma2;
  law.exposure = cfg.exposure();
  law.count_mean = law.exposure / mu;
  law.count_var = law.exposure * var.sigma2 / (mu * mu * mu);
  auto& diag = law.diagnostics;
  diag.sigma_ss2 = var.sigma_ss2;
  diag.gamma = var.gamma;
  diag.tail = var.tail;
  diag.gamma_ss = std::accumulate(var.gamma.begin(), var.gamma.end(), 0.0) + var.tail;
  for (Eigen::Index k = 0; k < eig.eigenvalues.size(); ++k) {
    diag.eigenvalues.push_back(eig.eigenvalues[k]);
  }
  diag.second_eigenvalue_magnitude = eig.eigenvalues.size() > 1 ? std::abs(eig.eigenvalues[1]) : 0.0;
  diag.pulse_clipped = cfg.pulse_clipped();
  return ModelSolution{std::move(op), std::move(pdf), std::move(law)};
}

CountLaw count_law(const SystemConfig& cfg, const CountLawOptions& options) {
  return solve_model(cfg, options).law;
}

void write_diagnostics_json(const CountLaw& law, std::ostream& out) {
  nlohmann::json eigen = nlohmann::json::array();
  for (const auto& z : law.diagnostics.eigenvalues) eigen.push_back({z.real(), z.imag()});
  const nlohmann::json doc = {
      {"mu", law.mu},
      {"sigma2", law.sigma2},
      {"sigma_ss2", law.diagnostics.sigma_ss2},
      {"gamma", law.diagnostics.gamma},
      {"tail", law.diagnostics.tail},
      {"eigenvalues", eigen},
  };
  out << doc.dump(2) << '\n';
}

}  // namespace mars::mrp
