#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <vector>

#include "mars/config.hpp"
#include "mars/markov/eigenpairs.hpp"
#include "mars/markov/stationary.hpp"
#include "mars/markov/transition.hpp"
#include "mars/mrp/kernels.hpp"

namespace mars::mrp {

struct CountLawDiagnostics {
  double sigma_ss2 = 0.0;                     ///< seconds^2
  double gamma_ss = 0.0;                      ///< sum of gamma_1..gamma_L plus tail
  std::vector<double> gamma;                  ///< gamma_1..gamma_L
  double tail = 0.0;                          ///< spectral tail beyond lag L
  std::vector<std::complex<double>> eigenvalues;
  double second_eigenvalue_magnitude = 0.0;   ///< |lambda_2|, the mixing rate
  bool pulse_clipped = false;
};

/// Gaussian count law N(t) ~ Normal(t / mu, t sigma2 / mu^3), t = N_r t_r.
struct CountLaw {
  double mu = 0.0;          ///< effective mean holding time, seconds
  double sigma2 = 0.0;      ///< effective holding variance, seconds^2
  double exposure = 0.0;    ///< seconds
  double count_mean = 0.0;
  double count_var = 0.0;
  CountLawDiagnostics diagnostics;
};

struct CountLawOptions {
  std::size_t lags = 6;     ///< L, explicit lag covariances
  std::size_t modes = 5;    ///< p, eigenpairs retained in the tail
  markov::TransitionOptions transition;
  markov::StationaryOptions stationary;
  markov::EigenOptions eigen;
};

/// mu = pi Q_mu 1.
double effective_mean(const markov::TemporalPdf& pdf, const MomentKernels& kernels);

/// pi (Q_mu2 + Q_sigma2) 1 - mu^2, evaluated as pi (P~ (.) (M - mu)^2) 1 + sigma2_const.
double steady_state_variance(const markov::TemporalPdf& pdf, const MomentKernels& kernels,
                             double mu);

/// a = pi Q_c and b = Q_c 1 for the centered kernel Q_c = P~ (.) (M - mu).
/// Every lag covariance and tail term is a bilinear form in (a, b).
struct CenteredProjections {
  std::vector<double> a;
  std::vector<double> b;
  double rep_period = 1.0;  ///< t_r, the scale of absolute tolerances
};

CenteredProjections centered_projections(const markov::TemporalPdf& pdf,
                                         const MomentKernels& kernels, double mu);

/// gamma_1..gamma_L from precomputed projections.
std::vector<double> lag_covariances(const markov::TransitionOperator& op,
                                    const CenteredProjections& proj, std::size_t max_lag);

/// Spectral tail from precomputed projections.
double spectral_tail(const markov::EigenData& eig, const CenteredProjections& proj,
                     std::size_t lags);

/// gamma_l = pi Q_mu P~^{l-1} Q_mu 1 - mu^2 for l >= 1.
double lag_covariance(const markov::TemporalPdf& pdf, const MomentKernels& kernels, std::size_t l,
                      double mu);

/// gamma_1..gamma_L with one left apply per lag.
std::vector<double> lag_covariances(const markov::TemporalPdf& pdf, const MomentKernels& kernels,
                                    std::size_t max_lag, double mu);

/// sum_{i=2..p} alpha_i beta_i lambda_i^L / (1 - lambda_i) with
/// alpha = pi Q_mu V_p and beta = U_p^T Q_mu 1. Throws conjugate_pairing when
/// the imaginary parts fail to cancel.
double spectral_tail(const markov::EigenData& eig, const markov::TemporalPdf& pdf,
                     const MomentKernels& kernels, double mu, std::size_t lags);

struct VarianceBreakdown {
  double sigma2 = 0.0;
  double sigma_ss2 = 0.0;
  std::vector<double> gamma;
  double tail = 0.0;
};

/// sigma2 = sigma_ss2 + 2 (sum_{l <= L} gamma_l + tail).
VarianceBreakdown effective_variance(const markov::TemporalPdf& pdf, const MomentKernels& kernels,
                                     const markov::EigenData& eig, double mu, std::size_t lags);

/// Operator, stationary pdf and count law of one configuration.
struct ModelSolution {
  markov::TransitionOperator op;
  markov::TemporalPdf pdf;
  CountLaw law;
};

ModelSolution solve_model(const SystemConfig& cfg, const CountLawOptions& options = {});

CountLaw count_law(const SystemConfig& cfg, const CountLawOptions& options = {});

/// {mu, sigma2, sigma_ss2, gamma: [...], tail, eigenvalues: [[re, im], ...]}.
void write_diagnostics_json(const CountLaw& law, std::ostream& out);

}  // namespace mars::mrp
