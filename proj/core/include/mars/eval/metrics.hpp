#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace mars::eval {

/// Probability mass on the integers first, first + 1, ..., first + size - 1.
struct IntegerPmf {
  std::int64_t first = 0;
  std::vector<double> mass;

  std::int64_t last() const noexcept { return first + static_cast<std::int64_t>(mass.size()) - 1; }
  double at(std::int64_t k) const noexcept;
  double total() const noexcept;
  double mean() const noexcept;
  double variance() const noexcept;

  /// Relative frequencies over [min, max] of the samples.
  static IntegerPmf from_samples(std::span<const std::uint32_t> samples);
};

/// sum_k |P(k) - Q(k)| over the cumulative distributions. Both pmfs must sum
/// to 1 within 1e-9 (normalization error otherwise).
double wasserstein_1(const IntegerPmf& p, const IntegerPmf& q);

/// Normal(mean, variance) integrated over [k - 1/2, k + 1/2] for k in
/// [lo, hi], floored at 1e-12 and renormalized. Zero variance puts all mass
/// on the nearest integer.
IntegerPmf discretize_gaussian(double mean, double variance, std::int64_t lo, std::int64_t hi);

/// Support used to compare an empirical pmf with a Gaussian: the empirical
/// range joined with mean +- 12 standard deviations.
IntegerPmf discretize_gaussian_over(const IntegerPmf& empirical, double mean, double variance);

/// KL(empirical || discretized Gaussian) in nats. Throws insufficient_data
/// for an empty empirical pmf.
double kl_divergence(const IntegerPmf& empirical, double mean, double variance);

/// The four columns of an accuracy table for one (cell, method).
struct MetricValues {
  double wasserstein = 0.0;   ///< counts
  double kl = 0.0;            ///< nats
  double mean_diff = 0.0;     ///< |empirical mean - model mean|
  double var_diff = 0.0;      ///< |empirical variance - model variance|
};

/// Compares empirical totals with a Gaussian count model.
MetricValues compare(std::span<const std::uint32_t> empirical_totals, double model_mean,
                     double model_var);

struct KsResult {
  double statistic = 0.0;   ///< sup |F_a - F_b|
  double p_value = 1.0;     ///< asymptotic, with the Stephens small-sample correction

  bool rejects(double alpha) const noexcept { return p_value < alpha; }
};

/// Kolmogorov survival function Q(x) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2).
double kolmogorov_survival(double x) noexcept;

/// Two-sample Kolmogorov-Smirnov test. Throws insufficient_data for an empty sample.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);
KsResult ks_two_sample(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b);

/// Unbiased sample mean and variance.
struct SampleMoments {
  double mean = 0.0;
  double variance = 0.0;
};
SampleMoments sample_moments(std::span<const std::uint32_t> samples);

}  // namespace mars::eval
