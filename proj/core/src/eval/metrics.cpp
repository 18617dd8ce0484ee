#include "mars/eval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mars/error.hpp"
#include "mars/flux.hpp"

namespace mars::eval {

namespace {

constexpr double kFloor = 1e-12;

void require_normalized(const IntegerPmf& p, const char* name) {
  if (p.mass.empty()) throw Error(ErrorCode::normalization, std::string(name) + " pmf is empty");
  for (double m : p.mass) {
    if (!(m >= 0.0)) throw Error(ErrorCode::normalization, std::string(name) + " pmf has negative mass");
  }
  const double total = p.total();
  if (std::abs(total - 1.0) > 1e-9) {
    throw Error(ErrorCode::normalization, std::string(name) + " pmf sums to " + std::to_string(total));
  }
}

template <typename T>
KsResult ks_impl(std::vector<T> a, std::vector<T> b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::insufficient_data, "KS test needs two nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const T x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = na * nb / (na + nb);
  const double root = std::sqrt(ne);
  KsResult out;
  out.statistic = d;
  out.p_value = kolmogorov_survival((root + 0.12 + 0.11 / root) * d);
  return out;
}

}  // namespace

double IntegerPmf::at(std::int64_t k) const noexcept {
  if (k < first || k > last()) return 0.0;
  return mass[static_cast<std::size_t>(k - first)];
}

double IntegerPmf::total() const noexcept {
  double s = 0.0;
  for (double m : mass) s += m;
  return s;
}

double IntegerPmf::mean() const noexcept {
  double s = 0.0;
  for (std::size_t k = 0; k < mass.size(); ++k) s += mass[k] * static_cast<double>(first + static_cast<std::int64_t>(k));
  return s / total();
}

double IntegerPmf::variance() const noexcept {
  const double m = mean();
  double s = 0.0;
  for (std::size_t k = 0; k < mass.size(); ++k) {
    const double d = static_cast<double>(first + static_cast<std::int64_t>(k)) - m;
    s += mass[k] * d * d;
  }
  return s / total();
}

IntegerPmf IntegerPmf::from_samples(std::span<const std::uint32_t> samples) {
  IntegerPmf pmf;
  if (samples.empty()) return pmf;
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  pmf.first = *lo;
  pmf.mass.assign(static_cast<std::size_t>(*hi - *lo) + 1, 0.0);
  const double w = 1.0 / static_cast<double>(samples.size());
  for (std::uint32_t x : samples) pmf.mass[x - *lo] += w;
  return pmf;
}

double wasserstein_1(const IntegerPmf& p, const IntegerPmf& q) {
  require_normalized(p, "first");
  require_normalized(q, "second");
  const std::int64_t lo = std::min(p.first, q.first);
  const std::int64_t hi = std::max(p.last(), q.last());
  double cp = 0.0;
  double cq = 0.0;
  double w = 0.0;
  for (std::int64_t k = lo; k < hi; ++k) {
    cp += p.at(k);
    cq += q.at(k);
    w += std::abs(cp - cq);
  }
  return w;
}

IntegerPmf discretize_gaussian(double mean, double variance, std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw Error(ErrorCode::domain, "empty discretization range");
  IntegerPmf pmf;
  pmf.first = lo;
  pmf.mass.assign(static_cast<std::size_t>(hi - lo) + 1, 0.0);
  if (variance > 0.0) {
    const double sd = std::sqrt(variance);
    for (std::int64_t k = lo; k <= hi; ++k) {
      const double a = (static_cast<double>(k) - 0.5 - mean) / sd;
      const double b = (static_cast<double>(k) + 0.5 - mean) / sd;
      pmf.mass[static_cast<std::size_t>(k - lo)] = normal_cdf_difference(a, b);
    }
  } else {
    const auto k = static_cast<std::int64_t>(std::llround(mean));
    if (k >= lo && k <= hi) pmf.mass[static_cast<std::size_t>(k - lo)] = 1.0;
  }
  for (double& m : pmf.mass) m = std::max(m, kFloor);
  const double total = pmf.total();
  for (double& m : pmf.mass) m /= total;
  return pmf;
}

IntegerPmf discretize_gaussian_over(const IntegerPmf& empirical, double mean, double variance) {
  const double sd = std::sqrt(std::max(variance, 0.0));
  std::int64_t lo = static_cast<std::int64_t>(std::floor(mean - 12.0 * sd));
  std::int64_t hi = static_cast<std::int64_t>(std::ceil(mean + 12.0 * sd));
  if (!empirical.mass.empty()) {
    lo = std::min(lo, empirical.first);
    hi = std::max(hi, empirical.last());
  }
  return discretize_gaussian(mean, variance, lo, hi);
}

double kl_divergence(const IntegerPmf& empirical, double mean, double variance) {
  if (empirical.mass.empty() || !(empirical.total() > 0.0)) {
    throw Error(ErrorCode::insufficient_data, "empirical pmf has empty support");
  }
  const IntegerPmf model = discretize_gaussian_over(empirical, mean, variance);
  const double total = empirical.total();
  double kl = 0.0;
  for (std::size_t k = 0; k < empirical.mass.size(); ++k) {
    const double e = empirical.mass[k] / total;
    if (e <= 0.0) continue;
    kl += e * std::log(e / model.at(empirical.first + static_cast<std::int64_t>(k)));
  }
  return std::max(kl, 0.0);
}

MetricValues compare(std::span<const std::uint32_t> empirical_totals, double model_mean,
                     double model_var) {
  if (empirical_totals.size() < 2) throw Error(ErrorCode::insufficient_data, "need at least two totals");
  const IntegerPmf empirical = IntegerPmf::from_samples(empirical_totals);
  const SampleMoments m = sample_moments(empirical_totals);
  MetricValues v;
  v.wasserstein = wasserstein_1(empirical, discretize_gaussian_over(empirical, model_mean, model_var));
  v.kl = kl_divergence(empirical, model_mean, model_var);
  v.mean_diff = std::abs(m.mean - model_mean);
  v.var_diff = std::abs(m.variance - model_var);
  return v;
}

double kolmogorov_survival(double x) noexcept {
  if (x <= 0.0) return 1.0;
  if (x < 0.2) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += sign * term;
    if (term < 1e-17) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  return ks_impl(std::vector<double>(a.begin(), a.end()), std::vector<double>(b.begin(), b.end()));
}

KsResult ks_two_sample(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
  return ks_impl(std::vector<std::uint32_t>(a.begin(), a.end()),
                 std::vector<std::uint32_t>(b.begin(), b.end()));
}

SampleMoments sample_moments(std::span<const std::uint32_t> samples) {
  if (samples.size() < 2) throw Error(ErrorCode::insufficient_data, "need at least two samples");
  const double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (std::uint32_t x : samples) mean += x;
  mean /= n;
  double ss = 0.0;
  for (std::uint32_t x : samples) ss += (x - mean) * (x - mean);
  return {mean, ss / (n - 1.0)};
}

}  // namespace mars::eval
