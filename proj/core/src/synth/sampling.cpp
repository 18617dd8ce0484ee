#include "mars/synth/sampling.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include <boost/random/binomial_distribution.hpp>

#include "mars/error.hpp"

namespace mars::synth {

std::uint32_t draw_count(double mean, double variance, RandomStream& rng) {
  const double x = std::round(mean + std::sqrt(std::max(variance, 0.0)) * rng.normal());
  if (!(x > 0.0)) return 0;
  constexpr double cap = std::numeric_limits<std::uint32_t>::max();
  return static_cast<std::uint32_t>(std::min(x, cap));
}

std::vector<std::uint32_t> sample_counts(const mrp::CountLaw& law, std::size_t n,
                                         std::uint64_t seed) {
  RandomStream rng(seed, StreamPurpose::count, 0);
  std::vector<std::uint32_t> out(n);
  for (auto& c : out) c = draw_count(law.count_mean, law.count_var, rng);
  return out;
}

namespace {

/// 2^(j/64), j = 0..63, for exp_nonpositive.
const std::array<double, 64> kExp2Table = [] {
  std::array<double, 64> t{};
  for (int j = 0; j < 64; ++j) t[static_cast<std::size_t>(j)] = std::exp2(j / 64.0);
  return t;
}();

/// exp(x) for x <= 0 to within a few ulp; exp(x) = 2^(k/64) e^r, |r| <= ln2/128.
inline double exp_nonpositive(double x) {
  if (x < -708.0) return 0.0;
  constexpr double kScale = 64.0 / std::numbers::ln2;
  constexpr double kShift = 0x1.8p52;
  constexpr double kLn2Hi = 0x1.62e42fee00000p-7;   // ln2 / 64, high 32 bits
  constexpr double kLn2Lo = 0x1.a39ef35793c76p-39;  // ln2 / 64, remainder
  const double kd = x * kScale + kShift;
  const auto ki = static_cast<std::int64_t>(std::bit_cast<std::uint64_t>(kd));
  const double k = kd - kShift;
  const double r = (x - k * kLn2Hi) - k * kLn2Lo;
  const double poly =
      1.0 + r * (1.0 + r * (0.5 + r * (1.0 / 6.0 + r * (1.0 / 24.0 + r * (1.0 / 120.0 + r * (1.0 / 720.0))))));
  const std::int64_t idx = ki & 63;
  const std::int64_t exponent = (ki - idx) / 64;
  const double scale = std::bit_cast<double>(std::bit_cast<std::uint64_t>(kExp2Table[static_cast<std::size_t>(idx)]) +
                                             (static_cast<std::uint64_t>(exponent) << 52));
  return scale * poly;
}

/// BTRD (Hormann 1993); kept out of line so the inversion path stays small.
[[gnu::noinline]] std::uint32_t binomial_btrd(std::uint32_t n, double p, RandomStream& rng) {
  boost::random::binomial_distribution<std::int64_t, double> dist(n, p);
  return static_cast<std::uint32_t>(dist(rng));
}

/// Bin(n, p) for p <= 1/2: inversion from P(0) = q^n for n p < 16, BTRD
/// otherwise.
inline std::uint32_t binomial_lower(std::uint32_t n, double p, double log_q, double odds,
                                    RandomStream& rng) {
  if (n * p >= 16.0) [[unlikely]] return binomial_btrd(n, p, rng);
  // P(X = x + 1) = P(X = x) (a / (x + 1) - odds), a = (n + 1) odds. The
  // first four terms are compared without branches since small counts
  // dominate; the loop continues from x = 4 only in the rare tail.
  const double a = (n + 1.0) * odds;
  const double p0 = exp_nonpositive(n * log_q);
  const double p1 = p0 * (a - odds);
  const double p2 = p1 * (a * 0.5 - odds);
  const double p3 = p2 * (a * (1.0 / 3.0) - odds);
  const double c0 = p0;
  const double c1 = c0 + p1;
  const double c2 = c1 + p2;
  const double c3 = c2 + p3;
  // u starts with 32 random bits; 32 more are added only when a threshold
  // falls in the cell [u, u + 2^-32) or the tail is entered, so comparisons
  // are resolved at double precision while costing one lane in the common case.
  for (;;) {
    double u = rng.next_u32() * 0x1p-32;
    const double top = u + 0x1p-32;
    const auto inside = [&](double c) { return (c >= u) & (c < top); };
    const bool refine = inside(c0) | inside(c1) | inside(c2) | inside(c3);
    if (refine) u += rng.next_u32() * 0x1p-64;
    const std::uint32_t head = static_cast<std::uint32_t>(u > c0) + static_cast<std::uint32_t>(u > c1) +
                               static_cast<std::uint32_t>(u > c2) + static_cast<std::uint32_t>(u > c3);
    if (head < 4 || n < 4) return std::min(head, n);
    if (!refine) u += rng.next_u32() * 0x1p-64;
    u -= c3;
    double r = p3;
    for (std::uint32_t x = 4; x <= n; ++x) {
      r *= a / x - odds;
      if (u <= r) return x;
      u -= r;
    }
  }
}

}  // namespace

std::uint32_t draw_binomial(std::uint32_t n, double p, RandomStream& rng) {
  if (n == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  if (p > 0.5) return n - draw_binomial(n, 1.0 - p, rng);
  return binomial_lower(n, p, std::log1p(-p), p / (1.0 - p), rng);
}

MultinomialSampler::MultinomialSampler(std::span<const double> probabilities)
    : probs_(probabilities.begin(), probabilities.end()) {
  const std::size_t n = probs_.size();
  if (n == 0) throw Error(ErrorCode::dimension, "multinomial over zero bins");
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw Error(ErrorCode::normalization, "multinomial probabilities must be nonnegative");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw Error(ErrorCode::normalization,
                "multinomial probabilities sum to " + std::to_string(total));
  }
  for (double& p : probs_) p /= total;

  while (leaves_ < n) leaves_ *= 2;
  std::vector<double> mass(2 * leaves_, 0.0);
  std::copy(probs_.begin(), probs_.end(), mass.begin() + static_cast<std::ptrdiff_t>(leaves_));
  for (std::size_t i = leaves_; i-- > 1;) mass[i] = mass[2 * i] + mass[2 * i + 1];
  nodes_.assign(leaves_, Node{0.0, 0.0, 0.0, false});
  for (std::size_t i = 1; i < leaves_; ++i) {
    if (mass[i] <= 0.0) continue;
    const double left = std::min(1.0, mass[2 * i] / mass[i]);
    Node& node = nodes_[i];
    node.flipped = left > 0.5;
    node.p = node.flipped ? 1.0 - left : left;
    node.log_q = std::log1p(-node.p);
    node.odds = node.p / (1.0 - node.p);
  }
}

void MultinomialSampler::draw(std::uint32_t total, RandomStream& rng,
                              std::span<std::uint32_t> out) const {
  if (out.size() != probs_.size()) throw Error(ErrorCode::dimension, "histogram length mismatch");
  if (leaves_ == 1) {
    out[0] += total;
    return;
  }
  std::vector<std::uint32_t> count(2 * leaves_, 0);
  count[1] = total;
  for (std::size_t i = 1; i < leaves_; ++i) {
    const Node& node = nodes_[i];
    const std::uint32_t n = count[i];
    if (n == 0) continue;
    const std::uint32_t x = binomial_lower(n, node.p, node.log_q, node.odds, rng);
    const std::uint32_t left = node.flipped ? n - x : x;
    count[2 * i] = left;
    count[2 * i + 1] = n - left;
  }
  for (std::size_t j = 0; j < out.size(); ++j) out[j] += count[leaves_ + j];
}

std::vector<std::uint32_t> sample_histogram(std::uint32_t total, const markov::TemporalPdf& pdf,
                                            std::uint64_t seed) {
  const MultinomialSampler sampler(pdf.pi);
  RandomStream rng(seed, StreamPurpose::histogram, 0);
  std::vector<std::uint32_t> out(pdf.pi.size(), 0);
  sampler.draw(total, rng, out);
  return out;
}

markov::TemporalPdf shift_pdf(const markov::TemporalPdf& pdf, std::int64_t delta_bins) {
  const auto n = static_cast<std::int64_t>(pdf.pi.size());
  markov::TemporalPdf out;
  out.pi.resize(pdf.pi.size());
  if (n == 0) return out;
  const std::int64_t k = ((delta_bins % n) + n) % n;
  for (std::int64_t j = 0; j < n; ++j) out.pi[static_cast<std::size_t>((j + k) % n)] = pdf.pi[static_cast<std::size_t>(j)];
  return out;
}

void synthesize_pixel(double count_mean, double count_var, const MultinomialSampler& sampler,
                      std::uint32_t num_realizations, std::uint64_t seed, std::uint64_t stream,
                      std::span<std::uint32_t> totals, std::span<std::uint32_t> counts) {
  const std::size_t n = sampler.size();
  for (std::uint32_t r = 0; r < num_realizations; ++r) {
    RandomStream count_rng(seed, StreamPurpose::count, stream, r);
    RandomStream hist_rng(seed, StreamPurpose::histogram, stream, r);
    const std::uint32_t total = draw_count(count_mean, count_var, count_rng);
    totals[r] = total;
    const auto out = counts.subspan(static_cast<std::size_t>(r) * n, n);
    std::fill(out.begin(), out.end(), 0u);
    sampler.draw(total, hist_rng, out);
  }
}

PixelHistograms simulate_pixel(const mrp::CountLaw& law, const markov::TemporalPdf& pdf,
                               std::uint32_t num_realizations, std::uint64_t seed,
                               std::uint64_t stream) {
  PixelHistograms px;
  px.num_bins = static_cast<std::uint32_t>(pdf.pi.size());
  px.num_realizations = num_realizations;
  px.totals.resize(num_realizations);
  px.counts.resize(static_cast<std::size_t>(num_realizations) * px.num_bins);
  const MultinomialSampler sampler(pdf.pi);
  synthesize_pixel(law.count_mean, law.count_var, sampler, num_realizations, seed, stream,
                   px.totals, px.counts);
  return px;
}

PixelHistograms simulate_pixel(const SystemConfig& cfg, std::uint64_t seed) {
  const mrp::ModelSolution model = mrp::solve_model(cfg);
  return simulate_pixel(model.law, model.pdf, cfg.num_realizations, seed);
}

}  // namespace mars::synth
