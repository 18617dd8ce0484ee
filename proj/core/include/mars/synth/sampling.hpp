#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "mars/config.hpp"
#include "mars/markov/stationary.hpp"
#include "mars/mrp/count_law.hpp"
#include "mars/random.hpp"

namespace mars::synth {

/// Gaussian draw rounded to the nearest integer and clamped at 0.
std::uint32_t draw_count(double mean, double variance, RandomStream& rng);

/// n i.i.d. clamped, rounded Gaussian counts from the law.
std::vector<std::uint32_t> sample_counts(const mrp::CountLaw& law, std::size_t n,
                                         std::uint64_t seed);

/// Binomial(n, p): inversion for n p < 16, transformed rejection beyond.
std::uint32_t draw_binomial(std::uint32_t n, double p, RandomStream& rng);

/// Multinomial sampler over a fixed probability vector.
///
/// Splits the total down a complete binary tree over the bins with one
/// binomial per internal node, X_left ~ Bin(n_node, mass_left / mass_node),
/// so one histogram costs O(n_b) whatever the total. Nodes of one level are
/// independent, which keeps the dependency chain log2(n_b) long. Conditional
/// probabilities and their logarithms are computed once at construction.
class MultinomialSampler {
 public:
  explicit MultinomialSampler(std::span<const double> probabilities);

  std::size_t size() const noexcept { return probs_.size(); }

  /// Adds a Multinomial(total, pi) draw to `out` (which must be zeroed by the caller).
  void draw(std::uint32_t total, RandomStream& rng, std::span<std::uint32_t> out) const;

  const std::vector<double>& probabilities() const noexcept { return probs_; }

 private:
  struct Node {
    double p;          ///< min(p, 1 - p) of the left-branch probability
    double log_q;      ///< log(1 - p)
    double odds;       ///< p / (1 - p)
    bool flipped;      ///< p is the right-branch probability
  };

  std::vector<double> probs_;
  std::size_t leaves_ = 1;         ///< power of two >= size(); leaf j is node leaves_ + j
  std::vector<Node> nodes_;        ///< heap order, internal nodes 1 .. leaves_ - 1
};

/// One Multinomial(total, pi) draw.
std::vector<std::uint32_t> sample_histogram(std::uint32_t total, const markov::TemporalPdf& pdf,
                                            std::uint64_t seed);

/// Circular shift: out[j] = pi[(j - delta) mod n_b].
markov::TemporalPdf shift_pdf(const markov::TemporalPdf& pdf, std::int64_t delta_bins);

/// N_iter histograms of one pixel, stored realization-major.
struct PixelHistograms {
  std::uint32_t num_bins = 0;
  std::uint32_t num_realizations = 0;
  std::vector<std::uint32_t> totals;   ///< drawn count per realization
  std::vector<std::uint32_t> counts;   ///< num_realizations x num_bins

  std::span<const std::uint32_t> histogram(std::size_t r) const {
    return {counts.data() + r * num_bins, num_bins};
  }
};

/// Draws N_iter (count, multinomial) realizations from a known law and pdf.
/// Realization r of pixel `stream` uses Philox streams keyed by
/// (seed, stream, r), so results do not depend on evaluation order.
void synthesize_pixel(double count_mean, double count_var, const MultinomialSampler& sampler,
                      std::uint32_t num_realizations, std::uint64_t seed, std::uint64_t stream,
                      std::span<std::uint32_t> totals, std::span<std::uint32_t> counts);

PixelHistograms simulate_pixel(const mrp::CountLaw& law, const markov::TemporalPdf& pdf,
                               std::uint32_t num_realizations, std::uint64_t seed,
                               std::uint64_t stream = 0);

/// Solves the count law for cfg, then draws cfg.num_realizations histograms.
PixelHistograms simulate_pixel(const SystemConfig& cfg, std::uint64_t seed);

}  // namespace mars::synth
