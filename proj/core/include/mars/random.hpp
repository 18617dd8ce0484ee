#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>

namespace mars {

/// Philox4x32-10 counter-based bijection (Salmon et al., SC'11).
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter apply(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }

  /// N blocks computed together; their rounds are independent, so they
  /// overlap in the pipeline.
  template <std::size_t N>
  static constexpr std::array<Counter, N> apply_many(std::array<Counter, N> ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      for (std::size_t i = 0; i < N; ++i) {
        Counter& c = ctr[i];
        const std::uint64_t p0 = std::uint64_t{kMul0} * c[0];
        const std::uint64_t p1 = std::uint64_t{kMul1} * c[2];
        c = {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ key[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ key[1], static_cast<std::uint32_t>(p0)};
      }
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// What a stream is used for; keeps e.g. count draws and multinomial draws
/// of the same (pixel, realization) independent.
enum class StreamPurpose : std::uint16_t {
  count = 1,
  histogram = 2,
  arrivals = 3,
  poisson = 4,
  solver = 5,
  test = 0xFFFF,
};

/// Independent random stream keyed by (seed, purpose, stream, substream).
///
/// The key is the user seed; the counter holds (block, substream, stream,
/// purpose), so any two distinct tuples never share a Philox block. Draws are
/// therefore independent of the order in which streams are consumed, which
/// is what makes cube synthesis thread-count invariant.
///
/// Satisfies UniformRandomBitGenerator.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t stream,
               std::uint32_t substream = 0) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        ctr_{0u, substream, static_cast<std::uint32_t>(stream),
             static_cast<std::uint32_t>((stream >> 32) & 0xFFFFu) |
                 (std::uint32_t{static_cast<std::uint16_t>(purpose)} << 16)} {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    if (lane_ >= kLanes - 1) refill();
    const std::uint64_t lo = lanes_[lane_++];
    const std::uint64_t hi = lanes_[lane_++];
    return (hi << 32) | lo;
  }

  /// One 32-bit lane; four per Philox block.
  std::uint32_t next_u32() noexcept {
    if (lane_ >= kLanes) refill();
    return lanes_[lane_++];
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1]; safe to take the log of.
  double uniform_positive() noexcept {
    return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53;
  }

  double exponential() noexcept { return -std::log(uniform_positive()); }

  /// Standard normal via Box-Muller; the second variate is cached.
  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double radius = std::sqrt(-2.0 * std::log(uniform_positive()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  static constexpr unsigned kBlocks = 4;
  static constexpr unsigned kLanes = 4 * kBlocks;

  /// Several consecutive blocks per refill; lanes are consumed in counter order.
  void refill() noexcept {
    std::array<Philox4x32::Counter, kBlocks> ctr;
    for (unsigned b = 0; b < kBlocks; ++b) {
      ctr[b] = ctr_;
      ctr[b][0] += b;
    }
    ctr = Philox4x32::apply_many(ctr, key_);
    for (unsigned b = 0; b < kBlocks; ++b) {
      for (unsigned i = 0; i < 4; ++i) lanes_[4 * b + i] = ctr[b][i];
    }
    ctr_[0] += kBlocks;
    lane_ = 0;
  }

  Philox4x32::Key key_;
  Philox4x32::Counter ctr_;
  std::array<std::uint32_t, kLanes> lanes_{};
  unsigned lane_ = kLanes;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mars
