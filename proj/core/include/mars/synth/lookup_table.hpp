#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "mars/config.hpp"
#include "mars/markov/stationary.hpp"
#include "mars/mrp/count_law.hpp"

namespace mars::synth {

/// Configuration fields a table depends on. The flux levels are the table
/// axes and the delay is fixed at t_r / 2; N_r only scales the count law and
/// is applied at lookup time.
struct LutFingerprint {
  double rep_period = 0.0;
  double pulse_width = 0.0;
  double dead_time = 0.0;
  std::uint32_t num_bins = 0;

  static LutFingerprint of(const SystemConfig& cfg) noexcept;

  /// Times agree to 1e-12 relative (so "75 ns" and "7.5e-8 s" match) and
  /// n_b is equal.
  bool matches(const LutFingerprint& other) const noexcept;
};

/// Stationary pdf at the canonical delay t_r / 2 and the per-registration
/// moments of one (S, B) grid point.
struct LutEntry {
  std::vector<double> pi;
  double mu = 0.0;       ///< seconds
  double sigma2 = 0.0;   ///< seconds^2
};

struct LookupTable {
  LutFingerprint fingerprint;
  std::vector<double> s_axis;   ///< strictly increasing, positive
  std::vector<double> b_axis;   ///< strictly increasing, positive
  std::vector<LutEntry> entries;  ///< S-major: entries[i * |B| + j]

  const LutEntry& at(std::size_t i, std::size_t j) const { return entries[i * b_axis.size() + j]; }
};

enum class LookupMode { nearest, bilinear };

/// n points from lo to hi with constant ratio; n = 1 gives {lo}.
std::vector<double> geometric_axis(double lo, double hi, std::size_t n);

struct LutBuildOptions {
  unsigned threads = 0;          ///< 0: all hardware threads
  mrp::CountLawOptions law;
};

/// Solves the model at every (S, B) with tau = t_r / 2 and the other fields
/// of `base`. Entries are independent and computed in parallel; the first
/// failure is rethrown with its (S, B) in the message.
LookupTable build_lut(const SystemConfig& base, const std::vector<double>& s_axis,
                      const std::vector<double>& b_axis, const LutBuildOptions& options = {});

/// Throws fingerprint_mismatch naming the first differing field.
void check_fingerprint(const LookupTable& lut, const SystemConfig& cfg);

/// nearest: closest grid point in (log S, log B). bilinear: linear in S and B
/// between the four surrounding nodes, with pi renormalized; throws
/// out_of_range naming the axis when (S, B) lies outside the grid.
LutEntry lookup(const LookupTable& lut, double signal, double background,
                LookupMode mode = LookupMode::nearest);

/// Count law for an exposure of N_r t_r from tabulated moments.
mrp::CountLaw law_from_moments(double mu, double sigma2, double exposure);

/// Stationary pdf of an entry shifted from t_r / 2 to the delay `tau`.
markov::TemporalPdf place_entry(const LutEntry& entry, const SystemConfig& cfg, double tau);

/// Bins between the canonical delay t_r / 2 and `tau`, rounded to nearest.
std::int64_t delay_shift_bins(const SystemConfig& cfg, double tau);

/// MLUT: magic, u32 version, u32 n_b, u32 |S|, u32 |B|, f64 t_r, f64 sigma_t,
/// f64 t_d, the S then B axes, then per entry f64 mu, f64 sigma2 and n_b f64
/// pi values. Little-endian throughout.
void write_lut(const LookupTable& lut, std::ostream& out);
LookupTable read_lut(std::istream& in);
void save_lut(const LookupTable& lut, const std::filesystem::path& path);
LookupTable load_lut(const std::filesystem::path& path);

}  // namespace mars::synth
