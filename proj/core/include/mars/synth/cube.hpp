#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mars/config.hpp"
#include "mars/synth/lookup_table.hpp"

namespace mars::synth {

/// Per-pixel delay and reflectivity with one background level. The signal
/// level of a pixel is its reflectivity.
struct Scene {
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::vector<double> delay;          ///< seconds, row-major H x W
  std::vector<double> reflectivity;   ///< row-major H x W, used as S
  double background = 0.0;            ///< B

  std::size_t pixels() const noexcept { return static_cast<std::size_t>(height) * width; }

  /// Every pixel carrying (cfg.delay, cfg.signal) and B = cfg.background.
  static Scene uniform(const SystemConfig& cfg, std::uint32_t height, std::uint32_t width);

  /// Throws invalid_config unless 0 <= tau < t_r and R >= 0 everywhere and
  /// the map sizes agree with H x W.
  void validate(const SystemConfig& cfg) const;
};

/// Keys: "height", "width", "delay" and "reflectivity" (flat row-major arrays
/// or arrays of rows), "background", optional "units": {"time": "ns"} for the
/// delays. A non-empty unit_override wins over the document's unit.
Scene parse_scene(std::string_view json_text, std::string_view unit_override = {});
Scene load_scene(const std::filesystem::path& path, std::string_view unit_override = {});

/// Realization-major, row-major histogram cube.
struct HistogramCube {
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::uint32_t num_bins = 0;
  std::uint32_t num_realizations = 0;
  std::vector<std::uint32_t> totals;   ///< N_iter x H x W drawn counts
  std::vector<std::uint32_t> counts;   ///< N_iter x H x W x n_b

  std::size_t pixels() const noexcept { return static_cast<std::size_t>(height) * width; }
  std::span<const std::uint32_t> histogram(std::size_t r, std::size_t pixel) const {
    return {counts.data() + (r * pixels() + pixel) * num_bins, num_bins};
  }
};

struct CubeOptions {
  LookupMode mode = LookupMode::nearest;
  unsigned threads = 0;
};

/// One image row for all realizations: totals[r * W + x] and
/// counts[(r * W + x) * n_b + j].
struct CubeRow {
  std::uint32_t row = 0;
  std::span<const std::uint32_t> totals;
  std::span<const std::uint32_t> counts;
};

/// Draws cfg.num_realizations cubes row by row, handing each finished row to
/// `sink` in row order. Pixel p = y * W + x looks up (R_p, B), shifts the
/// canonical pdf to its delay and draws from streams keyed by (seed, p, r),
/// so the output does not depend on the thread count.
void simulate_cube_rows(const Scene& scene, const SystemConfig& cfg, const LookupTable& lut,
                        std::uint64_t seed, const CubeOptions& options,
                        const std::function<void(const CubeRow&)>& sink);

/// Whole cube in memory.
HistogramCube simulate_cube(const Scene& scene, const SystemConfig& cfg, const LookupTable& lut,
                            std::uint64_t seed, const CubeOptions& options = {});

/// MCUB header: magic, u32 version, u32 H, u32 W, u32 n_b, u32 N_iter.
struct CubeHeader {
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::uint32_t num_bins = 0;
  std::uint32_t num_realizations = 0;

  std::uint64_t values() const noexcept {
    return std::uint64_t{height} * width * num_bins * num_realizations;
  }
};

/// Writes an MCUB file whose body is filled by later calls to write_block.
class CubeFileWriter {
 public:
  CubeFileWriter(const std::filesystem::path& path, const CubeHeader& header);

  /// Writes `values` starting at the histogram of (r, pixel).
  void write_block(std::uint32_t r, std::size_t pixel, std::span<const std::uint32_t> values);
  /// Flushes and checks the stream; call once after the last block.
  void close();

 private:
  std::ofstream out_;
  CubeHeader header_;
};

void write_cube(const HistogramCube& cube, std::ostream& out);
HistogramCube read_cube(std::istream& in);
void save_cube(const HistogramCube& cube, const std::filesystem::path& path);
HistogramCube load_cube(const std::filesystem::path& path);

/// Streams a simulated cube straight to an MCUB file and returns the drawn
/// totals (N_iter x H x W).
std::vector<std::uint32_t> simulate_cube_to_file(const Scene& scene, const SystemConfig& cfg,
                                                 const LookupTable& lut, std::uint64_t seed,
                                                 const CubeOptions& options,
                                                 const std::filesystem::path& path);

}  // namespace mars::synth
