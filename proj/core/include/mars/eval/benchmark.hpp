#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mars/config.hpp"

namespace mars::eval {

enum class Simulator { mars, sequential, poisson };
enum class Axis { flux, realizations, pixels };
enum class GrowthClass { constant, linear, superlinear };

std::string_view to_string(Simulator s) noexcept;
std::string_view to_string(Axis a) noexcept;
std::string_view to_string(GrowthClass g) noexcept;

/// One timing curve: a simulator swept along one axis.
struct BenchCurve {
  Simulator simulator = Simulator::mars;
  Axis axis = Axis::flux;
  std::vector<double> values;   ///< Lambda, N_iter or pixel count
};

struct BenchSuite {
  SystemConfig base;            ///< N_iter, pixel count 1 and Lambda taken from here off-axis
  double sbr = 8.2 / 1.2;       ///< S / B kept fixed while Lambda varies
  unsigned repeats = 5;
  unsigned threads = 1;         ///< threads inside each simulator call
  std::uint64_t seed = 1;
  std::vector<BenchCurve> curves;
};

/// {"base": {config}, "sbr", "repeats", "threads", "seed",
///  "curves": [{"simulator": "mars", "axis": "flux", "values": [...]}]}.
BenchSuite parse_suite(std::string_view json_text);
BenchSuite load_suite(const std::filesystem::path& path);

/// Least-squares slope of log(seconds) against log(value).
double loglog_slope(const std::vector<double>& values, const std::vector<double>& seconds);

/// constant below 0.2, linear below 1.2, superlinear otherwise.
GrowthClass classify_slope(double slope) noexcept;

struct BenchCell {
  double value = 0.0;
  double median_seconds = 0.0;
  std::vector<double> samples;
};

struct BenchCurveResult {
  BenchCurve curve;
  std::vector<BenchCell> cells;
  double slope = 0.0;
  GrowthClass growth = GrowthClass::constant;
};

struct BenchReport {
  std::vector<BenchCurveResult> curves;
  std::map<std::string, std::string> host;
};

/// Configuration of one cell: the base with the axis value applied.
SystemConfig cell_config(const BenchSuite& suite, Axis axis, double value);

/// Runnable workload of one cell. For mars the lookup table is built here,
/// outside the returned callable, so only lookup, shift and sampling are timed.
std::function<void()> prepare_cell(const BenchSuite& suite, Simulator simulator, Axis axis,
                                   double value);

/// Median of `repeats` wall times of fn.
BenchCell time_cell(const std::function<void()>& fn, unsigned repeats);

/// Runs every curve cell by cell, serially.
BenchReport run_benchmark(const BenchSuite& suite);

/// Host descriptor: compiler, hardware threads, build type.
std::map<std::string, std::string> host_descriptor();

/// Header: simulator,axis,value,median_seconds,slope,growth.
void write_bench_csv(const BenchReport& report, std::ostream& out);
void write_bench_json(const BenchReport& report, std::ostream& out);

}  // namespace mars::eval
