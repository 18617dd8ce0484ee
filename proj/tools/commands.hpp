#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace mars::cli {

struct SimulateArgs {
  std::filesystem::path config;
  std::filesystem::path scene;     ///< empty: single pixel from the config
  std::filesystem::path lut;       ///< empty: built from the scene's (R, B) values
  std::string engine = "mars";
  std::string lookup = "nearest";
  std::string units;
  std::filesystem::path out;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

struct BuildLutArgs {
  std::filesystem::path config;
  std::string grid = "S=0.1:20:64,B=0.05:5:16";
  std::string units;
  std::filesystem::path out;       ///< table file
  unsigned threads = 0;
};

struct ValidateArgs {
  std::filesystem::path config;
  std::string cells = "desk";      ///< "desk" or a JSON file of config overrides
  std::string units;
  std::filesystem::path out;
  std::uint64_t seed = 1;
  std::uint32_t realizations = 10000;
  unsigned threads = 0;
};

struct BenchArgs {
  std::filesystem::path suite;
  std::filesystem::path out;
};

/// S and B axes of a grid string "S=lo:hi:n,B=lo:hi:n" (geometric spacing).
struct GridSpec {
  std::vector<double> s_axis;
  std::vector<double> b_axis;
};
GridSpec parse_grid(const std::string& text);

/// --threads if positive, else MARS_THREADS if set, else all hardware threads.
unsigned effective_threads(unsigned requested);

int run_simulate(const SimulateArgs& args);
int run_build_lut(const BuildLutArgs& args);
int run_validate(const ValidateArgs& args);
int run_bench(const BenchArgs& args);

}  // namespace mars::cli
