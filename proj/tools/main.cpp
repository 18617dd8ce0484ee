#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "commands.hpp"
#include "mars/error.hpp"

namespace {

/// Exit codes: 0 success, 1 internal failure, 2 usage, 3 library error.
int report(std::string_view code, const std::string& message, int exit_code) {
  const nlohmann::json doc = {{"error", {{"code", code}, {"message", message}}}};
  std::cerr << doc.dump() << std::endl;
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace mars::cli;
  CLI::App app{"Dead-time-aware SPAD histogram simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "mars 0.1.0");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Draw histogram cubes (or one pixel) with a chosen engine");
  simulate->add_option("--config", sim.config, "System configuration JSON")->required()->check(CLI::ExistingFile);
  simulate->add_option("--scene", sim.scene, "Scene JSON; omit for a single pixel from the config")
      ->check(CLI::ExistingFile);
  simulate->add_option("--lut", sim.lut, "Lookup table (mars engine)")->check(CLI::ExistingFile);
  simulate->add_option("--engine", sim.engine, "mars, sequential or poisson")
      ->check(CLI::IsMember({"mars", "sequential", "poisson"}));
  simulate->add_option("--lookup", sim.lookup, "nearest or bilinear")->check(CLI::IsMember({"nearest", "bilinear"}));
  simulate->add_option("--seed", sim.seed, "Random seed");
  simulate->add_option("--out", sim.out, "Output directory")->required();
  simulate->add_option("--threads", sim.threads, "Worker threads (0: MARS_THREADS or all)");
  simulate->add_option("--units", sim.units, "Time unit of the inputs: s, ms, us, ns or ps");

  BuildLutArgs lut;
  auto* build_lut = app.add_subcommand("build-lut", "Precompute the (S, B) lookup table");
  build_lut->add_option("--config", lut.config, "System configuration JSON")->required()->check(CLI::ExistingFile);
  build_lut->add_option("--grid", lut.grid, "Axes as S=lo:hi:n,B=lo:hi:n (geometric)");
  build_lut->add_option("--out", lut.out, "Table file to write")->required();
  build_lut->add_option("--threads", lut.threads, "Worker threads (0: MARS_THREADS or all)");
  build_lut->add_option("--units", lut.units, "Time unit of the config");

  ValidateArgs val;
  auto* validate = app.add_subcommand("validate", "Score MaRS, renewal and Poisson laws against the oracle");
  validate->add_option("--config", val.config, "Base configuration JSON")->required()->check(CLI::ExistingFile);
  validate->add_option("--cells", val.cells, "'desk' or a JSON array of config overrides");
  validate->add_option("--out", val.out, "Output directory")->required();
  validate->add_option("--seed", val.seed, "Random seed");
  validate->add_option("--realizations", val.realizations, "Oracle realizations per cell")
      ->check(CLI::PositiveNumber);
  validate->add_option("--threads", val.threads, "Worker threads (0: MARS_THREADS or all)");
  validate->add_option("--units", val.units, "Time unit of the config");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Time simulators along flux, realization and pixel axes");
  bench_cmd->add_option("--suite", bench.suite, "Benchmark suite JSON")->required()->check(CLI::ExistingFile);
  bench_cmd->add_option("--out", bench.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report("usage", e.what(), 2);
  }

  try {
    if (*simulate) return run_simulate(sim);
    if (*build_lut) return run_build_lut(lut);
    if (*validate) return run_validate(val);
    if (*bench_cmd) return run_bench(bench);
  } catch (const mars::Error& e) {
    return report(mars::to_string(e.code()), e.what(), 3);
  } catch (const std::exception& e) {
    return report("internal", e.what(), 1);
  }
  return 0;
}
