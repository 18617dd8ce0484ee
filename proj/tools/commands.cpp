#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mars/error.hpp"
#include "mars/eval/benchmark.hpp"
#include "mars/eval/validation.hpp"
#include "mars/io/config_io.hpp"
#include "mars/oracle/baselines.hpp"
#include "mars/oracle/sequential.hpp"
#include "mars/parallel.hpp"
#include "mars/synth/cube.hpp"
#include "mars/synth/lookup_table.hpp"
#include "run_dir.hpp"

namespace mars::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kVersion = "mars 0.1.0";

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

json config_json(const SystemConfig& cfg) { return json::parse(io::config_to_json(cfg)); }

void write_json_file(const fs::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

/// Table over exactly the scene's reflectivities and background.
synth::LookupTable scene_lut(const synth::Scene& scene, const SystemConfig& cfg, unsigned threads) {
  const std::set<double> levels(scene.reflectivity.begin(), scene.reflectivity.end());
  const std::vector<double> s_axis(levels.begin(), levels.end());
  return synth::build_lut(cfg, s_axis, {scene.background}, {.threads = threads, .law = {}});
}

/// Per-pixel oracle runs written into a cube file; returns the totals.
std::vector<std::uint32_t> simulate_reference_cube(const synth::Scene& scene, const SystemConfig& cfg,
                                                   bool sequential, std::uint64_t seed, unsigned threads,
                                                   const fs::path& path) {
  const std::size_t pixels = scene.pixels();
  std::vector<std::uint32_t> totals(pixels * cfg.num_realizations, 0);
  synth::CubeFileWriter writer(path, {scene.height, scene.width, cfg.num_bins, cfg.num_realizations});
  for (std::size_t p = 0; p < pixels; ++p) {
    SystemConfig px = cfg;
    px.signal = scene.reflectivity[p];
    px.background = scene.background;
    px.delay = scene.delay[p];
    const oracle::SequentialResult result =
        sequential ? oracle::sequential_simulate(px, seed, {.keep_traces = false, .threads = threads, .stream = p})
                   : oracle::poisson_simulate(px, seed, {.threads = threads, .stream = p});
    for (std::uint32_t r = 0; r < cfg.num_realizations; ++r) {
      totals[r * pixels + p] = result.totals[r];
      writer.write_block(r, p, std::span(result.counts).subspan(static_cast<std::size_t>(r) * cfg.num_bins, cfg.num_bins));
    }
  }
  writer.close();
  return totals;
}

synth::LookupMode parse_mode(const std::string& s) {
  if (s == "nearest") return synth::LookupMode::nearest;
  if (s == "bilinear") return synth::LookupMode::bilinear;
  throw Error(ErrorCode::invalid_config, "unknown lookup mode '" + s + "'");
}

std::vector<eval::ValidationCell> load_cells(const std::string& spec, const SystemConfig& base) {
  if (spec == "desk") return eval::desk_grid(base);
  const json doc = json::parse(read_text(spec), nullptr, false);
  if (doc.is_discarded() || !doc.is_array()) throw Error(ErrorCode::format, "cells file must hold a JSON array");
  std::vector<eval::ValidationCell> cells;
  json base_doc = config_json(base);
  for (const json& item : doc) {
    if (!item.is_object()) throw Error(ErrorCode::format, "each cell must be a JSON object");
    // Cell times may carry their own unit; the base is already in seconds.
    double scale = 1.0;
    if (item.contains("units")) {
      const json& units = item.at("units");
      if (!units.is_object() || !units.contains("time") || !units.at("time").is_string()) {
        throw Error(ErrorCode::invalid_config, "cell \"units\" must look like {\"time\": \"ns\"}");
      }
      scale = io::time_unit_scale(units.at("time").get<std::string>());
    }
    json merged = base_doc;
    std::string label;
    for (const auto& [key, value] : item.items()) {
      if (key == "label") {
        label = value.get<std::string>();
      } else if (key == "t_r" || key == "sigma_t" || key == "t_d" || key == "tau") {
        if (!value.is_number()) throw Error(ErrorCode::invalid_config, "cell key '" + key + "' must be a number");
        merged[key] = value.get<double>() * scale;
      } else if (key != "units") {
        merged[key] = value;
      }
    }
    eval::ValidationCell cell;
    cell.cfg = io::parse_config(merged.dump());
    cell.label = label.empty() ? "cell" + std::to_string(cells.size()) : label;
    cells.push_back(std::move(cell));
  }
  if (cells.empty()) throw Error(ErrorCode::invalid_config, "cells file lists no cells");
  return cells;
}

}  // namespace

GridSpec parse_grid(const std::string& text) {
  GridSpec grid;
  std::stringstream ss(text);
  std::string part;
  bool have_s = false;
  bool have_b = false;
  while (std::getline(ss, part, ',')) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::invalid_config, "grid part '" + part + "' lacks '='");
    const std::string name = part.substr(0, eq);
    std::stringstream fields(part.substr(eq + 1));
    std::string lo, hi, n;
    if (!std::getline(fields, lo, ':') || !std::getline(fields, hi, ':') || !std::getline(fields, n, ':')) {
      throw Error(ErrorCode::invalid_config, "grid part '" + part + "' must read name=lo:hi:n");
    }
    std::vector<double> axis;
    try {
      axis = synth::geometric_axis(std::stod(lo), std::stod(hi), std::stoul(n));
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::invalid_config, "grid part '" + part + "' has a malformed number");
    }
    if (name == "S") {
      grid.s_axis = std::move(axis);
      have_s = true;
    } else if (name == "B") {
      grid.b_axis = std::move(axis);
      have_b = true;
    } else {
      throw Error(ErrorCode::invalid_config, "grid axis must be S or B, got '" + name + "'");
    }
  }
  if (!have_s || !have_b) throw Error(ErrorCode::invalid_config, "grid needs both S and B axes");
  return grid;
}

unsigned effective_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("MARS_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    throw Error(ErrorCode::invalid_config, "MARS_THREADS must be a positive integer");
  }
  return resolve_threads(0);
}

int run_simulate(const SimulateArgs& args) {
  const auto start = std::chrono::steady_clock::now();
  const unsigned threads = effective_threads(args.threads);
  const SystemConfig cfg = io::load_config(args.config, args.units);
  const synth::Scene scene = args.scene.empty() ? synth::Scene::uniform(cfg, 1, 1)
                                                : synth::load_scene(args.scene, args.units);
  scene.validate(cfg);
  if (args.engine != "mars" && !args.lut.empty()) {
    throw Error(ErrorCode::invalid_config, "--lut only applies to the mars engine");
  }

  DirectoryLock lock(args.out);
  const fs::path cube_path = args.out / "histograms.mcub";
  const fs::path sidecar_path = args.out / "histograms.json";
  std::vector<std::uint32_t> totals;
  if (args.engine == "mars") {
    const synth::LookupTable lut = args.lut.empty() ? scene_lut(scene, cfg, threads) : synth::load_lut(args.lut);
    synth::CubeOptions options;
    options.mode = parse_mode(args.lookup);
    options.threads = threads;
    totals = synth::simulate_cube_to_file(scene, cfg, lut, args.seed, options, cube_path);
  } else if (args.engine == "sequential" || args.engine == "poisson") {
    totals = simulate_reference_cube(scene, cfg, args.engine == "sequential", args.seed, threads, cube_path);
  } else {
    throw Error(ErrorCode::invalid_config, "unknown engine '" + args.engine + "'");
  }
  const double wall = seconds_since(start);

  json sidecar = {
      {"format", "MCUB"},
      {"version", 1},
      {"simulator", kVersion},
      {"engine", args.engine},
      {"seed", args.seed},
      {"config", config_json(cfg)},
      {"height", scene.height},
      {"width", scene.width},
      {"n_b", cfg.num_bins},
      {"N_iter", cfg.num_realizations},
      {"realizations", "0.." + std::to_string(cfg.num_realizations - 1)},
      {"scene", args.scene.empty() ? json(nullptr) : json(args.scene.generic_string())},
      {"lut", args.lut.empty() ? json(nullptr) : json(args.lut.generic_string())},
      {"lookup", args.engine == "mars" ? json(args.lookup) : json(nullptr)},
      {"wall_time_seconds", wall},
  };
  write_json_file(sidecar_path, sidecar);

  ManifestEntry entry;
  entry.command = "simulate";
  entry.config = config_json(cfg);
  entry.seed = args.seed;
  entry.threads = threads;
  entry.inputs = {args.config};
  if (!args.scene.empty()) entry.inputs.push_back(args.scene);
  if (!args.lut.empty()) entry.inputs.push_back(args.lut);
  entry.outputs = {cube_path, sidecar_path};
  entry.wall_time_seconds = wall;
  append_manifest(args.out, entry);

  double sum = 0.0;
  for (std::uint32_t t : totals) sum += t;
  std::cout << "wrote " << cube_path.string() << ": " << scene.height << "x" << scene.width << "x"
            << cfg.num_bins << " x " << cfg.num_realizations << " realizations, mean count "
            << (totals.empty() ? 0.0 : sum / static_cast<double>(totals.size())) << "\n";
  return 0;
}

int run_build_lut(const BuildLutArgs& args) {
  const auto start = std::chrono::steady_clock::now();
  const unsigned threads = effective_threads(args.threads);
  const SystemConfig cfg = io::load_config(args.config, args.units);
  const GridSpec grid = parse_grid(args.grid);
  const fs::path dir = args.out.has_parent_path() ? args.out.parent_path() : fs::path(".");
  DirectoryLock lock(dir);
  const synth::LookupTable lut = synth::build_lut(cfg, grid.s_axis, grid.b_axis, {.threads = threads, .law = {}});
  synth::save_lut(lut, args.out);
  const double wall = seconds_since(start);

  double mu_lo = lut.entries.front().mu, mu_hi = mu_lo;
  double s2_lo = lut.entries.front().sigma2, s2_hi = s2_lo;
  double worst_mass = 0.0;
  for (const auto& e : lut.entries) {
    mu_lo = std::min(mu_lo, e.mu);
    mu_hi = std::max(mu_hi, e.mu);
    s2_lo = std::min(s2_lo, e.sigma2);
    s2_hi = std::max(s2_hi, e.sigma2);
    double mass = 0.0;
    for (double p : e.pi) mass += p;
    worst_mass = std::max(worst_mass, std::abs(mass - 1.0));
  }
  std::cout << "wrote " << args.out.string() << ": " << lut.s_axis.size() << "x" << lut.b_axis.size()
            << " entries, n_b " << lut.fingerprint.num_bins << "\n"
            << "  mu     [" << mu_lo << ", " << mu_hi << "] s\n"
            << "  sigma2 [" << s2_lo << ", " << s2_hi << "] s^2\n"
            << "  max |sum(pi) - 1| " << worst_mass << "\n";

  ManifestEntry entry;
  entry.command = "build-lut";
  entry.config = config_json(cfg);
  entry.config["grid"] = args.grid;
  entry.threads = threads;
  entry.inputs = {args.config};
  entry.outputs = {args.out};
  entry.wall_time_seconds = wall;
  append_manifest(dir, entry);
  return 0;
}

int run_validate(const ValidateArgs& args) {
  const auto start = std::chrono::steady_clock::now();
  const unsigned threads = effective_threads(args.threads);
  const SystemConfig base = io::load_config(args.config, args.units);
  const auto cells = load_cells(args.cells, base);
  DirectoryLock lock(args.out);
  eval::ValidationOptions options;
  options.oracle_realizations = args.realizations;
  options.threads = threads;
  const eval::MetricReport report = eval::validate(cells, args.seed, options);

  const fs::path csv = args.out / "report.csv";
  const fs::path summary = args.out / "report.json";
  {
    std::ofstream out(csv);
    if (!out) throw Error(ErrorCode::io, "cannot write " + csv.string());
    eval::write_report_csv(report, out);
  }
  {
    std::ofstream out(summary);
    if (!out) throw Error(ErrorCode::io, "cannot write " + summary.string());
    eval::write_report_json(report, out);
  }
  std::cout << "method    wasserstein  kl  mean_diff  var_diff (grid average over " << cells.size() << " cells)\n";
  for (const std::string& m : eval::kMethods) {
    const eval::MetricValues v = report.average(m);
    std::cout << m << "  " << v.wasserstein << "  " << v.kl << "  " << v.mean_diff << "  " << v.var_diff << "\n";
  }

  ManifestEntry entry;
  entry.command = "validate";
  entry.config = config_json(base);
  entry.config["cells"] = args.cells;
  entry.config["realizations"] = args.realizations;
  entry.seed = args.seed;
  entry.threads = threads;
  entry.inputs = {args.config};
  if (args.cells != "desk") entry.inputs.push_back(args.cells);
  entry.outputs = {csv, summary};
  entry.wall_time_seconds = seconds_since(start);
  append_manifest(args.out, entry);
  return 0;
}

int run_bench(const BenchArgs& args) {
  const auto start = std::chrono::steady_clock::now();
  const eval::BenchSuite suite = eval::load_suite(args.suite);
  DirectoryLock lock(args.out);
  const eval::BenchReport report = eval::run_benchmark(suite);
  const fs::path csv = args.out / "bench.csv";
  const fs::path summary = args.out / "bench.json";
  {
    std::ofstream out(csv);
    if (!out) throw Error(ErrorCode::io, "cannot write " + csv.string());
    eval::write_bench_csv(report, out);
  }
  {
    std::ofstream out(summary);
    if (!out) throw Error(ErrorCode::io, "cannot write " + summary.string());
    eval::write_bench_json(report, out);
  }
  for (const auto& c : report.curves) {
    std::cout << eval::to_string(c.curve.simulator) << " vs " << eval::to_string(c.curve.axis) << ": slope "
              << c.slope << " (" << eval::to_string(c.growth) << ")\n";
  }

  ManifestEntry entry;
  entry.command = "bench";
  entry.config = config_json(suite.base);
  entry.seed = suite.seed;
  entry.threads = suite.threads;
  entry.inputs = {args.suite};
  entry.outputs = {csv, summary};
  entry.wall_time_seconds = seconds_since(start);
  append_manifest(args.out, entry);
  return 0;
}

}  // namespace mars::cli
