#include "mars/eval/benchmark.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "mars/error.hpp"
#include "mars/io/config_io.hpp"
#include "mars/oracle/baselines.hpp"
#include "mars/oracle/sequential.hpp"
#include "mars/synth/cube.hpp"
#include "mars/synth/lookup_table.hpp"
#include "mars/synth/sampling.hpp"

namespace mars::eval {

namespace {

using nlohmann::json;

template <typename E>
E parse_enum(const json& v, std::initializer_list<E> options, const char* what) {
  if (!v.is_string()) throw Error(ErrorCode::invalid_config, std::string(what) + " must be a string");
  const std::string s = v.get<std::string>();
  for (E e : options) {
    if (to_string(e) == s) return e;
  }
  throw Error(ErrorCode::invalid_config, "unknown " + std::string(what) + " '" + s + "'");
}

std::uint32_t as_count(double value, const char* what) {
  if (!(value >= 1.0) || value != std::floor(value)) {
    throw Error(ErrorCode::invalid_config, std::string(what) + " values must be positive integers");
  }
  return static_cast<std::uint32_t>(value);
}

}  // namespace

std::string_view to_string(Simulator s) noexcept {
  switch (s) {
    case Simulator::mars: return "mars";
    case Simulator::sequential: return "sequential";
    case Simulator::poisson: return "poisson";
  }
  return "?";
}

std::string_view to_string(Axis a) noexcept {
  switch (a) {
    case Axis::flux: return "flux";
    case Axis::realizations: return "realizations";
    case Axis::pixels: return "pixels";
  }
  return "?";
}

std::string_view to_string(GrowthClass g) noexcept {
  switch (g) {
    case GrowthClass::constant: return "constant";
    case GrowthClass::linear: return "linear";
    case GrowthClass::superlinear: return "superlinear";
  }
  return "?";
}

BenchSuite parse_suite(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::format, std::string("suite is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::format, "suite must be a JSON object");
  BenchSuite suite;
  if (doc.contains("base")) suite.base = io::parse_config(doc.at("base").dump());
  if (doc.contains("sbr")) suite.sbr = doc.at("sbr").get<double>();
  if (doc.contains("repeats")) suite.repeats = doc.at("repeats").get<unsigned>();
  if (doc.contains("threads")) suite.threads = doc.at("threads").get<unsigned>();
  if (doc.contains("seed")) suite.seed = doc.at("seed").get<std::uint64_t>();
  if (!(suite.sbr > 0.0)) throw Error(ErrorCode::invalid_config, "suite sbr must be positive");
  if (suite.repeats == 0) throw Error(ErrorCode::invalid_config, "suite repeats must be positive");
  if (!doc.contains("curves") || !doc.at("curves").is_array()) {
    throw Error(ErrorCode::invalid_config, "suite needs a 'curves' array");
  }
  for (const json& c : doc.at("curves")) {
    BenchCurve curve;
    curve.simulator = parse_enum(c.at("simulator"), {Simulator::mars, Simulator::sequential, Simulator::poisson},
                                 "simulator");
    curve.axis = parse_enum(c.at("axis"), {Axis::flux, Axis::realizations, Axis::pixels}, "axis");
    curve.values = c.at("values").get<std::vector<double>>();
    if (curve.values.empty()) throw Error(ErrorCode::invalid_config, "curve values must be nonempty");
    suite.curves.push_back(std::move(curve));
  }
  return suite;
}

BenchSuite load_suite(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open suite " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_suite(text.str());
}

double loglog_slope(const std::vector<double>& values, const std::vector<double>& seconds) {
  if (values.size() != seconds.size() || values.size() < 2) {
    throw Error(ErrorCode::insufficient_data, "slope needs two or more cells");
  }
  const double n = static_cast<double>(values.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double x = std::log(values[k]);
    const double y = std::log(std::max(seconds[k], 1e-12));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  if (!(denom > 0.0)) throw Error(ErrorCode::domain, "slope needs distinct axis values");
  return (n * sxy - sx * sy) / denom;
}

GrowthClass classify_slope(double slope) noexcept {
  if (slope < 0.2) return GrowthClass::constant;
  if (slope < 1.2) return GrowthClass::linear;
  return GrowthClass::superlinear;
}

SystemConfig cell_config(const BenchSuite& suite, Axis axis, double value) {
  SystemConfig cfg = suite.base;
  switch (axis) {
    case Axis::flux:
      if (!(value > 0.0)) throw Error(ErrorCode::invalid_config, "flux values must be positive");
      cfg.signal = value * suite.sbr / (1.0 + suite.sbr);
      cfg.background = value / (1.0 + suite.sbr);
      break;
    case Axis::realizations:
      cfg.num_realizations = as_count(value, "realizations");
      break;
    case Axis::pixels:
      as_count(value, "pixels");
      break;
  }
  cfg.validate();
  return cfg;
}

std::function<void()> prepare_cell(const BenchSuite& suite, Simulator simulator, Axis axis,
                                   double value) {
  const SystemConfig cfg = cell_config(suite, axis, value);
  const std::uint32_t pixels = axis == Axis::pixels ? as_count(value, "pixels") : 1;
  const std::uint64_t seed = suite.seed;
  const unsigned threads = suite.threads;
  switch (simulator) {
    case Simulator::mars: {
      auto lut = std::make_shared<synth::LookupTable>(
          synth::build_lut(cfg, {cfg.signal}, {cfg.background}, {.threads = threads, .law = {}}));
      if (axis == Axis::pixels) {
        auto scene = std::make_shared<synth::Scene>(synth::Scene::uniform(cfg, 1, pixels));
        return [cfg, lut, scene, seed, threads] {
          synth::simulate_cube_rows(*scene, cfg, *lut, seed, {.mode = synth::LookupMode::nearest, .threads = threads},
                                    [](const synth::CubeRow&) {});
        };
      }
      return [cfg, lut, seed] {
        const synth::LutEntry entry = synth::lookup(*lut, cfg.signal, cfg.background);
        const mrp::CountLaw law = synth::law_from_moments(entry.mu, entry.sigma2, cfg.exposure());
        const auto pdf = synth::place_entry(entry, cfg, cfg.delay);
        const auto px = synth::simulate_pixel(law, pdf, cfg.num_realizations, seed);
        if (px.totals.size() != cfg.num_realizations) throw Error(ErrorCode::consistency, "short pixel");
      };
    }
    case Simulator::sequential:
      return [cfg, pixels, seed, threads] {
        for (std::uint32_t p = 0; p < pixels; ++p) {
          oracle::sequential_simulate(cfg, seed, {.keep_traces = false, .threads = threads, .stream = p});
        }
      };
    case Simulator::poisson:
      return [cfg, pixels, seed, threads] {
        for (std::uint32_t p = 0; p < pixels; ++p) {
          oracle::poisson_simulate(cfg, seed, {.threads = threads, .stream = p});
        }
      };
  }
  throw Error(ErrorCode::domain, "unknown simulator");
}

BenchCell time_cell(const std::function<void()>& fn, unsigned repeats) {
  BenchCell cell;
  for (unsigned k = 0; k < std::max(repeats, 1u); ++k) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const auto stop = std::chrono::steady_clock::now();
    cell.samples.push_back(std::chrono::duration<double>(stop - start).count());
  }
  std::vector<double> sorted = cell.samples;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  cell.median_seconds = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  return cell;
}

BenchReport run_benchmark(const BenchSuite& suite) {
  BenchReport report;
  report.host = host_descriptor();
  for (const BenchCurve& curve : suite.curves) {
    BenchCurveResult result;
    result.curve = curve;
    std::vector<double> medians;
    for (double v : curve.values) {
      const auto fn = prepare_cell(suite, curve.simulator, curve.axis, v);
      BenchCell cell = time_cell(fn, suite.repeats);
      cell.value = v;
      medians.push_back(cell.median_seconds);
      result.cells.push_back(std::move(cell));
    }
    if (curve.values.size() >= 2) {
      result.slope = loglog_slope(curve.values, medians);
      result.growth = classify_slope(result.slope);
    }
    report.curves.push_back(std::move(result));
  }
  return report;
}

std::map<std::string, std::string> host_descriptor() {
  std::map<std::string, std::string> host;
#if defined(__clang__)
  host["compiler"] = std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
  host["compiler"] = std::string("gcc ") + __VERSION__;
#else
  host["compiler"] = "unknown";
#endif
  host["hardware_threads"] = std::to_string(std::thread::hardware_concurrency());
#ifdef NDEBUG
  host["build"] = "optimized";
#else
  host["build"] = "debug";
#endif
  return host;
}

void write_bench_csv(const BenchReport& report, std::ostream& out) {
  out << "simulator,axis,value,median_seconds,slope,growth\n";
  out.precision(10);
  for (const auto& c : report.curves) {
    for (const auto& cell : c.cells) {
      out << to_string(c.curve.simulator) << ',' << to_string(c.curve.axis) << ',' << cell.value << ','
          << cell.median_seconds << ',' << c.slope << ',' << to_string(c.growth) << '\n';
    }
  }
}

void write_bench_json(const BenchReport& report, std::ostream& out) {
  json curves = json::array();
  for (const auto& c : report.curves) {
    json cells = json::array();
    for (const auto& cell : c.cells) {
      cells.push_back({{"value", cell.value}, {"median_seconds", cell.median_seconds}, {"samples", cell.samples}});
    }
    curves.push_back({{"simulator", to_string(c.curve.simulator)},
                      {"axis", to_string(c.curve.axis)},
                      {"slope", c.slope},
                      {"growth", to_string(c.growth)},
                      {"cells", cells}});
  }
  out << json{{"host", report.host}, {"curves", curves}}.dump(2) << '\n';
}

}  // namespace mars::eval
