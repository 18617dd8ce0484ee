#include "mars/synth/cube.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "mars/error.hpp"
#include "mars/io/binary.hpp"
#include "mars/io/config_io.hpp"
#include "mars/parallel.hpp"
#include "mars/synth/sampling.hpp"

namespace mars::synth {

namespace {

using nlohmann::json;

constexpr std::uint32_t kCubeVersion = 1;
constexpr std::streamoff kCubeHeaderBytes = 4 + 5 * 4;

std::vector<double> read_map(const json& doc, const char* key, std::size_t expected) {
  if (!doc.contains(key)) throw Error(ErrorCode::invalid_config, std::string("scene lacks '") + key + "'");
  const json& v = doc.at(key);
  if (!v.is_array()) throw Error(ErrorCode::invalid_config, std::string("scene '") + key + "' must be an array");
  std::vector<double> out;
  out.reserve(expected);
  for (const json& row : v) {
    if (row.is_array()) {
      for (const json& x : row) {
        if (!x.is_number()) throw Error(ErrorCode::invalid_config, std::string("scene '") + key + "' must hold numbers");
        out.push_back(x.get<double>());
      }
    } else if (row.is_number()) {
      out.push_back(row.get<double>());
    } else {
      throw Error(ErrorCode::invalid_config, std::string("scene '") + key + "' must hold numbers");
    }
  }
  if (out.size() != expected) {
    throw Error(ErrorCode::dimension, std::string("scene '") + key + "' has " + std::to_string(out.size()) +
                                          " values, expected " + std::to_string(expected));
  }
  return out;
}

std::uint32_t read_dim(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc.at(key).is_number_integer() || doc.at(key).get<std::int64_t>() < 1) {
    throw Error(ErrorCode::invalid_config, std::string("scene '") + key + "' must be a positive integer");
  }
  return doc.at(key).get<std::uint32_t>();
}

void write_u32_block(std::ostream& out, std::span<const std::uint32_t> values) {
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size() * sizeof(std::uint32_t)));
  } else {
    for (std::uint32_t v : values) io::write_u32(out, v);
  }
}

void write_header(std::ostream& out, const CubeHeader& h) {
  io::write_magic(out, "MCUB");
  io::write_u32(out, kCubeVersion);
  io::write_u32(out, h.height);
  io::write_u32(out, h.width);
  io::write_u32(out, h.num_bins);
  io::write_u32(out, h.num_realizations);
}

}  // namespace

Scene Scene::uniform(const SystemConfig& cfg, std::uint32_t height, std::uint32_t width) {
  Scene scene;
  scene.height = height;
  scene.width = width;
  scene.delay.assign(scene.pixels(), cfg.delay);
  scene.reflectivity.assign(scene.pixels(), cfg.signal);
  scene.background = cfg.background;
  return scene;
}

void Scene::validate(const SystemConfig& cfg) const {
  if (height == 0 || width == 0) throw Error(ErrorCode::invalid_config, "scene must have at least one pixel");
  if (delay.size() != pixels() || reflectivity.size() != pixels()) {
    throw Error(ErrorCode::dimension, "scene maps do not match height x width");
  }
  if (!(background >= 0.0) || !std::isfinite(background)) {
    throw Error(ErrorCode::invalid_config, "scene background must be nonnegative");
  }
  for (std::size_t p = 0; p < pixels(); ++p) {
    if (!(delay[p] >= 0.0 && delay[p] < cfg.rep_period)) {
      throw Error(ErrorCode::invalid_config,
                  "scene delay at pixel " + std::to_string(p) + " lies outside [0, t_r)");
    }
    if (!(reflectivity[p] >= 0.0) || !std::isfinite(reflectivity[p])) {
      throw Error(ErrorCode::invalid_config,
                  "scene reflectivity at pixel " + std::to_string(p) + " must be nonnegative");
    }
  }
}

Scene parse_scene(std::string_view json_text, std::string_view unit_override) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::format, std::string("scene is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::format, "scene must be a JSON object");
  static constexpr const char* known[] = {"height", "width", "delay", "reflectivity", "background", "units"};
  for (const auto& item : doc.items()) {
    if (std::find(std::begin(known), std::end(known), item.key()) == std::end(known)) {
      throw Error(ErrorCode::invalid_config, "unknown scene key '" + item.key() + "'");
    }
  }
  Scene scene;
  scene.height = read_dim(doc, "height");
  scene.width = read_dim(doc, "width");
  scene.delay = read_map(doc, "delay", scene.pixels());
  scene.reflectivity = read_map(doc, "reflectivity", scene.pixels());
  if (!doc.contains("background") || !doc.at("background").is_number()) {
    throw Error(ErrorCode::invalid_config, "scene 'background' must be a number");
  }
  scene.background = doc.at("background").get<double>();

  std::string unit = "s";
  if (doc.contains("units")) {
    const json& units = doc.at("units");
    if (!units.is_object() || !units.contains("time") || !units.at("time").is_string()) {
      throw Error(ErrorCode::invalid_config, "scene 'units' must be {\"time\": <unit>}");
    }
    unit = units.at("time").get<std::string>();
  }
  if (!unit_override.empty()) unit = std::string(unit_override);
  const double scale = io::time_unit_scale(unit);
  for (double& t : scene.delay) t *= scale;
  return scene;
}

Scene load_scene(const std::filesystem::path& path, std::string_view unit_override) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open scene " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scene(text.str(), unit_override);
}

void simulate_cube_rows(const Scene& scene, const SystemConfig& cfg, const LookupTable& lut,
                        std::uint64_t seed, const CubeOptions& options,
                        const std::function<void(const CubeRow&)>& sink) {
  cfg.validate();
  scene.validate(cfg);
  check_fingerprint(lut, cfg);
  const std::uint32_t width = scene.width;
  const std::uint32_t n_b = cfg.num_bins;
  const std::uint32_t n_iter = cfg.num_realizations;
  const std::size_t hist_values = static_cast<std::size_t>(n_iter) * n_b;

  // Pixel-major scratch for one row, then transposed to realization-major.
  std::vector<std::uint32_t> pixel_totals(static_cast<std::size_t>(width) * n_iter);
  std::vector<std::uint32_t> pixel_counts(static_cast<std::size_t>(width) * hist_values);
  std::vector<std::uint32_t> row_totals(pixel_totals.size());
  std::vector<std::uint32_t> row_counts(pixel_counts.size());

  for (std::uint32_t y = 0; y < scene.height; ++y) {
    parallel_for(width, options.threads, [&](std::size_t x) {
      const std::size_t p = static_cast<std::size_t>(y) * width + x;
      const LutEntry entry = lookup(lut, scene.reflectivity[p], scene.background, options.mode);
      const mrp::CountLaw law = law_from_moments(entry.mu, entry.sigma2, cfg.exposure());
      const markov::TemporalPdf pdf = place_entry(entry, cfg, scene.delay[p]);
      const MultinomialSampler sampler(pdf.pi);
      synthesize_pixel(law.count_mean, law.count_var, sampler, n_iter, seed, p,
                       std::span(pixel_totals).subspan(x * n_iter, n_iter),
                       std::span(pixel_counts).subspan(x * hist_values, hist_values));
    });
    for (std::uint32_t r = 0; r < n_iter; ++r) {
      for (std::uint32_t x = 0; x < width; ++x) {
        row_totals[static_cast<std::size_t>(r) * width + x] = pixel_totals[static_cast<std::size_t>(x) * n_iter + r];
        const auto src = pixel_counts.begin() + static_cast<std::ptrdiff_t>(x * hist_values + static_cast<std::size_t>(r) * n_b);
        std::copy(src, src + n_b,
                  row_counts.begin() + static_cast<std::ptrdiff_t>((static_cast<std::size_t>(r) * width + x) * n_b));
      }
    }
    sink(CubeRow{y, row_totals, row_counts});
  }
}

HistogramCube simulate_cube(const Scene& scene, const SystemConfig& cfg, const LookupTable& lut,
                            std::uint64_t seed, const CubeOptions& options) {
  HistogramCube cube;
  cube.height = scene.height;
  cube.width = scene.width;
  cube.num_bins = cfg.num_bins;
  cube.num_realizations = cfg.num_realizations;
  const std::size_t pixels = scene.pixels();
  cube.totals.assign(pixels * cfg.num_realizations, 0);
  cube.counts.assign(pixels * cfg.num_realizations * cfg.num_bins, 0);
  const std::size_t n_b = cfg.num_bins;
  simulate_cube_rows(scene, cfg, lut, seed, options, [&](const CubeRow& row) {
    for (std::size_t r = 0; r < cube.num_realizations; ++r) {
      const std::size_t first = r * pixels + static_cast<std::size_t>(row.row) * cube.width;
      std::copy_n(row.totals.begin() + static_cast<std::ptrdiff_t>(r * cube.width), cube.width,
                  cube.totals.begin() + static_cast<std::ptrdiff_t>(first));
      std::copy_n(row.counts.begin() + static_cast<std::ptrdiff_t>(r * cube.width * n_b), cube.width * n_b,
                  cube.counts.begin() + static_cast<std::ptrdiff_t>(first * n_b));
    }
  });
  return cube;
}

CubeFileWriter::CubeFileWriter(const std::filesystem::path& path, const CubeHeader& header)
    : out_(path, std::ios::binary | std::ios::trunc), header_(header) {
  if (!out_) throw Error(ErrorCode::io, "cannot open " + path.string() + " for writing");
  write_header(out_, header_);
}

void CubeFileWriter::write_block(std::uint32_t r, std::size_t pixel,
                                 std::span<const std::uint32_t> values) {
  const std::uint64_t pixels = std::uint64_t{header_.height} * header_.width;
  const std::uint64_t index = (std::uint64_t{r} * pixels + pixel) * header_.num_bins;
  if (index + values.size() > header_.values()) throw Error(ErrorCode::dimension, "cube block out of bounds");
  out_.seekp(kCubeHeaderBytes + static_cast<std::streamoff>(index * sizeof(std::uint32_t)));
  write_u32_block(out_, values);
}

void CubeFileWriter::close() {
  out_.flush();
  if (!out_) throw Error(ErrorCode::io, "failed writing cube");
  out_.close();
}

void write_cube(const HistogramCube& cube, std::ostream& out) {
  write_header(out, CubeHeader{cube.height, cube.width, cube.num_bins, cube.num_realizations});
  write_u32_block(out, cube.counts);
  if (!out) throw Error(ErrorCode::io, "failed writing cube");
}

HistogramCube read_cube(std::istream& in) {
  io::expect_magic(in, "MCUB");
  const std::uint32_t version = io::read_u32(in);
  if (version != kCubeVersion) throw Error(ErrorCode::format, "unsupported MCUB version " + std::to_string(version));
  HistogramCube cube;
  cube.height = io::read_u32(in);
  cube.width = io::read_u32(in);
  cube.num_bins = io::read_u32(in);
  cube.num_realizations = io::read_u32(in);
  const std::size_t hists = cube.pixels() * cube.num_realizations;
  cube.counts.resize(hists * cube.num_bins);
  for (auto& c : cube.counts) c = io::read_u32(in);
  cube.totals.assign(hists, 0);
  for (std::size_t h = 0; h < hists; ++h) {
    std::uint64_t sum = 0;
    for (std::size_t j = 0; j < cube.num_bins; ++j) sum += cube.counts[h * cube.num_bins + j];
    cube.totals[h] = static_cast<std::uint32_t>(sum);
  }
  return cube;
}

void save_cube(const HistogramCube& cube, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot open " + path.string() + " for writing");
  write_cube(cube, out);
}

HistogramCube load_cube(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  return read_cube(in);
}

std::vector<std::uint32_t> simulate_cube_to_file(const Scene& scene, const SystemConfig& cfg,
                                                 const LookupTable& lut, std::uint64_t seed,
                                                 const CubeOptions& options,
                                                 const std::filesystem::path& path) {
  const std::size_t pixels = scene.pixels();
  std::vector<std::uint32_t> totals(pixels * cfg.num_realizations, 0);
  CubeFileWriter writer(path, CubeHeader{scene.height, scene.width, cfg.num_bins, cfg.num_realizations});
  const std::size_t n_b = cfg.num_bins;
  simulate_cube_rows(scene, cfg, lut, seed, options, [&](const CubeRow& row) {
    const std::size_t first_pixel = static_cast<std::size_t>(row.row) * scene.width;
    for (std::uint32_t r = 0; r < cfg.num_realizations; ++r) {
      const std::size_t offset = static_cast<std::size_t>(r) * scene.width;
      std::copy_n(row.totals.begin() + static_cast<std::ptrdiff_t>(offset), scene.width,
                  totals.begin() + static_cast<std::ptrdiff_t>(r * pixels + first_pixel));
      writer.write_block(r, first_pixel, row.counts.subspan(offset * n_b, scene.width * n_b));
    }
  });
  writer.close();
  return totals;
}

}  // namespace mars::synth
