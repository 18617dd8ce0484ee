#include "mars/io/config_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <type_traits>
#include <sstream>

#include <json.hpp>

#include "mars/error.hpp"

namespace mars::io {

namespace {

using nlohmann::json;

template <typename T>
void read_field(const json& doc, const char* key, T& field) {
  if (!doc.contains(key)) return;
  const json& v = doc.at(key);
  if (!v.is_number()) {
    throw Error(ErrorCode::invalid_config, std::string("config key '") + key + "' must be a number");
  }
  if constexpr (std::is_integral_v<T>) {
    const double x = v.get<double>();
    if (x < 0.0 || x != std::floor(x)) {
      throw Error(ErrorCode::invalid_config,
                  std::string("config key '") + key + "' must be a nonnegative integer");
    }
    field = static_cast<T>(x);
  } else {
    field = v.get<double>();
  }
}

}  // namespace

double time_unit_scale(std::string_view unit) {
  if (unit == "s") return 1.0;
  if (unit == "ms") return 1e-3;
  if (unit == "us") return 1e-6;
  if (unit == "ns") return 1e-9;
  if (unit == "ps") return 1e-12;
  throw Error(ErrorCode::invalid_config, "unknown time unit '" + std::string(unit) + "'");
}

SystemConfig parse_config(std::string_view json_text, std::string_view unit_override) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::format, std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::format, "config must be a JSON object");

  static constexpr const char* known[] = {"t_r", "N_r", "sigma_t", "t_d", "n_b", "tau",
                                          "S",   "B",   "N_iter",  "units"};
  for (const auto& item : doc.items()) {
    if (std::find(std::begin(known), std::end(known), item.key()) == std::end(known)) {
      throw Error(ErrorCode::invalid_config, "unknown config key '" + item.key() + "'");
    }
  }

  SystemConfig cfg;
  read_field(doc, "t_r", cfg.rep_period);
  read_field(doc, "N_r", cfg.num_pulses);
  read_field(doc, "sigma_t", cfg.pulse_width);
  read_field(doc, "t_d", cfg.dead_time);
  read_field(doc, "n_b", cfg.num_bins);
  read_field(doc, "tau", cfg.delay);
  read_field(doc, "S", cfg.signal);
  read_field(doc, "B", cfg.background);
  read_field(doc, "N_iter", cfg.num_realizations);

  std::string unit = "s";
  if (doc.contains("units")) {
    const json& units = doc.at("units");
    if (!units.is_object() || !units.contains("time") || !units.at("time").is_string()) {
      throw Error(ErrorCode::invalid_config, "\"units\" must look like {\"time\": \"ns\"}");
    }
    unit = units.at("time").get<std::string>();
  }
  if (!unit_override.empty()) unit = std::string(unit_override);
  const double scale = time_unit_scale(unit);
  // Only times given in the document are in its unit; defaults are seconds.
  if (doc.contains("t_r")) cfg.rep_period *= scale;
  if (doc.contains("sigma_t")) cfg.pulse_width *= scale;
  if (doc.contains("t_d")) cfg.dead_time *= scale;
  if (doc.contains("tau")) cfg.delay *= scale;
  cfg.validate();
  return cfg;
}

SystemConfig load_config(const std::filesystem::path& path, std::string_view unit_override) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open config '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), unit_override);
}

std::string config_to_json(const SystemConfig& cfg) {
  const json doc = {
      {"t_r", cfg.rep_period},     {"N_r", cfg.num_pulses}, {"sigma_t", cfg.pulse_width},
      {"t_d", cfg.dead_time},      {"n_b", cfg.num_bins},   {"tau", cfg.delay},
      {"S", cfg.signal},           {"B", cfg.background},   {"N_iter", cfg.num_realizations},
  };
  return doc.dump();
}

}  // namespace mars::io
