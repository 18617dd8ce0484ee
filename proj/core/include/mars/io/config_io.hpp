#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "mars/config.hpp"

namespace mars::io {

/// Seconds per unit for "s", "ms", "us", "ns" and "ps".
double time_unit_scale(std::string_view unit);

/// Parses a configuration document. Keys: t_r, N_r, sigma_t, t_d, n_b, tau,
/// S, B, N_iter, plus an optional "units": {"time": "ns"} that rescales
/// t_r, sigma_t, t_d and tau. Missing keys keep their defaults. A non-empty
/// `unit_override` takes precedence over the document's own unit.
SystemConfig parse_config(std::string_view json_text, std::string_view unit_override = {});

SystemConfig load_config(const std::filesystem::path& path, std::string_view unit_override = {});

/// Serializes in seconds, without a "units" key.
std::string config_to_json(const SystemConfig& cfg);

}  // namespace mars::io
