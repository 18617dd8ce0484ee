#include "mars/synth/lookup_table.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "mars/error.hpp"
#include "mars/io/binary.hpp"
#include "mars/parallel.hpp"
#include "mars/synth/sampling.hpp"

namespace mars::synth {

namespace {

constexpr std::uint32_t kLutVersion = 1;

bool close(double a, double b) noexcept {
  return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
}

void check_axis(const std::vector<double>& axis, const char* name) {
  if (axis.empty()) throw Error(ErrorCode::invalid_config, std::string(name) + " axis is empty");
  for (std::size_t k = 0; k < axis.size(); ++k) {
    if (!(axis[k] > 0.0) || !std::isfinite(axis[k])) {
      throw Error(ErrorCode::invalid_config, std::string(name) + " axis values must be positive");
    }
    if (k > 0 && !(axis[k] > axis[k - 1])) {
      throw Error(ErrorCode::invalid_config, std::string(name) + " axis must be strictly increasing");
    }
  }
}

std::string point_label(double s, double b) {
  std::ostringstream os;
  os.precision(17);
  os << "(S = " << s << ", B = " << b << ")";
  return os.str();
}

/// Index of the axis node closest to x in log space.
std::size_t nearest_index(const std::vector<double>& axis, double x) {
  const auto it = std::lower_bound(axis.begin(), axis.end(), x);
  if (it == axis.begin()) return 0;
  if (it == axis.end()) return axis.size() - 1;
  const std::size_t hi = static_cast<std::size_t>(it - axis.begin());
  const double lx = std::log(x);
  return (lx - std::log(axis[hi - 1]) <= std::log(axis[hi]) - lx) ? hi - 1 : hi;
}

/// Cell [k, k + 1] holding x and the weight of node k + 1.
struct Bracket {
  std::size_t lo;
  std::size_t hi;
  double weight;
};

Bracket bracket(const std::vector<double>& axis, double x, const char* name) {
  const double front = axis.front();
  const double back = axis.back();
  const double slack = 1e-12 * back;
  if (!(x >= front - slack && x <= back + slack)) {
    std::ostringstream os;
    os.precision(17);
    os << name << " = " << x << " lies outside the table axis [" << front << ", " << back << "]";
    throw Error(ErrorCode::out_of_range, os.str());
  }
  if (axis.size() == 1) return {0, 0, 0.0};
  const auto it = std::upper_bound(axis.begin(), axis.end(), x);
  std::size_t hi = static_cast<std::size_t>(it - axis.begin());
  hi = std::clamp<std::size_t>(hi, 1, axis.size() - 1);
  const std::size_t lo = hi - 1;
  const double w = std::clamp((x - axis[lo]) / (axis[hi] - axis[lo]), 0.0, 1.0);
  return {lo, hi, w};
}

}  // namespace

LutFingerprint LutFingerprint::of(const SystemConfig& cfg) noexcept {
  return {cfg.rep_period, cfg.pulse_width, cfg.dead_time, cfg.num_bins};
}

bool LutFingerprint::matches(const LutFingerprint& other) const noexcept {
  return num_bins == other.num_bins && close(rep_period, other.rep_period) &&
         close(pulse_width, other.pulse_width) && close(dead_time, other.dead_time);
}

std::vector<double> geometric_axis(double lo, double hi, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::invalid_config, "axis needs at least one point");
  if (!(lo > 0.0) || !(hi >= lo)) {
    throw Error(ErrorCode::invalid_config, "geometric axis needs 0 < lo <= hi");
  }
  if (n == 1) return {lo};
  if (!(hi > lo)) throw Error(ErrorCode::invalid_config, "geometric axis with n > 1 needs lo < hi");
  std::vector<double> axis(n);
  const double step = std::log(hi / lo) / static_cast<double>(n - 1);
  for (std::size_t k = 0; k < n; ++k) axis[k] = lo * std::exp(step * static_cast<double>(k));
  axis.front() = lo;
  axis.back() = hi;
  return axis;
}

LookupTable build_lut(const SystemConfig& base, const std::vector<double>& s_axis,
                      const std::vector<double>& b_axis, const LutBuildOptions& options) {
  check_axis(s_axis, "S");
  check_axis(b_axis, "B");
  SystemConfig canonical = base;
  canonical.delay = 0.5 * base.rep_period;
  canonical.validate();

  LookupTable lut;
  lut.fingerprint = LutFingerprint::of(canonical);
  lut.s_axis = s_axis;
  lut.b_axis = b_axis;
  lut.entries.resize(s_axis.size() * b_axis.size());
  parallel_for(lut.entries.size(), options.threads, [&](std::size_t k) {
    SystemConfig cfg = canonical;
    cfg.signal = s_axis[k / b_axis.size()];
    cfg.background = b_axis[k % b_axis.size()];
    try {
      mrp::ModelSolution model = mrp::solve_model(cfg, options.law);
      lut.entries[k] = LutEntry{std::move(model.pdf.pi), model.law.mu, model.law.sigma2};
    } catch (const Error& e) {
      throw Error(e.code(), "lookup table entry " + point_label(cfg.signal, cfg.background) +
                                " failed: " + e.what());
    }
  });
  return lut;
}

void check_fingerprint(const LookupTable& lut, const SystemConfig& cfg) {
  const LutFingerprint want = LutFingerprint::of(cfg);
  const LutFingerprint& have = lut.fingerprint;
  std::string field;
  if (have.num_bins != want.num_bins) {
    field = "n_b";
  } else if (!close(have.rep_period, want.rep_period)) {
    field = "t_r";
  } else if (!close(have.pulse_width, want.pulse_width)) {
    field = "sigma_t";
  } else if (!close(have.dead_time, want.dead_time)) {
    field = "t_d";
  }
  if (!field.empty()) {
    throw Error(ErrorCode::fingerprint_mismatch,
                "lookup table was built for a different " + field + " than the configuration");
  }
}

LutEntry lookup(const LookupTable& lut, double signal, double background, LookupMode mode) {
  if (lut.entries.empty()) throw Error(ErrorCode::format, "lookup table has no entries");
  if (mode == LookupMode::nearest) {
    if (!(signal > 0.0) || !(background > 0.0)) {
      throw Error(ErrorCode::out_of_range, "nearest lookup needs positive S and B");
    }
    return lut.at(nearest_index(lut.s_axis, signal), nearest_index(lut.b_axis, background));
  }
  const Bracket s = bracket(lut.s_axis, signal, "S");
  const Bracket b = bracket(lut.b_axis, background, "B");
  const std::array<std::pair<const LutEntry*, double>, 4> corners{{
      {&lut.at(s.lo, b.lo), (1.0 - s.weight) * (1.0 - b.weight)},
      {&lut.at(s.lo, b.hi), (1.0 - s.weight) * b.weight},
      {&lut.at(s.hi, b.lo), s.weight * (1.0 - b.weight)},
      {&lut.at(s.hi, b.hi), s.weight * b.weight},
  }};
  for (const auto& [entry, w] : corners) {
    if (w == 1.0) return *entry;
  }
  LutEntry out;
  out.pi.assign(corners[0].first->pi.size(), 0.0);
  for (const auto& [entry, w] : corners) {
    if (w == 0.0) continue;
    out.mu += w * entry->mu;
    out.sigma2 += w * entry->sigma2;
    for (std::size_t j = 0; j < out.pi.size(); ++j) out.pi[j] += w * entry->pi[j];
  }
  double total = 0.0;
  for (double p : out.pi) total += p;
  for (double& p : out.pi) p /= total;
  return out;
}

mrp::CountLaw law_from_moments(double mu, double sigma2, double exposure) {
  if (!(mu > 0.0)) throw Error(ErrorCode::domain, "mean holding time must be positive");
  mrp::CountLaw law;
  law.mu = mu;
  law.sigma2 = sigma2;
  law.exposure = exposure;
  law.count_mean = exposure / mu;
  law.count_var = exposure * sigma2 / (mu * mu * mu);
  return law;
}

std::int64_t delay_shift_bins(const SystemConfig& cfg, double tau) {
  return static_cast<std::int64_t>(std::llround((tau - 0.5 * cfg.rep_period) / cfg.bin_width()));
}

markov::TemporalPdf place_entry(const LutEntry& entry, const SystemConfig& cfg, double tau) {
  return shift_pdf(markov::TemporalPdf{entry.pi}, delay_shift_bins(cfg, tau));
}

void write_lut(const LookupTable& lut, std::ostream& out) {
  const auto& fp = lut.fingerprint;
  io::write_magic(out, "MLUT");
  io::write_u32(out, kLutVersion);
  io::write_u32(out, fp.num_bins);
  io::write_u32(out, static_cast<std::uint32_t>(lut.s_axis.size()));
  io::write_u32(out, static_cast<std::uint32_t>(lut.b_axis.size()));
  io::write_f64(out, fp.rep_period);
  io::write_f64(out, fp.pulse_width);
  io::write_f64(out, fp.dead_time);
  for (double s : lut.s_axis) io::write_f64(out, s);
  for (double b : lut.b_axis) io::write_f64(out, b);
  for (const LutEntry& e : lut.entries) {
    io::write_f64(out, e.mu);
    io::write_f64(out, e.sigma2);
    for (double p : e.pi) io::write_f64(out, p);
  }
  if (!out) throw Error(ErrorCode::io, "failed writing lookup table");
}

LookupTable read_lut(std::istream& in) {
  io::expect_magic(in, "MLUT");
  const std::uint32_t version = io::read_u32(in);
  if (version != kLutVersion) {
    throw Error(ErrorCode::format, "unsupported MLUT version " + std::to_string(version));
  }
  LookupTable lut;
  auto& fp = lut.fingerprint;
  fp.num_bins = io::read_u32(in);
  const std::uint32_t ns = io::read_u32(in);
  const std::uint32_t nb = io::read_u32(in);
  fp.rep_period = io::read_f64(in);
  fp.pulse_width = io::read_f64(in);
  fp.dead_time = io::read_f64(in);
  if (fp.num_bins == 0 || ns == 0 || nb == 0) throw Error(ErrorCode::format, "empty MLUT dimensions");
  lut.s_axis.resize(ns);
  lut.b_axis.resize(nb);
  for (double& s : lut.s_axis) s = io::read_f64(in);
  for (double& b : lut.b_axis) b = io::read_f64(in);
  lut.entries.resize(static_cast<std::size_t>(ns) * nb);
  for (LutEntry& e : lut.entries) {
    e.mu = io::read_f64(in);
    e.sigma2 = io::read_f64(in);
    e.pi.resize(fp.num_bins);
    for (double& p : e.pi) p = io::read_f64(in);
  }
  return lut;
}

void save_lut(const LookupTable& lut, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::io, "cannot open " + path.string() + " for writing");
  write_lut(lut, out);
}

LookupTable load_lut(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  return read_lut(in);
}

}  // namespace mars::synth
