// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mars/eval/benchmark.hpp"
#include "mars/eval/metrics.hpp"
#include "mars/eval/validation.hpp"
#include "mars/markov/eigenpairs.hpp"
#include "mars/mrp/count_law.hpp"
#include "mars/oracle/baselines.hpp"
#include "mars/oracle/sequential.hpp"
#include "mars/synth/cube.hpp"
#include "mars/synth/lookup_table.hpp"
#include "mars/synth/sampling.hpp"

namespace {

using namespace mars;
using Clock = std::chrono::steady_clock;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

SystemConfig reference_regime(std::uint32_t n_b) {
  SystemConfig cfg;
  cfg.rep_period = 100e-9;
  cfg.pulse_width = 1e-9;
  cfg.dead_time = 75e-9;
  cfg.delay = 50e-9;
  cfg.signal = 8.2;
  cfg.background = 1.2;
  cfg.num_pulses = 1000;
  cfg.num_bins = n_b;
  return cfg;
}

// 1. Without dead time the count is Poisson(Lambda N_r).
void poisson_limit(Outcome& out) {
  for (double lam : {0.5, 2.0, 10.0}) {
    SystemConfig cfg = reference_regime(4096);
    cfg.dead_time = 0.0;
    cfg.signal = 0.0;
    cfg.background = lam;
    const auto start = Clock::now();
    const auto law = mrp::count_law(cfg);
    const double t = seconds(start);
    const double want = lam * static_cast<double>(cfg.num_pulses);
    const double em = rel(law.count_mean, want);
    const double ev = rel(law.count_var, want);
    out.detail << " L=" << lam << ": mean err " << em << ", var err " << ev << ", " << t << " s;";
    out.require(em <= 5e-3 && ev <= 5e-3, "moments within 0.5% at Lambda " + std::to_string(lam));
    out.require(t < 5.0, "runtime under 5 s at Lambda " + std::to_string(lam));
  }
}

// 2. Constant flux with dead time is a delayed renewal process.
void renewal_limit(Outcome& out) {
  for (double x : {0.1, 0.75, 2.0}) {
    SystemConfig cfg = reference_regime(4096);
    cfg.signal = 0.0;
    cfg.background = 2.0;
    const double lambda0 = cfg.background / cfg.rep_period;
    cfg.dead_time = x / lambda0;
    const auto law = mrp::count_law(cfg);
    const double t = cfg.exposure();
    const double mean = lambda0 * t / (1.0 + x);
    const double var = lambda0 * t / std::pow(1.0 + x, 3);
    const double em = rel(law.count_mean, mean);
    const double ev = rel(law.count_var, var);
    out.detail << " l0*td=" << x << ": mean err " << em << ", var err " << ev << ";";
    out.require(em <= 0.01 && ev <= 0.05, "renewal moments at lambda0 t_d = " + std::to_string(x));
  }
}

// 3. Count law against the per-photon oracle at the reference regime.
void oracle_agreement(Outcome& out) {
  SystemConfig cfg = reference_regime(4096);
  cfg.num_realizations = 10000;
  const auto start = Clock::now();
  const auto law = mrp::count_law(cfg);
  const auto sim = oracle::sequential_simulate(cfg, 2024, {.keep_traces = false, .threads = 0, .stream = 0});
  const double t = seconds(start);
  const auto m = eval::sample_moments(sim.totals);
  const auto emp = eval::IntegerPmf::from_samples(sim.totals);
  const double w1 = eval::wasserstein_1(emp, eval::discretize_gaussian_over(emp, law.count_mean, law.count_var));
  const double em = rel(law.count_mean, m.mean);
  const double ratio = law.count_var / m.variance;
  out.detail << " model " << law.count_mean << "/" << law.count_var << " vs oracle " << m.mean << "/"
             << m.variance << "; mean err " << em << ", var ratio " << ratio << ", W1 " << w1 << ", " << t
             << " s";
  out.require(em <= 0.01, "mean within 1%");
  out.require(ratio >= 0.9 && ratio <= 1.1, "variance ratio in [0.9, 1.1]");
  out.require(w1 <= 1.0, "Wasserstein-1 at most 1 count");
  out.require(t < 600.0, "runtime under 10 min");
}

double median_time(const std::function<void()>& fn, int repeats) {
  std::vector<double> t;
  for (int k = 0; k < repeats; ++k) {
    const auto start = Clock::now();
    fn();
    t.push_back(seconds(start));
  }
  std::sort(t.begin(), t.end());
  return t[t.size() / 2];
}

// 4. Six explicit lags plus a five-mode tail replace the 200-lag sum.
void spectral_truncation(Outcome& out) {
  double worst = 0.0;
  double slowest_ratio = 1e300;
  SystemConfig base = reference_regime(4096);
  for (const auto& cell : eval::desk_grid(base)) {
    const auto op = markov::build_transition(cell.cfg);
    const auto pdf = markov::stationary_pdf(op);
    const mrp::MomentKernels kernels(op);
    const double mu = mrp::effective_mean(pdf, kernels);
    const auto eig = markov::leading_eigenpairs(op, pdf, 5);
    const auto proj = mrp::centered_projections(pdf, kernels, mu);
    double full = 0.0;
    double hat = 0.0;
    const double t_full = median_time(
        [&] {
          const auto g = mrp::lag_covariances(op, proj, 200);
          full = std::accumulate(g.begin(), g.end(), 0.0);
        },
        5);
    const double t_hat = median_time(
        [&] {
          const auto g = mrp::lag_covariances(op, proj, 6);
          hat = std::accumulate(g.begin(), g.end(), 0.0) + mrp::spectral_tail(eig, proj, 6);
        },
        5);
    const double t2 = cell.cfg.rep_period * cell.cfg.rep_period;
    const double err = std::abs(hat - full);
    const double bound = 1e-3 * std::abs(full) + 1e-12 * t2;
    worst = std::max(worst, err / bound);
    slowest_ratio = std::min(slowest_ratio, t_full / t_hat);
    out.require(err <= bound, "truncation error at " + cell.label);
  }
  out.detail << " worst error / bound " << worst << ", min speedup " << slowest_ratio << "x";
  out.require(slowest_ratio >= 10.0, "estimate at least 10x faster than the 200-lag sum");
}

// 5. Moments are invariant to the delay and the pdf shifts with it.
void delay_invariance(Outcome& out) {
  SystemConfig cfg = reference_regime(1024);
  cfg.delay = 0.25 * cfg.rep_period;
  const auto base = mrp::solve_model(cfg);
  for (std::int64_t k : {std::int64_t{1}, std::int64_t{7}, std::int64_t{512}}) {
    SystemConfig moved = cfg;
    moved.delay = cfg.delay + static_cast<double>(k) * cfg.bin_width();
    const auto sol = mrp::solve_model(moved);
    const auto shifted = synth::shift_pdf(base.pdf, k);
    double l1 = 0.0;
    for (std::size_t j = 0; j < shifted.pi.size(); ++j) l1 += std::abs(shifted.pi[j] - sol.pdf.pi[j]);
    const double emu = rel(sol.law.mu, base.law.mu);
    const double es = rel(sol.law.sigma2, base.law.sigma2);
    out.detail << " k=" << k << ": mu " << emu << ", sigma2 " << es << ", pi L1 " << l1 << ";";
    out.require(emu <= 1e-10 && es <= 1e-10, "moments invariant at k = " + std::to_string(k));
    out.require(l1 <= 1e-9, "shifted pdf at k = " + std::to_string(k));
  }
}

// 6. Implicit matvecs against dense products.
void operator_equivalence(Outcome& out) {
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (std::uint32_t n_b : {128u, 512u}) {
    const SystemConfig cfg = reference_regime(n_b);
    const auto op = markov::build_transition(
        cfg, {.implicit_threshold = 0, .representation = markov::Representation::implicit});
    const Eigen::MatrixXd dense = op.to_dense();
    for (int trial = 0; trial < 50; ++trial) {
      Eigen::VectorXd v(n_b);
      for (auto& x : v) x = u(gen);
      const std::span<const double> vs(v.data(), n_b);
      const auto left = op.left_apply(vs);
      const auto right = op.right_apply(vs);
      const Eigen::VectorXd l_ref = dense.transpose() * v;
      const Eigen::VectorXd r_ref = dense * v;
      worst = std::max(worst, (Eigen::Map<const Eigen::VectorXd>(left.data(), n_b) - l_ref).norm() / l_ref.norm());
      worst = std::max(worst, (Eigen::Map<const Eigen::VectorXd>(right.data(), n_b) - r_ref).norm() / r_ref.norm());
    }
  }
  out.detail << " worst relative error " << worst;
  out.require(worst <= 1e-12, "matvecs within 1e-12");
}

// 7. Grid-averaged metric ordering MaRS < renewal < Poisson.
void metric_ordering(Outcome& out) {
  const auto start = Clock::now();
  const auto report = eval::validate(eval::desk_grid(reference_regime(1024)), 7,
                                     {.oracle_realizations = 10000, .threads = 0, .law = {}});
  const auto m = report.average("mars");
  const auto r = report.average("renewal");
  const auto p = report.average("poisson");
  out.detail << " W1 " << m.wasserstein << " < " << r.wasserstein << " < " << p.wasserstein << "; KL " << m.kl
             << " < " << r.kl << " < " << p.kl << "; mean " << m.mean_diff << " < " << r.mean_diff << " < "
             << p.mean_diff << "; var " << m.var_diff << " < " << r.var_diff << " < " << p.var_diff << "; "
             << seconds(start) << " s";
  out.require(m.wasserstein < r.wasserstein && r.wasserstein < p.wasserstein, "Wasserstein ordering");
  out.require(m.kl < r.kl && r.kl < p.kl, "KL ordering");
  out.require(m.mean_diff < r.mean_diff && r.mean_diff < p.mean_diff, "mean diff ordering");
  out.require(m.var_diff < r.var_diff && r.var_diff < p.var_diff, "var diff ordering");
}

// 8. Runtime ratio at Lambda = 10 and flux scaling slopes.
void runtime_ratios(Outcome& out) {
  eval::BenchSuite suite;
  suite.base = reference_regime(1024);
  suite.base.num_realizations = 100;
  suite.repeats = 7;
  suite.threads = 1;
  const std::vector<double> flux{0.5, 2.0, 10.0, 50.0};
  std::vector<double> mars_t;
  std::vector<double> oracle_t;
  for (double lam : flux) {
    mars_t.push_back(eval::time_cell(eval::prepare_cell(suite, eval::Simulator::mars, eval::Axis::flux, lam),
                                     suite.repeats)
                         .median_seconds);
    oracle_t.push_back(eval::time_cell(
                           eval::prepare_cell(suite, eval::Simulator::sequential, eval::Axis::flux, lam),
                           lam >= 10.0 ? 3 : suite.repeats)
                           .median_seconds);
  }
  const double ratio = oracle_t[2] / mars_t[2];
  const double mars_slope = eval::loglog_slope(flux, mars_t);
  const double oracle_slope = eval::loglog_slope(flux, oracle_t);
  out.detail << " at Lambda 10: mars " << mars_t[2] * 1e3 << " ms, oracle " << oracle_t[2] * 1e3
             << " ms, ratio " << ratio << "x; slopes mars " << mars_slope << ", oracle " << oracle_slope;
  out.require(ratio >= 10.0, "MaRS at least 10x faster than the oracle at Lambda 10");
  out.require(mars_slope < 0.2, "MaRS flux slope below 0.2");
  out.require(oracle_slope > 0.8, "oracle flux slope above 0.8");
}

// 9. Cube totals match the oracle law; histograms sum to their totals.
void cube_fidelity(Outcome& out) {
  SystemConfig cfg = reference_regime(1024);
  cfg.num_realizations = 100;
  const auto scene = synth::Scene::uniform(cfg, 64, 64);
  const auto lut = synth::build_lut(cfg, {cfg.signal}, {cfg.background});
  std::vector<std::uint32_t> pooled;
  pooled.reserve(scene.pixels() * cfg.num_realizations);
  std::size_t bad_sums = 0;
  synth::simulate_cube_rows(scene, cfg, lut, 99, {}, [&](const synth::CubeRow& row) {
    for (std::size_t k = 0; k < row.totals.size(); ++k) {
      const auto first = row.counts.begin() + static_cast<std::ptrdiff_t>(k * cfg.num_bins);
      if (std::accumulate(first, first + cfg.num_bins, 0u) != row.totals[k]) ++bad_sums;
      pooled.push_back(row.totals[k]);
    }
  });
  SystemConfig oracle_cfg = cfg;
  oracle_cfg.num_realizations = 10000;
  const auto sim = oracle::sequential_simulate(oracle_cfg, 100, {.keep_traces = false, .threads = 0, .stream = 0});
  const auto ks = eval::ks_two_sample(pooled, sim.totals);
  const auto mc = eval::sample_moments(pooled);
  const auto mo = eval::sample_moments(sim.totals);
  out.detail << " " << pooled.size() << " cube totals (mean " << mc.mean << ", var " << mc.variance << ") vs "
             << sim.totals.size() << " oracle totals (mean " << mo.mean << ", var " << mo.variance << "): D "
             << ks.statistic << ", p " << ks.p_value << "; histograms with wrong sums " << bad_sums;
  out.require(!ks.rejects(0.01), "KS does not reject at alpha 0.01");
  out.require(bad_sums == 0, "bin sums equal drawn counts");
}

// 10. Same seed, any thread count: identical artifacts.
std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Sidecars carry the run's wall time; everything else must match.
std::string without_wall_time(const fs::path& p) {
  auto doc = nlohmann::json::parse(read_file(p));
  doc.erase("wall_time_seconds");
  return doc.dump();
}

#ifdef MARS_CLI_PATH
int run_cli(const fs::path& dir, const std::string& args) {
  const std::string cmd = "cd '" + dir.string() + "' && '" MARS_CLI_PATH "' " + args + " > /dev/null 2> err.txt";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void determinism(Outcome& out) {
  const fs::path dir = fs::temp_directory_path() / "mars_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "cfg.json") << R"({"t_r": 100, "sigma_t": 1, "t_d": 75, "tau": 50, "n_b": 256,
      "N_r": 1000, "N_iter": 20, "S": 8.2, "B": 1.2, "units": {"time": "ns"}})";
  std::ofstream(dir / "scene.json") << R"({"height": 4, "width": 5, "background": 1.2, "units": {"time": "ns"},
      "delay": [5, 10, 15, 20, 25, 30, 35, 40, 45, 50, 55, 60, 65, 70, 75, 80, 85, 90, 95, 99],
      "reflectivity": [0.5, 1, 2, 4, 8.2, 0.5, 1, 2, 4, 8.2, 0.5, 1, 2, 4, 8.2, 0.5, 1, 2, 4, 8.2]})";
  std::ofstream(dir / "cells.json") << R"([{"S": 8.2, "B": 1.2}, {"S": 0.5, "B": 0.2, "t_d": 25, "units": {"time": "ns"}}])";
  int compared = 0;
  auto same = [&](const std::string& label, const std::string& a, const std::string& b) {
    ++compared;
    out.require(!a.empty() && a == b, label);
  };
  const std::vector<std::string> engines{"mars", "sequential", "poisson"};
  for (const auto& engine : engines) {
    std::vector<std::string> runs;
    for (const char* threads : {"1", "4", "4"}) {
      const std::string tag = engine + "_" + threads + "_" + std::to_string(runs.size());
      const int rc = run_cli(dir, "simulate --config cfg.json --scene scene.json --engine " + engine +
                                      " --seed 5 --threads " + threads + " --out " + tag);
      out.require(rc == 0, "simulate " + engine + " exit code");
      runs.push_back(tag);
    }
    for (std::size_t k = 1; k < runs.size(); ++k) {
      same("cube " + engine, read_file(dir / runs[0] / "histograms.mcub"), read_file(dir / runs[k] / "histograms.mcub"));
      same("sidecar " + engine, without_wall_time(dir / runs[0] / "histograms.json"),
           without_wall_time(dir / runs[k] / "histograms.json"));
    }
  }
  for (const char* threads : {"1", "4"}) {
    const std::string t(threads);
    out.require(run_cli(dir, "build-lut --config cfg.json --grid S=0.5:8.2:4,B=0.2:1.2:3 --threads " + t +
                                 " --out t" + t + "/table.mlut") == 0,
                "build-lut exit code");
    out.require(run_cli(dir, "validate --config cfg.json --cells cells.json --realizations 500 --seed 3 --threads " +
                                 t + " --out v" + t) == 0,
                "validate exit code");
    out.require(run_cli(dir, "simulate --config cfg.json --scene scene.json --lut t1/table.mlut --lookup bilinear "
                             "--seed 5 --threads " + t + " --out l" + t) == 0,
                "simulate with table exit code");
  }
  same("lookup table", read_file(dir / "t1/table.mlut"), read_file(dir / "t4/table.mlut"));
  same("validation csv", read_file(dir / "v1/report.csv"), read_file(dir / "v4/report.csv"));
  same("validation json", read_file(dir / "v1/report.json"), read_file(dir / "v4/report.json"));
  same("cube from table", read_file(dir / "l1/histograms.mcub"), read_file(dir / "l4/histograms.mcub"));
  out.detail << " " << compared << " artifact pairs compared across --threads 1 and 4";
  fs::remove_all(dir);
}
#else
void determinism(Outcome& out) {
  out.require(false, "command-line tool not built; configure with MARS_BUILD_TOOLS=ON");
}
#endif

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    void (*run)(Outcome&);
  };
  const Criterion criteria[] = {
      {"AC1 Poisson limit", poisson_limit},
      {"AC2 renewal limit", renewal_limit},
      {"AC3 oracle agreement", oracle_agreement},
      {"AC4 spectral truncation", spectral_truncation},
      {"AC5 delay invariance", delay_invariance},
      {"AC6 operator equivalence", operator_equivalence},
      {"AC7 metric ordering", metric_ordering},
      {"AC8 runtime ratios", runtime_ratios},
      {"AC9 cube fidelity", cube_fidelity},
      {"AC10 determinism", determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome out;
    try {
      c.run(out);
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail << " [exception: " << e.what() << "]";
    }
    if (!out.pass) ++failures;
    std::cout << (out.pass ? "PASS " : "FAIL ") << c.name << ":" << out.detail.str() << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
