#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mars/error.hpp"
#include "mars/eval/benchmark.hpp"
#include "mars/eval/validation.hpp"

namespace mars::eval {
namespace {

TEST(DeskGrid, TwelveDistinctCells) {
  SystemConfig base;
  base.num_bins = 64;
  const auto cells = desk_grid(base);
  ASSERT_EQ(cells.size(), 12u);
  std::set<std::string> labels;
  for (const auto& c : cells) {
    labels.insert(c.label);
    EXPECT_EQ(c.cfg.num_bins, 64u);
    EXPECT_EQ(c.cfg.num_pulses, 1000u);
    EXPECT_DOUBLE_EQ(c.cfg.rep_period, 100e-9);
  }
  EXPECT_EQ(labels.size(), 12u);
  EXPECT_EQ(cells.back().label, "S=8.2;B=1.2;t_d=75ns");
}

TEST(Validate, SmallGridOrderingAndDeterminism) {
  SystemConfig base;
  base.num_bins = 64;
  auto cells = desk_grid(base);
  cells.resize(2);
  const ValidationOptions one{.oracle_realizations = 600, .threads = 1, .law = {}};
  const ValidationOptions two{.oracle_realizations = 600, .threads = 2, .law = {}};
  const MetricReport report = validate(cells, 3, one);
  ASSERT_EQ(report.rows.size(), 6u);
  const MetricValues mars = report.average("mars");
  const MetricValues poisson = report.average("poisson");
  EXPECT_LT(mars.wasserstein, poisson.wasserstein);
  EXPECT_LT(mars.mean_diff, poisson.mean_diff);
  std::stringstream a;
  std::stringstream b;
  write_report_csv(report, a);
  write_report_csv(validate(cells, 3, two), b);
  EXPECT_EQ(a.str(), b.str());
  std::string header;
  std::getline(a, header);
  EXPECT_EQ(header, "cell,method,model_mean,model_var,oracle_mean,oracle_var,wasserstein,kl,mean_diff,var_diff");
  std::stringstream js;
  write_report_json(report, js);
  const auto doc = nlohmann::json::parse(js.str());
  EXPECT_TRUE(doc.is_object());
}

TEST(Bench, LogLogSlope) {
  const std::vector<double> x{1, 10, 100};
  EXPECT_NEAR(loglog_slope(x, {2, 2, 2}), 0.0, 1e-12);
  EXPECT_NEAR(loglog_slope(x, {3, 30, 300}), 1.0, 1e-12);
  EXPECT_NEAR(loglog_slope(x, {1, 100, 10000}), 2.0, 1e-12);
  EXPECT_EQ(classify_slope(0.05), GrowthClass::constant);
  EXPECT_EQ(classify_slope(0.9), GrowthClass::linear);
  EXPECT_EQ(classify_slope(1.7), GrowthClass::superlinear);
  EXPECT_THROW(loglog_slope({1.0}, {1.0}), Error);
}

TEST(Bench, CellConfigKeepsSignalToBackground) {
  BenchSuite suite;
  suite.sbr = 4.0;
  const SystemConfig cfg = cell_config(suite, Axis::flux, 10.0);
  EXPECT_NEAR(cfg.signal, 8.0, 1e-12);
  EXPECT_NEAR(cfg.background, 2.0, 1e-12);
  EXPECT_EQ(cell_config(suite, Axis::realizations, 7.0).num_realizations, 7u);
}

TEST(Bench, ParseSuite) {
  const BenchSuite suite = parse_suite(R"({"base": {"n_b": 64, "N_iter": 2}, "repeats": 2,
      "curves": [{"simulator": "mars", "axis": "flux", "values": [0.5, 5]},
                 {"simulator": "poisson", "axis": "pixels", "values": [1, 4]}]})");
  EXPECT_EQ(suite.base.num_bins, 64u);
  EXPECT_EQ(suite.repeats, 2u);
  ASSERT_EQ(suite.curves.size(), 2u);
  EXPECT_EQ(suite.curves[1].simulator, Simulator::poisson);
  EXPECT_EQ(suite.curves[1].axis, Axis::pixels);
  EXPECT_THROW(parse_suite(R"({"curves": [{"simulator": "magic", "axis": "flux", "values": [1]}]})"), Error);
  EXPECT_THROW(parse_suite(R"({"repeats": 1})"), Error);
}

TEST(Bench, RunTinySuite) {
  BenchSuite suite = parse_suite(R"({"base": {"n_b": 32, "N_iter": 2, "N_r": 50}, "repeats": 1,
      "curves": [{"simulator": "mars", "axis": "flux", "values": [0.5, 5]},
                 {"simulator": "sequential", "axis": "realizations", "values": [1, 4]}]})");
  const BenchReport report = run_benchmark(suite);
  ASSERT_EQ(report.curves.size(), 2u);
  for (const auto& curve : report.curves) {
    ASSERT_EQ(curve.cells.size(), 2u);
    for (const auto& cell : curve.cells) EXPECT_GT(cell.median_seconds, 0.0);
  }
  std::stringstream csv;
  write_bench_csv(report, csv);
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header, "simulator,axis,value,median_seconds,slope,growth");
  std::stringstream js;
  write_bench_json(report, js);
  EXPECT_TRUE(nlohmann::json::parse(js.str()).contains("host"));
  EXPECT_FALSE(host_descriptor().empty());
}

}  // namespace
}  // namespace mars::eval
