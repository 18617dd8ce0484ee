#include "mars/eval/validation.hpp"

#include <ostream>
#include <sstream>

#include <json.hpp>

#include "mars/error.hpp"
#include "mars/oracle/baselines.hpp"
#include "mars/oracle/sequential.hpp"

namespace mars::eval {

namespace {

std::string cell_label(const SystemConfig& cfg) {
  std::ostringstream os;
  os << "S=" << cfg.signal << ";B=" << cfg.background << ";t_d=" << cfg.dead_time * 1e9 << "ns";
  return os.str();
}

}  // namespace

std::vector<ValidationCell> desk_grid(const SystemConfig& base) {
  std::vector<ValidationCell> cells;
  for (double s : {0.5, 2.0, 8.2}) {
    for (double b : {0.2, 1.2}) {
      for (double td : {25e-9, 75e-9}) {
        SystemConfig cfg = base;
        cfg.rep_period = 100e-9;
        cfg.num_pulses = 1000;
        cfg.signal = s;
        cfg.background = b;
        cfg.dead_time = td;
        cells.push_back({cell_label(cfg), cfg});
      }
    }
  }
  return cells;
}

MetricValues MetricReport::average(const std::string& method) const {
  MetricValues sum;
  std::size_t n = 0;
  for (const MetricRow& row : rows) {
    if (row.method != method) continue;
    sum.wasserstein += row.values.wasserstein;
    sum.kl += row.values.kl;
    sum.mean_diff += row.values.mean_diff;
    sum.var_diff += row.values.var_diff;
    ++n;
  }
  if (n == 0) throw Error(ErrorCode::domain, "no rows for method '" + method + "'");
  const double k = static_cast<double>(n);
  return {sum.wasserstein / k, sum.kl / k, sum.mean_diff / k, sum.var_diff / k};
}

MetricReport validate(const std::vector<ValidationCell>& cells, std::uint64_t seed,
                      const ValidationOptions& options) {
  MetricReport report;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    SystemConfig cfg = cells[c].cfg;
    cfg.num_realizations = options.oracle_realizations;
    oracle::SequentialOptions so;
    so.threads = options.threads;
    so.stream = c;
    const oracle::SequentialResult gold = oracle::sequential_simulate(cfg, seed, so);
    const SampleMoments observed = sample_moments(gold.totals);

    const mrp::CountLaw mars = mrp::count_law(cfg, options.law);
    const oracle::RenewalLaw renewal = oracle::renewal_law(cfg);
    const double poisson = cfg.total_flux() * static_cast<double>(cfg.num_pulses);
    const std::pair<double, double> laws[] = {
        {mars.count_mean, mars.count_var},
        {renewal.count_mean, renewal.count_var},
        {poisson, poisson},
    };
    for (std::size_t m = 0; m < kMethods.size(); ++m) {
      MetricRow row;
      row.cell = cells[c].label;
      row.method = kMethods[m];
      row.model_mean = laws[m].first;
      row.model_var = laws[m].second;
      row.oracle_mean = observed.mean;
      row.oracle_var = observed.variance;
      row.values = compare(gold.totals, row.model_mean, row.model_var);
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

void write_report_csv(const MetricReport& report, std::ostream& out) {
  out << "cell,method,model_mean,model_var,oracle_mean,oracle_var,wasserstein,kl,mean_diff,var_diff\n";
  out.precision(10);
  for (const MetricRow& r : report.rows) {
    out << r.cell << ',' << r.method << ',' << r.model_mean << ',' << r.model_var << ','
        << r.oracle_mean << ',' << r.oracle_var << ',' << r.values.wasserstein << ',' << r.values.kl
        << ',' << r.values.mean_diff << ',' << r.values.var_diff << '\n';
  }
}

void write_report_json(const MetricReport& report, std::ostream& out) {
  using nlohmann::json;
  const auto to_json = [](const MetricValues& v) {
    return json{{"wasserstein", v.wasserstein}, {"kl", v.kl}, {"mean_diff", v.mean_diff}, {"var_diff", v.var_diff}};
  };
  json rows = json::array();
  for (const MetricRow& r : report.rows) {
    json row = to_json(r.values);
    row["cell"] = r.cell;
    row["method"] = r.method;
    row["model_mean"] = r.model_mean;
    row["model_var"] = r.model_var;
    row["oracle_mean"] = r.oracle_mean;
    row["oracle_var"] = r.oracle_var;
    rows.push_back(std::move(row));
  }
  json average = json::object();
  for (const std::string& m : kMethods) {
    bool present = false;
    for (const MetricRow& r : report.rows) present = present || r.method == m;
    if (present) average[m] = to_json(report.average(m));
  }
  out << json{{"rows", rows}, {"average", average}}.dump(2) << '\n';
}

}  // namespace mars::eval
