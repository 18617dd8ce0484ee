#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mars/config.hpp"
#include "mars/eval/metrics.hpp"
#include "mars/mrp/count_law.hpp"

namespace mars::eval {

struct ValidationCell {
  std::string label;
  SystemConfig cfg;
};

/// S in {0.5, 2, 8.2} x B in {0.2, 1.2} x t_d in {25, 75} ns with t_r = 100 ns
/// and N_r = 1000; the remaining fields come from `base`.
std::vector<ValidationCell> desk_grid(const SystemConfig& base);

/// Methods compared against the oracle, in report order.
inline const std::vector<std::string> kMethods = {"mars", "renewal", "poisson"};

struct MetricRow {
  std::string cell;
  std::string method;
  double model_mean = 0.0;
  double model_var = 0.0;
  double oracle_mean = 0.0;
  double oracle_var = 0.0;
  MetricValues values;
};

struct MetricReport {
  std::vector<MetricRow> rows;

  /// Grid average of one method's metrics; throws domain for an unknown method.
  MetricValues average(const std::string& method) const;
};

struct ValidationOptions {
  std::uint32_t oracle_realizations = 10000;
  unsigned threads = 0;
  mrp::CountLawOptions law;
};

/// Runs the sequential oracle on each cell (cell k on stream k) and scores
/// the MaRS, renewal and Poisson count laws against its totals. The Poisson
/// law is Normal(Lambda N_r, Lambda N_r).
MetricReport validate(const std::vector<ValidationCell>& cells, std::uint64_t seed,
                      const ValidationOptions& options = {});

/// Header: cell,method,model_mean,model_var,oracle_mean,oracle_var,wasserstein,kl,mean_diff,var_diff.
void write_report_csv(const MetricReport& report, std::ostream& out);

/// {"rows": [...], "average": {method: {...}}}.
void write_report_json(const MetricReport& report, std::ostream& out);

}  // namespace mars::eval
