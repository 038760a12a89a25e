#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "xtcp/metrics/metrics.hpp"
#include "xtcp/scenario/scenario.hpp"

namespace xtcp {

/// Per-run scalar results, in a stable order. Names are `ue<i>.<metric>`,
/// `all.<metric>` and `jain_goodput`.
using RunSummaryValues = std::vector<std::pair<std::string, double>>;

struct RunResult {
  RunSummaryValues summary;
  MetricsCollector metrics;
  std::string sinr_trace;  // CSV bodies, empty unless enabled
  std::string dci_trace;
  std::string flow_trace;
  std::uint64_t events = 0;
  std::uint64_t invariant_violations = 0;

  /// Value of a summary entry; throws ConfigError if absent.
  double value(const std::string& name) const;
};

/// Executes one deterministic simulation of the scenario.
RunResult run_simulation(const Scenario& sc);

/// Writes metrics.csv, summary.csv and any enabled traces into `dir`.
void write_run_outputs(const std::string& dir, const RunResult& result);

}  // namespace xtcp
