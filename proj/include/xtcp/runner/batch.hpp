#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "xtcp/metrics/metrics.hpp"
#include "xtcp/runner/simulation.hpp"
#include "xtcp/scenario/scenario.hpp"

namespace xtcp {

/// Flavor assignment for one batch arm. "xtcp" puts every UE on X-TCP;
/// "xtcp+cubic" assigns flavors to UEs in order.
struct CcVariant {
  std::string label;
  std::vector<CcFlavor> flavors;
};

/// Throws ConfigError for an unknown flavor name.
CcVariant parse_cc_variant(const std::string& text);
void apply_variant(Scenario& sc, const CcVariant& v);

struct BatchConfig {
  std::size_t runs = 1;
  std::uint64_t seed_base = 1;
  std::vector<CcVariant> variants;  // empty: the scenario's own flavors
  // Every seed also runs with UE 0 and UE 1 trajectories exchanged.
  bool swap_pairing = false;
  unsigned jobs = 1;
  std::string out_dir;  // empty: nothing written
};

struct BatchRun {
  std::string variant;
  std::uint64_t seed = 0;
  bool swapped = false;
  RunSummaryValues summary;
  std::uint64_t invariant_violations = 0;
};

struct BatchResult {
  std::vector<BatchRun> runs;  // ordered by (variant, seed, swapped)

  /// Values of one metric over the runs of a variant.
  std::vector<double> values(const std::string& variant, const std::string& metric) const;
  Summary summary(const std::string& variant, const std::string& metric) const;
  /// `scenario,cc,metric,mean,ci95,n`, one row per variant and metric.
  std::string summary_csv(const std::string& scenario_name) const;
};

/// Builds the scenario for a seed. Random geometry is re-drawn per seed by
/// the factory, so every variant sees the same world for the same seed.
using ScenarioFactory = std::function<Scenario(std::uint64_t seed)>;

/// Factory that reuses a fixed scenario with the seed replaced.
ScenarioFactory reseed_factory(Scenario base);

/// Runs all (variant, seed, swap) combinations. Runs are independent and
/// deterministic, so results do not depend on `jobs`.
BatchResult run_batch(const ScenarioFactory& factory, const BatchConfig& cfg);

}  // namespace xtcp
