#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "xtcp/app/traffic.hpp"
#include "xtcp/channel/channel.hpp"
#include "xtcp/geometry/geometry.hpp"
#include "xtcp/phy/phy_mac.hpp"
#include "xtcp/rlc/rlc_am.hpp"
#include "xtcp/tcp/congestion_control.hpp"
#include "xtcp/tcp/tcp_endpoint.hpp"

namespace xtcp {

/// Obstacles drawn per run from the "obstacles" stream of the run seed.
struct RandomObstacles {
  std::size_t count_min = 0;
  std::size_t count_max = 0;
  SizeRange sizes;
  std::vector<Obstacle> keep_out;
};

struct UeSpec {
  Trajectory trajectory;
  CcFlavor cc = CcFlavor::Xtcp;
};

struct OutputConfig {
  SimTime sample_period = SimTime::from_ms(10);
  SimTime goodput_window = SimTime::from_ms(100);
  bool sinr_trace = false;
  bool dci_trace = false;
  bool flow_trace = false;
  // Checks RLC byte conservation after every event (slow).
  bool check_invariants = false;
};

struct Scenario {
  std::string name = "custom";
  std::uint64_t seed = 1;
  SimTime duration = SimTime::from_s(60);
  SimTime warmup = SimTime::from_s(2);
  Area area{200.0, 100.0};
  Point2D enb{100.0, 50.0};
  std::vector<Obstacle> obstacles;
  std::optional<RandomObstacles> random_obstacles;
  std::vector<UeSpec> ues;
  std::vector<ForcedOutage> forced_outages;
  ChannelConfig channel;
  PhyConfig phy;
  RlcConfig rlc;
  TcpConfig tcp;
  CcParams cc;
  TrafficConfig traffic;
  OutputConfig output;

  /// Throws ConfigError naming the offending field.
  void validate() const;
  /// Fixed obstacles plus those drawn for this scenario's seed.
  std::vector<Obstacle> materialize_obstacles() const;
};

/// Parses a scenario document. Missing fields take their defaults; unknown
/// keys and ill-typed values raise ConfigError with the JSON path.
Scenario scenario_from_json(const nlohmann::json& doc);
nlohmann::json scenario_to_json(const Scenario& sc);
Scenario load_scenario_file(const std::string& path);

/// Exchanges the trajectories of UE 0 and UE 1, keeping each UE's flavor.
Scenario swap_trajectories(const Scenario& sc);

struct GenOverrides {
  std::optional<double> rate_cap_bps;
  std::optional<double> duration_s;
  std::optional<std::vector<CcFlavor>> cc;
  std::optional<double> lambda;
  std::optional<double> epsilon_ms;
};

void apply_overrides(Scenario& sc, const GenOverrides& o);

/// Valid kinds: "random-two-ue", "outage".
Scenario gen_scenario(const std::string& kind, std::uint64_t seed, const GenOverrides& overrides = {});
std::vector<std::string> scenario_kinds();

struct ScenarioBundle {
  std::string name;
  std::string description;
  std::vector<std::string> checks;
  Scenario scenario;
};

/// Directory holding the bundled scenarios: $XTCP_SCENARIO_DIR if set,
/// otherwise the directory configured at build time.
std::string scenario_dir();
std::vector<std::string> list_bundles();
/// Throws ConfigError for an unknown name.
ScenarioBundle load_bundle(const std::string& name);
/// Accepts a bundle name or a path to a scenario or bundle document.
Scenario resolve_scenario(const std::string& name_or_path);

}  // namespace xtcp
