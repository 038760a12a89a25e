#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "xtcp/geometry/geometry.hpp"
#include "xtcp/sim/rng.hpp"
#include "xtcp/sim/sim_time.hpp"

namespace xtcp {

using UeId = std::uint32_t;

enum class LinkCondition { Los, Nlos, Outage };

std::string_view to_string(LinkCondition c);

struct LinkState {
  LinkCondition condition = LinkCondition::Los;
  double sinr_db = 0.0;
  double pathloss_db = 0.0;
};

struct ChannelConfig {
  double tx_power_dbm = 30.0;
  double carrier_ghz = 28.0;
  double bandwidth_hz = 1e9;
  double noise_figure_db = 5.0;
  double n_los = 2.0;
  double n_nlos = 3.0;
  double sigma_los_db = 4.0;
  double sigma_nlos_db = 7.8;
  bool shadowing_enabled = true;
  SimTime shadowing_correlation = SimTime::from_ms(100);
  SimTime update_period = SimTime::from_ms(1);
  double sinr_floor_db = -30.0;

  void validate() const;
};

/// Close-in free-space reference pathloss; distances below 1 m clamp to 1 m.
double pathloss_db(const ChannelConfig& cfg, double distance_m, LinkCondition condition);

/// Thermal noise over the configured bandwidth plus the receiver noise figure.
double noise_power_dbm(const ChannelConfig& cfg);

struct ForcedOutage {
  UeId ue = 0;
  SimTime start;
  SimTime duration;

  bool covers(SimTime t) const { return t >= start && t < start + duration; }
};

/// Maps UE position, blockage and forced outages to SINR over time.
///
/// State is piecewise constant over update periods: geometry, condition and
/// shadowing are evaluated at the start of the period containing t.
/// Shadowing is a unit Gauss-Markov process per UE, scaled by the sigma of
/// the current condition. Interference is zero (single cell).
class Channel {
 public:
  Channel(ChannelConfig cfg, Point2D enb, std::vector<Obstacle> obstacles,
          std::vector<Trajectory> ues, std::vector<ForcedOutage> outages, std::uint64_t seed);

  /// Throws ConfigError for an unknown UE.
  LinkState sinr_at(UeId ue, SimTime t);

  const ChannelConfig& config() const { return cfg_; }
  std::size_t ue_count() const { return ues_.size(); }
  const std::vector<Obstacle>& obstacles() const { return obstacles_; }
  Point2D enb() const { return enb_; }
  Point2D ue_position(UeId ue, SimTime t) const;

 private:
  struct UeChannel {
    Trajectory trajectory;
    RngStream rng;
    std::vector<double> unit_shadowing;  // indexed by update step
    std::uint64_t cached_step = ~std::uint64_t{0};
    LinkState cached;
  };

  double unit_shadowing(UeChannel& ue, std::uint64_t step);

  ChannelConfig cfg_;
  Point2D enb_;
  std::vector<Obstacle> obstacles_;
  std::vector<UeChannel> ues_;
  std::vector<ForcedOutage> outages_;
  double noise_dbm_;
  double rho_;
};

}  // namespace xtcp
