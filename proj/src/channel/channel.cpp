#include "xtcp/channel/channel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "xtcp/error.hpp"

namespace xtcp {

std::string_view to_string(LinkCondition c) {
  switch (c) {
    case LinkCondition::Los: return "LOS";
    case LinkCondition::Nlos: return "NLOS";
    case LinkCondition::Outage: return "OUTAGE";
  }
  return "?";
}

void ChannelConfig::validate() const {
  if (!(bandwidth_hz > 0.0)) throw ConfigError("channel.bandwidth_hz must be > 0");
  if (update_period == SimTime::zero()) throw ConfigError("channel.update_period_ms must be > 0");
  if (!(carrier_ghz > 0.0)) throw ConfigError("channel.carrier_ghz must be > 0");
  if (!(n_los > 0.0) || !(n_nlos > 0.0)) throw ConfigError("channel pathloss exponents must be > 0");
  if (sigma_los_db < 0.0 || sigma_nlos_db < 0.0) {
    throw ConfigError("channel shadowing sigmas must be >= 0");
  }
  if (!std::isfinite(tx_power_dbm) || !std::isfinite(noise_figure_db) ||
      !std::isfinite(sinr_floor_db)) {
    throw ConfigError("channel power settings must be finite");
  }
}

double pathloss_db(const ChannelConfig& cfg, double distance_m, LinkCondition condition) {
  const double d = std::max(distance_m, 1.0);
  const double n = condition == LinkCondition::Los ? cfg.n_los : cfg.n_nlos;
  return 32.4 + 20.0 * std::log10(cfg.carrier_ghz) + 10.0 * n * std::log10(d);
}

double noise_power_dbm(const ChannelConfig& cfg) {
  return -174.0 + 10.0 * std::log10(cfg.bandwidth_hz) + cfg.noise_figure_db;
}

Channel::Channel(ChannelConfig cfg, Point2D enb, std::vector<Obstacle> obstacles,
                 std::vector<Trajectory> ues, std::vector<ForcedOutage> outages,
                 std::uint64_t seed)
    : cfg_(cfg), enb_(enb), obstacles_(std::move(obstacles)), outages_(std::move(outages)) {
  cfg_.validate();
  noise_dbm_ = noise_power_dbm(cfg_);
  const double tau = cfg_.shadowing_correlation.seconds();
  rho_ = tau > 0.0 ? std::exp(-cfg_.update_period.seconds() / tau) : 0.0;
  ues_.reserve(ues.size());
  for (std::size_t i = 0; i < ues.size(); ++i) {
    ues_.push_back(UeChannel{ues[i], RngStream(seed, "shadowing/ue" + std::to_string(i)), {}, ~std::uint64_t{0}, {}});
  }
  for (const auto& o : outages_) {
    if (o.ue >= ues_.size()) {
      throw ConfigError("forced_outages: unknown ue " + std::to_string(o.ue));
    }
  }
}

double Channel::unit_shadowing(UeChannel& ue, std::uint64_t step) {
  auto& z = ue.unit_shadowing;
  if (z.empty()) z.push_back(ue.rng.normal());
  const double innovation = std::sqrt(1.0 - rho_ * rho_);
  while (z.size() <= step) z.push_back(rho_ * z.back() + innovation * ue.rng.normal());
  return z[step];
}

Point2D Channel::ue_position(UeId ue, SimTime t) const {
  if (ue >= ues_.size()) throw ConfigError("channel: unknown ue " + std::to_string(ue));
  const auto& traj = ues_[ue].trajectory;
  return position_at(traj, std::max(t, traj.start_time));
}

LinkState Channel::sinr_at(UeId ue_id, SimTime t) {
  if (ue_id >= ues_.size()) throw ConfigError("channel: unknown ue " + std::to_string(ue_id));
  for (const auto& o : outages_) {
    if (o.ue == ue_id && o.covers(t)) {
      return LinkState{LinkCondition::Outage, cfg_.sinr_floor_db, 0.0};
    }
  }
  UeChannel& ue = ues_[ue_id];
  const std::uint64_t step = t / cfg_.update_period;
  if (ue.cached_step == step) return ue.cached;
  const SimTime sample_time = cfg_.update_period * step;
  const Point2D pos = ue_position(ue_id, sample_time);
  const LinkCondition cond = is_los(pos, enb_, obstacles_) ? LinkCondition::Los : LinkCondition::Nlos;
  const double pl = pathloss_db(cfg_, distance(pos, enb_), cond);
  double shadowing = 0.0;
  if (cfg_.shadowing_enabled) {
    const double sigma = cond == LinkCondition::Los ? cfg_.sigma_los_db : cfg_.sigma_nlos_db;
    shadowing = sigma * unit_shadowing(ue, step);
  }
  ue.cached_step = step;
  ue.cached = LinkState{cond, cfg_.tx_power_dbm - pl - shadowing - noise_dbm_, pl};
  return ue.cached;
}

}  // namespace xtcp
