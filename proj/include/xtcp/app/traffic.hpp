#pragma once

#include <cstdint>

#include "xtcp/sim/sim_time.hpp"

namespace xtcp {

struct TrafficConfig {
  double rate_cap_bps = 1e9;  // R_app,max
  SimTime core_latency = SimTime::from_ms(1);
  SimTime remote_latency = SimTime::from_ms(10);
  // Air-interface delay of the downlink that carries ACKs back to the UE.
  SimTime downlink_ack_delay = SimTime::from_us(100);
  // Bucket depth as a duration of data at the capped rate.
  SimTime bucket_depth = SimTime::from_us(22'200);

  SimTime wired_one_way() const { return core_latency + remote_latency; }
  void validate() const;
};

/// Rate cap of the full-buffer source. Tokens accrue at the capped rate,
/// are kept in integer bytes with no drift over long runs, and never exceed
/// the bucket depth. The bucket starts empty.
class TokenBucket {
 public:
  TokenBucket(double rate_bps, std::uint64_t depth_bytes, SimTime start = SimTime::zero());
  static TokenBucket from_config(const TrafficConfig& cfg, SimTime start = SimTime::zero());

  /// Accrues tokens up to `now` and returns the bytes the application may
  /// hand to TCP, given that TCP still holds `unsent` bytes it has not sent.
  /// The unsent bytes count against the bucket depth.
  std::uint64_t refill(SimTime now, std::uint64_t unsent);

  std::uint64_t offered_total() const { return offered_; }
  std::uint64_t depth() const { return depth_; }

 private:
  std::uint64_t minted_until(SimTime t) const;

  double rate_bps_;
  std::uint64_t depth_;
  SimTime start_;
  SimTime last_;
  std::uint64_t minted_ = 0;  // floor(rate * (last - start) / 8)
  std::uint64_t tokens_ = 0;
  std::uint64_t offered_ = 0;
};

}  // namespace xtcp
