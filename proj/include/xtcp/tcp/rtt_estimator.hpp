#pragma once

#include "xtcp/sim/sim_time.hpp"

namespace xtcp {

struct RttConfig {
  SimTime rto_min = SimTime::from_ms(200);
  SimTime rto_max = SimTime::from_s(60);
  SimTime rto_initial = SimTime::from_s(1);

  void validate() const;
};

/// RFC 6298 smoothed RTT and retransmission timeout, plus the running
/// minimum and maximum of accepted samples.
class RttEstimator {
 public:
  static constexpr double kAlpha = 1.0 / 8.0;  // g
  static constexpr double kBeta = 1.0 / 4.0;   // h

  explicit RttEstimator(RttConfig cfg = {});

  void on_sample(SimTime r);
  /// Doubles the timeout after an expiry, capped at rto_max.
  void backoff();

  bool has_sample() const { return samples_ > 0; }
  SimTime srtt() const;
  SimTime rttvar() const;
  SimTime rto() const { return rto_; }
  SimTime rtt_min() const { return rtt_min_; }  // infinite before the first sample
  SimTime rtt_max() const { return rtt_max_; }
  SimTime latest() const { return latest_; }
  std::uint64_t samples() const { return samples_; }
  const RttConfig& config() const { return cfg_; }

 private:
  RttConfig cfg_;
  double srtt_ns_ = 0.0;
  double rttvar_ns_ = 0.0;
  SimTime rto_;
  SimTime rtt_min_ = SimTime::infinite();
  SimTime rtt_max_;
  SimTime latest_;
  std::uint64_t samples_ = 0;
};

}  // namespace xtcp
