#include "xtcp/tcp/rtt_estimator.hpp"

#include <algorithm>
#include <cmath>

#include "xtcp/error.hpp"

namespace xtcp {

void RttConfig::validate() const {
  if (rto_min == SimTime::zero() || rto_min > rto_max) {
    throw ConfigError("tcp.rto_min_ms must be > 0 and not above tcp.rto_max_s");
  }
  if (rto_initial < rto_min || rto_initial > rto_max) {
    throw ConfigError("tcp.rto_initial_s must lie within [rto_min, rto_max]");
  }
}

RttEstimator::RttEstimator(RttConfig cfg) : cfg_(cfg), rto_(cfg.rto_initial) {}

void RttEstimator::on_sample(SimTime r) {
  const auto r_ns = static_cast<double>(r.ns());
  if (samples_ == 0) {
    srtt_ns_ = r_ns;
    rttvar_ns_ = r_ns / 2.0;
  } else {
    rttvar_ns_ = (1.0 - kBeta) * rttvar_ns_ + kBeta * std::abs(srtt_ns_ - r_ns);
    srtt_ns_ = (1.0 - kAlpha) * srtt_ns_ + kAlpha * r_ns;
  }
  ++samples_;
  latest_ = r;
  rtt_min_ = std::min(rtt_min_, r);
  rtt_max_ = std::max(rtt_max_, r);
  const auto raw = static_cast<std::uint64_t>(std::llround(srtt_ns_ + 4.0 * rttvar_ns_));
  rto_ = std::clamp(SimTime::from_ns(raw), cfg_.rto_min, cfg_.rto_max);
}

void RttEstimator::backoff() { rto_ = std::min(rto_ * 2, cfg_.rto_max); }

SimTime RttEstimator::srtt() const {
  return SimTime::from_ns(static_cast<std::uint64_t>(std::llround(srtt_ns_)));
}

SimTime RttEstimator::rttvar() const {
  return SimTime::from_ns(static_cast<std::uint64_t>(std::llround(rttvar_ns_)));
}

}  // namespace xtcp
