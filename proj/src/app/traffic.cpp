#include "xtcp/app/traffic.hpp"

#include <algorithm>
#include <cmath>

#include "xtcp/error.hpp"

namespace xtcp {

void TrafficConfig::validate() const {
  if (!(rate_cap_bps > 0.0) || !std::isfinite(rate_cap_bps)) {
    throw ConfigError("traffic.rate_cap_bps must be a positive number");
  }
  if (bucket_depth == SimTime::zero()) throw ConfigError("traffic.bucket_depth_ms must be > 0");
}

TokenBucket::TokenBucket(double rate_bps, std::uint64_t depth_bytes, SimTime start)
    : rate_bps_(rate_bps), depth_(depth_bytes), start_(start), last_(start) {
  if (!(rate_bps > 0.0)) throw ConfigError("token bucket rate must be > 0");
  if (depth_bytes == 0) throw ConfigError("token bucket depth must be > 0");
}

TokenBucket TokenBucket::from_config(const TrafficConfig& cfg, SimTime start) {
  const auto depth = static_cast<std::uint64_t>(cfg.rate_cap_bps / 8.0 * cfg.bucket_depth.seconds());
  return TokenBucket(cfg.rate_cap_bps, std::max<std::uint64_t>(depth, 1), start);
}

std::uint64_t TokenBucket::minted_until(SimTime t) const {
  // Exact for rates that are whole bits per second.
  const auto rate = static_cast<unsigned __int128>(std::llround(rate_bps_));
  return static_cast<std::uint64_t>(rate * (t - start_).ns() / 8'000'000'000ULL);
}

std::uint64_t TokenBucket::refill(SimTime now, std::uint64_t unsent) {
  if (now > last_) {
    const std::uint64_t minted = minted_until(now);
    tokens_ += minted - minted_;
    minted_ = minted;
    last_ = now;
  }
  const std::uint64_t room = depth_ > unsent ? depth_ - unsent : 0;
  tokens_ = std::min(tokens_, room);
  const std::uint64_t give = tokens_;
  tokens_ = 0;
  offered_ += give;
  return give;
}

}  // namespace xtcp
