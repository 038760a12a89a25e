#include <doctest.h>

#include "xtcp/app/traffic.hpp"
#include "xtcp/error.hpp"

using namespace xtcp;
using namespace xtcp::time_literals;

TEST_CASE("1 Gbit/s cap offers exactly 125,000,000 B per second") {
  TrafficConfig cfg;
  auto bucket = TokenBucket::from_config(cfg);
  std::uint64_t got = 0;
  for (int k = 1; k <= 10'000; ++k) got += bucket.refill(SimTime::from_us(100) * k, 0);
  CHECK(got == 125'000'000);
  CHECK(bucket.offered_total() == 125'000'000);
}

TEST_CASE("no drift over a long run at an awkward rate") {
  TokenBucket bucket(1.234567e9, 10'000'000);
  std::uint64_t got = 0;
  for (int k = 1; k <= 600'000; ++k) got += bucket.refill(SimTime::from_us(100) * k, 0);
  // 60 s at 1,234,567,000 bit/s.
  CHECK(got == 1'234'567'000ULL * 60 / 8);
}

TEST_CASE("a blocked sender does not bank tokens beyond the bucket depth") {
  TrafficConfig cfg;
  auto bucket = TokenBucket::from_config(cfg);
  const std::uint64_t depth = bucket.depth();
  CHECK(depth == 2'775'000);  // 22.2 ms at 1 Gbit/s
  std::uint64_t unsent = bucket.refill(1_ms, 0);
  for (int ms = 2; ms < 1000; ++ms) {
    const auto give = bucket.refill(SimTime::from_ms(ms), unsent);
    unsent += give;
    CHECK(unsent <= depth);
  }
  // TCP drains its queue: at most one bucket of data becomes available.
  CHECK(bucket.refill(1_s, 0) <= depth);
  CHECK(bucket.offered_total() <= 125'000'000);
}

TEST_CASE("offered bytes track what TCP takes when it is the bottleneck") {
  TrafficConfig cfg;
  cfg.rate_cap_bps = 2e9;
  auto bucket = TokenBucket::from_config(cfg);
  std::uint64_t unsent = 0, sent = 0;
  for (int k = 1; k <= 10'000; ++k) {
    unsent += bucket.refill(SimTime::from_us(100) * k, unsent);
    const std::uint64_t take = std::min<std::uint64_t>(unsent, 20'000);  // 1.6 Gbit/s
    unsent -= take;
    sent += take;
  }
  CHECK(sent == 200'000'000);
  CHECK(bucket.offered_total() == sent + unsent);
  CHECK(bucket.offered_total() <= sent + bucket.depth());
}

TEST_CASE("wired path delay") {
  TrafficConfig cfg;
  CHECK(cfg.wired_one_way() * 2 == 22_ms);
  CHECK(cfg.wired_one_way() * 2 + 100_us * 2 == SimTime::from_us(22'200));
}

TEST_CASE("traffic configuration validation") {
  TrafficConfig cfg;
  cfg.rate_cap_bps = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  CHECK_THROWS_AS(TokenBucket(1e9, 0), ConfigError);
}
