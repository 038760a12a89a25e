#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <vector>

#include "xtcp/sim/rng.hpp"
#include "xtcp/tcp/datarate.hpp"

using namespace xtcp;
using namespace xtcp::time_literals;

namespace {

// Brute force: bytes of every record in the half-open window (now - w, now],
// tested with signed arithmetic so no saturation is involved.
double oracle(const std::vector<DciRecord>& h, SimTime now, SimTime w, double eta,
              std::size_t n = SIZE_MAX) {
  std::uint64_t bytes = 0;
  n = std::min(n, h.size());
  const auto lo = static_cast<long long>(now.ns()) - static_cast<long long>(w.ns());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& d = h[i];
    const auto t = static_cast<long long>(d.subframe_start.ns());
    if (t > lo && t <= static_cast<long long>(now.ns())) bytes += d.tb_bytes;
  }
  return static_cast<double>(bytes) * 8.0 / w.seconds() * eta;
}

DciRecord dci(SimTime t, std::uint32_t bytes) { return {t, 0, 24, 28, bytes}; }

}  // namespace

TEST_CASE("overhead factor") {
  CHECK(overhead_factor(1400, 60) == 1400.0 / 1460.0);
  // TCP 32 + IP 20 + PDCP 3 + RLC 3 + MAC 2
  CHECK(32 + 20 + 3 + 3 + 2 == 60);
}

TEST_CASE("empty history gives zero") {
  CHECK(estimate_datarate({}, 1_s, 100_ms, 1.0) == 0.0);
  DatarateEstimator est(100_ms, 1.0);
  CHECK(est.rate_bps(1_s) == 0.0);
}

TEST_CASE("1000 records of 20,000 B in 100 ms") {
  std::vector<DciRecord> h;
  for (int k = 0; k < 1000; ++k) h.push_back(dci(SimTime::from_us(100) * k, 20'000));
  const SimTime now = SimTime::from_us(100) * 999;
  CHECK(estimate_datarate(h, now, 100_ms, 1.0) == doctest::Approx(1.6e9));
  const double eta = overhead_factor(1400, 60);
  const double r = estimate_datarate(h, now, 100_ms, eta);
  CHECK(r == doctest::Approx(1.534e9).epsilon(1e-3));
  CHECK(r == oracle(h, now, 100_ms, eta));
}

TEST_CASE("window straddling a rate change") {
  std::vector<DciRecord> h;
  for (int k = 0; k < 2000; ++k) h.push_back(dci(SimTime::from_us(100) * k, k < 1500 ? 40'000 : 0));
  const SimTime now = SimTime::from_us(100) * 1999;
  // Half the window at 3.2 Gbit/s, half at zero.
  CHECK(estimate_datarate(h, now, 100_ms, 1.0) == doctest::Approx(1.6e9));
  CHECK(estimate_datarate(h, now, 100_ms, 1.0) == oracle(h, now, 100_ms, 1.0));
}

TEST_CASE("window edges: old edge excluded, now included") {
  const std::vector<DciRecord> h{dci(0_ms, 1000), dci(100_ms, 500)};
  CHECK(estimate_datarate(h, 100_ms, 100_ms, 1.0) == oracle(h, 100_ms, 100_ms, 1.0));
  CHECK(estimate_datarate(h, 100_ms, 100_ms, 1.0) == 500 * 8 / 0.1);
  CHECK(estimate_datarate(h, 99_ms, 100_ms, 1.0) == 1000 * 8 / 0.1);
}

TEST_CASE("estimator matches the brute-force sum on 1000 random histories") {
  RngStream rng(2718, "datarate-oracle");
  const double eta = overhead_factor(1400, 60);
  int mismatches = 0;
  for (int c = 0; c < 1000; ++c) {
    std::vector<DciRecord> h;
    const int n = static_cast<int>(rng.next_u64() % 3000);
    SimTime t = SimTime::from_us(100) * (rng.next_u64() % 50);
    for (int i = 0; i < n; ++i) {
      // Several UEs may share a subframe; gaps model unscheduled subframes.
      if (rng.bernoulli(0.3)) t += SimTime::from_us(100) * (1 + rng.next_u64() % 20);
      h.push_back(dci(t, static_cast<std::uint32_t>(rng.next_u64() % 40'001)));
    }
    const SimTime window = SimTime::from_ms(1 + rng.next_u64() % 200);
    const SimTime now = t + SimTime::from_us(rng.next_u64() % 5000);
    const double expected = oracle(h, now, window, eta);
    mismatches += estimate_datarate(h, now, window, eta) != expected;

    // Streaming estimator fed the same records, queried at several points.
    DatarateEstimator est(window, eta);
    std::size_t fed = 0;
    for (SimTime q = SimTime::zero(); q <= now; q += SimTime::from_ms(23)) {
      while (fed < h.size() && h[fed].subframe_start <= q) est.add(h[fed++]);
      mismatches += est.rate_bps(q) != oracle(h, q, window, eta, fed);
    }
  }
  CHECK(mismatches == 0);
}
