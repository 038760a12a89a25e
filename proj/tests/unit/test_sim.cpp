#include <doctest.h>

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "xtcp/error.hpp"
#include "xtcp/sim/rng.hpp"
#include "xtcp/sim/simulator.hpp"

using namespace xtcp;
using namespace xtcp::time_literals;

TEST_CASE("symbol and subframe durations are exact") {
  CHECK((4160_ns).ns() == 4160);
  CHECK((100_us).ns() == 100'000);
  CHECK((100_us * 10).ns() == 1'000'000);
  CHECK(SimTime::from_seconds(4.16e-6).ns() == 4160);
  // 24 symbols fit in one subframe.
  CHECK(4160_ns * 24 <= 100_us);
}

TEST_CASE("time arithmetic saturates and keeps infinity") {
  CHECK((5_ms - 7_ms) == SimTime::zero());
  CHECK((SimTime::infinite() + 1_s).is_infinite());
  CHECK(SimTime::from_seconds(-1.0) == SimTime::zero());
  CHECK((60_s).seconds() == 60.0);
}

TEST_CASE("event at the current instant is dispatched") {
  Simulator sim;
  int fired = 0;
  sim.schedule_at(SimTime::zero(), [&] { ++fired; });
  CHECK(sim.run_until(SimTime::zero()) == 1);
  CHECK(fired == 1);
}

TEST_CASE("equal timestamps dispatch in insertion order") {
  Simulator sim;
  std::string order;
  sim.schedule_at(100_us, [&] { order += 'A'; });
  sim.schedule_at(100_us, [&] { order += 'B'; });
  sim.schedule_at(50_us, [&] { order += 'C'; });
  sim.run_until(1_ms);
  CHECK(order == "CAB");
}

TEST_CASE("scheduling in the past is a configuration error") {
  Simulator sim;
  sim.schedule_at(100_ns, [] {});
  sim.run_until(100_ns);
  CHECK_THROWS_AS(sim.schedule_at(50_ns, [] {}), ConfigError);
}

TEST_CASE("run_until boundaries") {
  SUBCASE("empty queue advances the clock") {
    Simulator sim;
    CHECK(sim.run_until(1_s) == 0);
    CHECK(sim.now() == 1_s);
  }
  SUBCASE("event exactly at t_end fires") {
    Simulator sim;
    bool fired = false;
    sim.schedule_at(1_s, [&] { fired = true; });
    sim.run_until(1_s);
    CHECK(fired);
  }
  SUBCASE("an event scheduling another one nanosecond later") {
    Simulator sim;
    sim.schedule_at(10_ns, [&] { sim.schedule_in(1_ns, [] {}); });
    CHECK(sim.run_until(11_ns) == 2);
  }
  SUBCASE("later events stay queued") {
    Simulator sim;
    sim.schedule_at(2_s, [] {});
    CHECK(sim.run_until(1_s) == 0);
    CHECK(sim.pending() == 1);
  }
}

TEST_CASE("cancelled events never dispatch") {
  Simulator sim;
  int fired = 0;
  auto h = sim.schedule_at(10_ns, [&] { ++fired; });
  sim.schedule_at(20_ns, [&] { ++fired; });
  CHECK(sim.cancel(h));
  CHECK_FALSE(sim.cancel(h));
  CHECK(sim.run_until(1_us) == 1);
  CHECK(fired == 1);
  CHECK_FALSE(sim.cancel(EventHandle{}));
}

TEST_CASE("clock never decreases across dispatches") {
  Simulator sim;
  RngStream rng(7, "test");
  std::vector<SimTime> seen;
  for (int i = 0; i < 500; ++i) {
    sim.schedule_at(SimTime::from_ns(rng.next_u64() % 100'000), [&] {
      seen.push_back(sim.now());
      if (seen.size() < 1000) sim.schedule_in(SimTime::from_ns(rng.next_u64() % 1000), [&] { seen.push_back(sim.now()); });
    });
  }
  sim.run_until(1_s);
  REQUIRE(seen.size() == 1000);
  for (std::size_t i = 1; i < seen.size(); ++i) CHECK(seen[i - 1] <= seen[i]);
}

TEST_CASE("post-dispatch hook runs once per event") {
  Simulator sim;
  int hooks = 0;
  sim.set_post_dispatch_hook([&] { ++hooks; });
  for (int i = 0; i < 5; ++i) sim.schedule_at(SimTime::from_ns(i), [] {});
  sim.run_until(1_us);
  CHECK(hooks == 5);
}

TEST_CASE("streams are reproducible and independent of other streams") {
  RngStream a1(42, "shadowing/ue0");
  RngStream a2(42, "shadowing/ue0");
  for (int i = 0; i < 100; ++i) CHECK(a1.next_u64() == a2.next_u64());

  // Drawing from an unrelated stream in between changes nothing.
  RngStream b1(42, "tb_error");
  RngStream b2(42, "tb_error");
  RngStream other(42, "obstacles");
  std::vector<std::uint64_t> x, y;
  for (int i = 0; i < 50; ++i) {
    x.push_back(b1.next_u64());
    other.next_u64();
    y.push_back(b2.next_u64());
  }
  CHECK(x == y);
}

TEST_CASE("distinct labels and seeds give distinct streams") {
  std::set<std::uint64_t> seeds;
  for (const char* label : {"shadowing/ue0", "shadowing/ue1", "tb_error", "obstacles"}) {
    for (std::uint64_t s = 0; s < 4; ++s) seeds.insert(derive_stream_seed(s, label));
  }
  CHECK(seeds.size() == 16);
}

TEST_CASE("uniform draws lie in [0, 1) with the right mean") {
  RngStream rng(3, "u");
  double sum = 0.0;
  constexpr int n = 100'000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  // sd of U(0,1) is 1/sqrt(12); allow 4 standard errors.
  CHECK(std::abs(sum / n - 0.5) < 4.0 * 0.288675 / std::sqrt(double(n)));
}
