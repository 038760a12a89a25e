#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "xtcp/metrics/metrics.hpp"
#include "xtcp/sim/rng.hpp"

using namespace xtcp;
using namespace xtcp::time_literals;

TEST_CASE("windowed goodput") {
  SUBCASE("no deliveries") {
    const auto g = windowed_goodput({}, 0_s, 1_s, 100_ms);
    REQUIRE(g.size() == 10);
    for (double v : g) CHECK(v == 0.0);
  }
  SUBCASE("12.5 MB spread evenly over one second") {
    std::vector<Delivery> d;
    for (int i = 0; i < 10'000; ++i) d.push_back({SimTime::from_us(100) * i, 1250});
    for (double v : windowed_goodput(d, 0_s, 1_s, 100_ms)) CHECK(v == doctest::Approx(1e8));
  }
  SUBCASE("step pattern against a per-window sum") {
    std::vector<Delivery> d;
    RngStream rng(3, "step");
    for (int i = 0; i < 20'000; ++i) {
      const SimTime t = SimTime::from_us(50) * i;
      if (t < 500_ms) d.push_back({t, 1 + rng.next_u64() % 3000});
    }
    const auto g = windowed_goodput(d, 0_s, 1_s, 100_ms);
    REQUIRE(g.size() == 10);
    for (std::size_t k = 0; k < g.size(); ++k) {
      std::uint64_t bytes = 0;
      for (const auto& x : d) {
        if (x.t.ns() / 100'000'000 == k) bytes += x.bytes;
      }
      CHECK(g[k] == static_cast<double>(bytes) * 8.0 / 0.1);
    }
    CHECK(g[7] == 0.0);
  }
}

TEST_CASE("Jain index") {
  const std::vector<double> equal{3e8, 3e8}, one{1e8, 0.0}, paper{643.2e6, 519.8e6};
  CHECK(*jain_index(equal) == doctest::Approx(1.0));
  CHECK(*jain_index(one) == doctest::Approx(0.5));
  const double s = 643.2 + 519.8, q = 643.2 * 643.2 + 519.8 * 519.8;
  CHECK(*jain_index(paper) == doctest::Approx(s * s / (2 * q)));
  CHECK(*jain_index(paper) == doctest::Approx(0.98887).epsilon(1e-5));
  CHECK_FALSE(jain_index(std::vector<double>{0.0, 0.0}).has_value());
  CHECK_FALSE(jain_index({}).has_value());
}

TEST_CASE("Jain index is scale invariant") {
  RngStream rng(6, "jain");
  for (int c = 0; c < 200; ++c) {
    std::vector<double> x, y;
    const double k = rng.uniform(1e-3, 1e3);
    for (int i = 0; i < 1 + c % 7; ++i) {
      x.push_back(rng.uniform(0, 1e9));
      y.push_back(k * x.back());
    }
    CHECK(*jain_index(x) == doctest::Approx(*jain_index(y)).epsilon(1e-12));
  }
}

TEST_CASE("summaries with confidence intervals") {
  const std::vector<double> same{5.0, 5.0, 5.0};
  CHECK(*summarize(same).ci95 == 0.0);
  const std::vector<double> two{100.0, 200.0};
  const Summary s = summarize(two);
  CHECK(s.mean == 150.0);
  CHECK(s.n == 2);
  CHECK(*s.ci95 == doctest::Approx(12.7062 * 70.7107 / std::sqrt(2.0)).epsilon(1e-4));
  CHECK(*s.ci95 == doctest::Approx(635.3).epsilon(1e-4));
  const std::vector<double> single{7.0};
  CHECK_FALSE(summarize(single).ci95.has_value());
}

TEST_CASE("confidence interval covers the true mean about 95% of the time") {
  RngStream rng(1234, "coverage");
  constexpr int trials = 2000;
  int covered = 0;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> x(200);
    for (auto& v : x) v = 10.0 + 3.0 * rng.normal();
    const Summary s = summarize(x);
    covered += std::abs(s.mean - 10.0) <= *s.ci95;
  }
  // Binomial sd at 2000 trials is about 0.005.
  CHECK(double(covered) / trials == doctest::Approx(0.95).epsilon(0.02));
}

TEST_CASE("mean of RTT samples equals the time-weighted trace integral") {
  // Samples on a fixed grid: the sample mean and the step integral agree
  // up to the discretization of the last interval.
  RngStream rng(77, "rtt-trace");
  const SimTime dt = 1_ms;
  std::vector<double> v;
  double integral = 0.0;
  double level = 0.03;
  for (int i = 0; i < 60'000; ++i) {
    level = std::max(0.022, level + 0.0005 * rng.normal());
    v.push_back(level);
    integral += level * dt.seconds();
  }
  const double mean = summarize(v).mean;
  CHECK(std::abs(mean - integral / 60.0) < 0.01 * mean);
}

TEST_CASE("metric CSV layout") {
  MetricsCollector m;
  m.record(100_us, 1, MetricKind::Cwnd, 2800);
  m.record(200_us, 0, MetricKind::RlcOccupancy, 1.5);
  std::ostringstream os;
  m.write_csv(os);
  CHECK(os.str() == "t_ns,ue_id,kind,value\n100000,1,CWND,2800\n200000,0,RLC_OCCUPANCY,1.5\n");
}
