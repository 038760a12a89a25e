// Acceptance run: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (capped at 100).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "xtcp/geometry/geometry.hpp"
#include "xtcp/runner/batch.hpp"
#include "xtcp/runner/simulation.hpp"
#include "xtcp/scenario/scenario.hpp"
#include "xtcp/sim/rng.hpp"
#include "xtcp/tcp/congestion_control.hpp"
#include "xtcp/tcp/datarate.hpp"
#include "xtcp/tcp/rtt_estimator.hpp"

using namespace xtcp;
using namespace xtcp::time_literals;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  if (!ok) ++failures;
  fmt::print("criterion {:>2}: {} {} | {}\n", id, ok ? "PASS" : "FAIL", what, detail);
  std::fflush(stdout);
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

unsigned workers() { return std::max(1u, std::thread::hardware_concurrency()); }

double mean_of(const std::vector<double>& v) { return summarize(v).mean; }

std::string mbps(double bps) { return fmt::format("{:.1f} Mbit/s", bps / 1e6); }

// ------------------------------------------------------------------ 1

void calibration() {
  Stopwatch sw;
  const Scenario sc = load_bundle("calibration-los").scenario;
  const RunResult r = run_simulation(sc);
  const double gross = r.value("ue0.phy_gross_bps");
  const double goodput = r.value("ue0.goodput_bps");
  const double eta = overhead_factor(sc.tcp.mss, sc.cc.xtcp.header_overhead_bytes);
  const double floor = 0.9 * eta * 3.2e9;
  const double t = sw.seconds();
  const bool ok = std::abs(gross - 3.2e9) <= 0.001 * 3.2e9 && goodput >= floor && t < 10.0;
  report(1, ok, "calibration anchor",
         fmt::format("gross {:.4f} Gbit/s (3.2 +/- 0.1%), goodput {} >= {}, {:.1f} s", gross / 1e9,
                     mbps(goodput), mbps(floor), t));
}

// -------------------------------------------------------------- 2 to 5

struct TwoUeBatches {
  BatchResult cap1g;
  BatchResult cap2g;
  double seconds = 0.0;
};

BatchResult two_ue_batch(double cap, const std::vector<std::string>& variants) {
  Scenario base = load_bundle("random-two-ue").scenario;
  base.traffic.rate_cap_bps = cap;
  BatchConfig cfg;
  cfg.runs = 20;
  cfg.seed_base = base.seed;
  cfg.swap_pairing = true;
  cfg.jobs = workers();
  for (const auto& v : variants) cfg.variants.push_back(parse_cc_variant(v));
  return run_batch(reseed_factory(base), cfg);
}

void latency_and_buffer(const TwoUeBatches& b) {
  auto ratio = [](const BatchResult& r, const std::string& metric) {
    return mean_of(r.values("xtcp", metric)) / mean_of(r.values("cubic", metric));
  };
  const double rtt1 = ratio(b.cap1g, "all.rtt_mean_s");
  const double rtt2 = ratio(b.cap2g, "all.rtt_mean_s");
  report(2, rtt1 <= 0.75 && rtt2 <= 0.75 && b.seconds < 600.0, "mean RTT ratio X-TCP/CUBIC <= 0.75",
         fmt::format("1 Gbit/s: {:.1f}/{:.1f} ms = {:.3f}; 2 Gbit/s: {:.1f}/{:.1f} ms = {:.3f}; batches {:.0f} s",
                     1e3 * mean_of(b.cap1g.values("xtcp", "all.rtt_mean_s")),
                     1e3 * mean_of(b.cap1g.values("cubic", "all.rtt_mean_s")), rtt1,
                     1e3 * mean_of(b.cap2g.values("xtcp", "all.rtt_mean_s")),
                     1e3 * mean_of(b.cap2g.values("cubic", "all.rtt_mean_s")), rtt2, b.seconds));

  const double occ1 = ratio(b.cap1g, "all.rlc_occupancy_mean_bytes");
  const double occ2 = ratio(b.cap2g, "all.rlc_occupancy_mean_bytes");
  report(3, occ1 <= 0.75 && occ2 <= 0.75, "mean RLC occupancy ratio X-TCP/CUBIC <= 0.75",
         fmt::format("1 Gbit/s: {:.2f}/{:.2f} MB = {:.3f}; 2 Gbit/s: {:.2f}/{:.2f} MB = {:.3f}",
                     mean_of(b.cap1g.values("xtcp", "all.rlc_occupancy_mean_bytes")) / 1e6,
                     mean_of(b.cap1g.values("cubic", "all.rlc_occupancy_mean_bytes")) / 1e6, occ1,
                     mean_of(b.cap2g.values("xtcp", "all.rlc_occupancy_mean_bytes")) / 1e6,
                     mean_of(b.cap2g.values("cubic", "all.rlc_occupancy_mean_bytes")) / 1e6, occ2));

  const double x = mean_of(b.cap1g.values("xtcp", "all.goodput_bps"));
  const double c = mean_of(b.cap1g.values("cubic", "all.goodput_bps"));
  report(4, std::abs(x - c) <= 0.10 * c, "throughput parity at 1 Gbit/s within 10%",
         fmt::format("X-TCP {} vs CUBIC {} ({:+.1f}%)", mbps(x), mbps(c), 100.0 * (x - c) / c));
}

void mixed_fairness(const BatchResult& homogeneous_2g) {
  const Scenario base = load_bundle("mixed-fairness").scenario;
  BatchConfig cfg;
  cfg.runs = 20;
  cfg.seed_base = base.seed;
  cfg.swap_pairing = true;
  cfg.jobs = workers();
  cfg.variants = {parse_cc_variant("xtcp+cubic")};
  const BatchResult mixed = run_batch(reseed_factory(base), cfg);

  const double x = mean_of(mixed.values("xtcp+cubic", "cc.xtcp.goodput_bps"));
  const double c = mean_of(mixed.values("xtcp+cubic", "cc.cubic.goodput_bps"));
  // Fairness of the pair from each flow's mean throughput.
  const std::vector<double> mixed_pair{x, c};
  const std::vector<double> cubic_pair{mean_of(homogeneous_2g.values("cubic", "ue0.goodput_bps")),
                                       mean_of(homogeneous_2g.values("cubic", "ue1.goodput_bps"))};
  const double j_mixed = *jain_index(mixed_pair);
  const double j_cubic = *jain_index(cubic_pair);
  const bool ok = x >= 1.10 * c && j_mixed < j_cubic;
  report(5, ok, "mixed pair: X-TCP >= 1.10 x CUBIC and less fair than a CUBIC pair",
         fmt::format("X-TCP {} vs CUBIC {} (x{:.2f}); Jain mixed {:.4f} vs CUBIC pair {:.4f} "
                     "(per-run means: {:.4f} vs {:.4f})",
                     mbps(x), mbps(c), x / c, j_mixed, j_cubic,
                     mean_of(mixed.values("xtcp+cubic", "jain_goodput")),
                     mean_of(homogeneous_2g.values("cubic", "jain_goodput"))));
}

// ------------------------------------------------------------------ 6

void outage_ordering() {
  Stopwatch sw;
  const Scenario base = load_bundle("outage").scenario;
  BatchConfig cfg;
  cfg.runs = 50;
  cfg.seed_base = base.seed;
  cfg.jobs = workers();
  const std::vector<std::string> names{"xtcp", "bic", "illinois", "cubic", "newreno"};
  for (const auto& n : names) cfg.variants.push_back(parse_cc_variant(n));
  const BatchResult r = run_batch(reseed_factory(base), cfg);

  std::vector<Summary> s;
  for (const auto& n : names) s.push_back(r.summary(n, "ue0.goodput_bps"));
  auto lo = [&](int i) { return s[i].mean - s[i].ci95.value_or(0.0); };
  auto hi = [&](int i) { return s[i].mean + s[i].ci95.value_or(0.0); };
  const bool order = s[0].mean > s[1].mean && s[1].mean > s[2].mean && s[2].mean > s[3].mean &&
                     s[2].mean > s[4].mean;
  const bool separated = lo(0) > hi(1) && lo(1) > hi(2) && lo(2) > std::max(hi(3), hi(4));
  const bool close = std::abs(s[3].mean - s[4].mean) <= 0.15 * s[4].mean;
  const double t = sw.seconds();
  std::string detail;
  for (std::size_t i = 0; i < names.size(); ++i) {
    detail += fmt::format("{} {:.1f}+/-{:.1f}; ", names[i], s[i].mean / 1e6, s[i].ci95.value_or(0.0) / 1e6);
  }
  detail += fmt::format("order {}, CIs {}, |CUBIC-NewReno| {:.1f}% ; {:.0f} s", order ? "ok" : "violated",
                        separated ? "disjoint" : "overlap",
                        100.0 * std::abs(s[3].mean - s[4].mean) / s[4].mean, t);
  report(6, order && separated && close && t < 900.0, "outage recovery ordering (Mbit/s)", detail);
}

// ------------------------------------------------------------------ 7

void algorithm_one() {
  const XtcpConfig cfg;
  const std::uint32_t mss = 1400;
  const auto good = xtcp_cwnd(22_ms, 22_ms, 1e9, 10.0, cfg, mss);
  const auto low_sinr = xtcp_cwnd(22_ms, 22_ms, 1e9, -5.0, cfg, mss);
  const auto congested = xtcp_cwnd(35_ms, 22_ms, 1e9, 10.0, cfg, mss);
  const auto at_epsilon = xtcp_cwnd(32_ms, 22_ms, 1e9, 10.0, cfg, mss);
  const auto at_zero_db = xtcp_cwnd(22_ms, 22_ms, 1e9, 0.0, cfg, mss);
  const bool ok = good == 2'750'000 && low_sinr == 2'337'500 && congested == 2'337'500 &&
                  static_cast<double>(low_sinr) / static_cast<double>(good) == 0.85 &&
                  at_epsilon == good && at_zero_db == good;
  report(7, ok, "Algorithm 1 examples and boundaries",
         fmt::format("{} / {} / {} B, ratio {}, eps boundary {}, 0 dB {}", good, low_sinr, congested,
                     static_cast<double>(low_sinr) / static_cast<double>(good), at_epsilon, at_zero_db));
}

// ------------------------------------------------------------------ 8

void controllers() {
  std::vector<std::string> bad;

  const CubicConfig cc;
  for (double wmax : {10.0, 100.0, 1234.5}) {
    const double k = std::pow(wmax * (1.0 - cc.beta) / cc.c, 1.0 / 3.0);
    for (double t = 0.0; t <= 20.0; t += 0.25) {
      const double ref = cc.c * std::pow(t - k, 3.0) + wmax;
      if (std::abs(cubic_window(t, wmax, cc) - ref) > 1e-9 * std::abs(ref)) bad.push_back("cubic");
    }
  }
  if (std::abs(cubic_window(cubic_k(100, cc) + 1.0, 100, cc) - 100.4) > 1e-9 * 100.4) bad.push_back("cubic K+1");

  RttEstimator est;
  est.on_sample(100_ms);
  const bool first = est.srtt() == 100_ms && est.rttvar() == 50_ms && est.rto() == 300_ms;
  est.on_sample(200_ms);
  const bool second = est.srtt() == SimTime::from_us(112'500) && est.rttvar() == SimTime::from_us(62'500) &&
                      est.rto() == SimTime::from_us(362'500);
  if (!first || !second) bad.push_back("rfc6298");

  const IllinoisConfig ic;
  if (illinois_params(1_ms, 100_ms, ic).alpha != 10.0) bad.push_back("illinois alpha_max");
  if (illinois_params(80_ms, 100_ms, ic).beta != 0.5) bad.push_back("illinois beta_max");
  if (illinois_params(100_ms, 100_ms, ic).alpha != 0.3) bad.push_back("illinois alpha_min");

  const BicConfig bc;
  if (bic_increment(100, 200, bc) != 32.0 || bic_increment(190, 200, bc) != 5.0) bad.push_back("bic clamp");
  Bic bic;
  if (bic.on_dup_ack_loss({SimTime::zero(), 280'000, 1400, nullptr}, {280'000, kInfiniteWindow}).cwnd != 224'000) {
    bad.push_back("bic decrease");
  }

  NewReno nr;
  const Window w = nr.on_rto({SimTime::zero(), 140'000, 1400, nullptr}, {140'000, kInfiniteWindow});
  if (w.cwnd != 1400 || w.ssthresh != 70'000) bad.push_back("newreno halving");
  AckContext a;
  a.acked_bytes = 1400;
  if (nr.on_ack(a, {14'000, 10'000}).cwnd != 14'140) bad.push_back("newreno CA");

  std::string detail = "CUBIC 1e-9, RFC 6298, Illinois, BIC, NewReno";
  if (!bad.empty()) {
    detail = "failed:";
    for (const auto& b : bad) detail += " " + b;
  }
  report(8, bad.empty(), "controller suites", detail);
}

// ------------------------------------------------------------------ 9

void estimator_oracle() {
  RngStream rng(9, "acceptance/datarate");
  int mismatches = 0;
  const double eta = overhead_factor(1400, 60);
  for (int c = 0; c < 1000; ++c) {
    std::vector<DciRecord> h;
    SimTime t = SimTime::from_us(100) * (rng.next_u64() % 100);
    const int n = static_cast<int>(rng.next_u64() % 2500);
    for (int i = 0; i < n; ++i) {
      if (rng.bernoulli(0.4)) t += SimTime::from_us(100) * (1 + rng.next_u64() % 10);
      h.push_back({t, static_cast<UeId>(rng.next_u64() % 2), 12, 28,
                   static_cast<std::uint32_t>(rng.next_u64() % 40'001)});
    }
    const SimTime window = SimTime::from_ms(1 + rng.next_u64() % 150);
    const SimTime now = t + SimTime::from_us(rng.next_u64() % 3000);
    std::uint64_t bytes = 0;
    const long long lo = static_cast<long long>(now.ns()) - static_cast<long long>(window.ns());
    for (const auto& d : h) {
      const auto ts = static_cast<long long>(d.subframe_start.ns());
      if (ts > lo && ts <= static_cast<long long>(now.ns())) bytes += d.tb_bytes;
    }
    const double expected = static_cast<double>(bytes) * 8.0 / window.seconds() * eta;
    mismatches += estimate_datarate(h, now, window, eta) != expected;
  }
  report(9, mismatches == 0, "datarate estimator vs brute-force sum",
         fmt::format("{} mismatches in 1000 histories", mismatches));
}

// ----------------------------------------------------------------- 10

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

// Sampling LOS oracle with a 1e-9 m tolerance band: 0 clear, 1 blocked,
// 2 too close to a boundary to call.
int sampled_los(Point2D a, Point2D b, const std::vector<Obstacle>& obs) {
  constexpr int steps = 20'000;
  constexpr double band = 1e-9;
  bool near = false;
  for (int i = 1; i < steps; ++i) {
    const double t = static_cast<double>(i) / steps;
    const Point2D p{a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t};
    for (const auto& o : obs) {
      if (p.x > o.min_corner.x + band && p.x < o.max_corner.x - band && p.y > o.min_corner.y + band &&
          p.y < o.max_corner.y - band) {
        return 1;
      }
      near = near || (p.x >= o.min_corner.x - band && p.x <= o.max_corner.x + band &&
                      p.y >= o.min_corner.y - band && p.y <= o.max_corner.y + band);
    }
  }
  return near ? 2 : 0;
}

void conservation_and_determinism() {
  Scenario sc = load_bundle("mixed-fairness").scenario;
  sc.duration = 60_s;
  sc.output.check_invariants = true;
  const RunResult checked = run_simulation(sc);

  sc.output.check_invariants = false;
  sc.output.sinr_trace = sc.output.dci_trace = sc.output.flow_trace = true;
  const fs::path root = fs::temp_directory_path() / "xtcp_acceptance_determinism";
  fs::remove_all(root);
  write_run_outputs((root / "a").string(), run_simulation(sc));
  write_run_outputs((root / "b").string(), run_simulation(sc));
  int files = 0, differing = 0;
  for (const auto& e : fs::directory_iterator(root / "a")) {
    ++files;
    differing += slurp(e.path()) != slurp(root / "b" / e.path().filename());
  }
  fs::remove_all(root);

  RngStream rng(10, "acceptance/los");
  int disagree = 0, undecided = 0;
  for (int c = 0; c < 1000; ++c) {
    std::vector<Obstacle> obs;
    for (int i = 0; i < 1 + static_cast<int>(rng.next_u64() % 4); ++i) {
      const double x = rng.uniform(0, 90), y = rng.uniform(0, 90);
      obs.push_back({{x, y}, {x + rng.uniform(1, 15), y + rng.uniform(1, 15)}});
    }
    const Point2D a{rng.uniform(0, 100), rng.uniform(0, 100)};
    const Point2D b{rng.uniform(0, 100), rng.uniform(0, 100)};
    const int v = sampled_los(a, b, obs);
    if (v == 2) {
      ++undecided;
      continue;
    }
    disagree += is_los(a, b, obs) != (v == 0);
  }

  const bool ok = checked.invariant_violations == 0 && files == 5 && differing == 0 && disagree == 0;
  report(10, ok, "conservation, determinism, LOS oracle",
         fmt::format("{} events with {} conservation violations; {} CSVs, {} differing; LOS {} disagreements "
                     "in {} decided cases",
                     checked.events, checked.invariant_violations, files, differing, disagree, 1000 - undecided));
}

}  // namespace

int main() {
  try {
    calibration();

    Stopwatch sw;
    TwoUeBatches b;
    b.cap1g = two_ue_batch(1e9, {"xtcp", "cubic"});
    b.cap2g = two_ue_batch(2e9, {"xtcp", "cubic"});
    b.seconds = sw.seconds();
    latency_and_buffer(b);
    mixed_fairness(b.cap2g);

    outage_ordering();
    algorithm_one();
    controllers();
    estimator_oracle();
    conservation_and_determinism();
  } catch (const std::exception& e) {
    fmt::print("acceptance aborted: {}\n", e.what());
    return 100;
  }
  fmt::print("{} of 10 criteria failed\n", failures);
  return std::min(failures, 100);
}
