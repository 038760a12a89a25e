#include "xtcp/metrics/metrics.hpp"

#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "xtcp/error.hpp"

namespace xtcp {

std::string_view to_string(MetricKind k) {
  switch (k) {
    case MetricKind::Cwnd: return "CWND";
    case MetricKind::Srtt: return "SRTT";
    case MetricKind::RttSample: return "RTT_SAMPLE";
    case MetricKind::GoodputWindow: return "GOODPUT_WINDOW";
    case MetricKind::RlcOccupancy: return "RLC_OCCUPANCY";
  }
  return "?";
}

std::vector<double> windowed_goodput(std::span<const Delivery> deliveries, SimTime start, SimTime end,
                                     SimTime window) {
  if (window == SimTime::zero()) throw ConfigError("goodput window must be > 0");
  const std::uint64_t n = end > start ? (end - start) / window : 0;
  std::vector<std::uint64_t> bytes(n, 0);
  for (const auto& d : deliveries) {
    if (d.t < start || d.t >= end) continue;
    const std::uint64_t k = (d.t - start) / window;
    if (k < n) bytes[k] += d.bytes;
  }
  std::vector<double> out(n);
  for (std::uint64_t k = 0; k < n; ++k) out[k] = static_cast<double>(bytes[k]) * 8.0 / window.seconds();
  return out;
}

std::optional<double> jain_index(std::span<const double> rates) {
  if (rates.empty()) return std::nullopt;
  double sum = 0.0;
  double sq = 0.0;
  for (double x : rates) {
    if (x < 0.0) throw ConfigError("jain_index: negative rate");
    sum += x;
    sq += x * x;
  }
  if (sq == 0.0) return std::nullopt;
  return sum * sum / (static_cast<double>(rates.size()) * sq);
}

Summary summarize(std::span<const double> values) {
  Summary s;
  s.n = values.size();
  if (s.n == 0) return s;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.n);
  if (s.n < 2) return s;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  const double sd = std::sqrt(ss / static_cast<double>(s.n - 1));
  boost::math::students_t dist(static_cast<double>(s.n - 1));
  const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
  s.ci95 = t * sd / std::sqrt(static_cast<double>(s.n));
  return s;
}

void MetricsCollector::write_csv(std::ostream& os) const {
  os << "t_ns,ue_id,kind,value\n";
  for (const auto& s : samples_) {
    fmt::print(os, "{},{},{},{}\n", s.t.ns(), s.ue, to_string(s.kind), s.value);
  }
}

}  // namespace xtcp
