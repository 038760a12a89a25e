#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "xtcp/channel/channel.hpp"
#include "xtcp/sim/sim_time.hpp"

namespace xtcp {

enum class MetricKind { Cwnd, Srtt, RttSample, GoodputWindow, RlcOccupancy };

std::string_view to_string(MetricKind k);

struct MetricSample {
  SimTime t;
  UeId ue = 0;
  MetricKind kind = MetricKind::Cwnd;
  double value = 0.0;
};

/// Bytes handed to the receiving application at time t.
struct Delivery {
  SimTime t;
  std::uint64_t bytes = 0;
};

/// Goodput per window over [start, end), in bit/s. Window k covers
/// [start + k*window, start + (k+1)*window); a trailing partial window is
/// dropped.
std::vector<double> windowed_goodput(std::span<const Delivery> deliveries, SimTime start, SimTime end,
                                     SimTime window);

/// Jain fairness index (sum x)^2 / (n sum x^2); nullopt for an empty or
/// all-zero input.
std::optional<double> jain_index(std::span<const double> rates);

struct Summary {
  double mean = 0.0;
  std::optional<double> ci95;  // Student-t half-width, needs n >= 2
  std::size_t n = 0;
};

Summary summarize(std::span<const double> values);

/// Time-ordered samples of one run, written as `t_ns,ue_id,kind,value`.
class MetricsCollector {
 public:
  void record(SimTime t, UeId ue, MetricKind kind, double value) {
    samples_.push_back({t, ue, kind, value});
  }
  const std::vector<MetricSample>& samples() const { return samples_; }
  void write_csv(std::ostream& os) const;

 private:
  std::vector<MetricSample> samples_;
};

}  // namespace xtcp
