#include "xtcp/tcp/datarate.hpp"

namespace xtcp {

namespace {

bool in_window(SimTime t, SimTime now, SimTime window) { return t <= now && t + window > now; }

double to_rate(std::uint64_t bytes, SimTime window, double eta) {
  return static_cast<double>(bytes) * 8.0 / window.seconds() * eta;
}

}  // namespace

double overhead_factor(std::uint32_t mss, std::uint32_t header_bytes) {
  return static_cast<double>(mss) / static_cast<double>(mss + header_bytes);
}

double estimate_datarate(std::span<const DciRecord> history, SimTime now, SimTime window, double eta) {
  std::uint64_t bytes = 0;
  for (const auto& d : history) {
    if (in_window(d.subframe_start, now, window)) bytes += d.tb_bytes;
  }
  return to_rate(bytes, window, eta);
}

void DatarateEstimator::add(const DciRecord& dci) {
  entries_.push_back({dci.subframe_start, dci.tb_bytes});
  sum_ += dci.tb_bytes;
}

double DatarateEstimator::rate_bps(SimTime now) {
  while (!entries_.empty() && entries_.front().t + window_ <= now) {
    sum_ -= entries_.front().bytes;
    entries_.pop_front();
  }
  // Records later than `now` stay queued but do not count yet.
  std::uint64_t future = 0;
  for (auto it = entries_.rbegin(); it != entries_.rend() && it->t > now; ++it) future += it->bytes;
  return to_rate(sum_ - future, window_, eta_);
}

}  // namespace xtcp
