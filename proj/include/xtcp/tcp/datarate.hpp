#pragma once

#include <cstdint>
#include <deque>
#include <span>

#include "xtcp/phy/phy_mac.hpp"
#include "xtcp/sim/sim_time.hpp"

namespace xtcp {

/// Share of the transport block that is TCP payload, L / (L + H).
double overhead_factor(std::uint32_t mss, std::uint32_t header_bytes);

/// Data rate granted to a UE: transport-block bytes of the DCIs in
/// (now - window, now], in bit/s over the window, times `eta`.
double estimate_datarate(std::span<const DciRecord> history, SimTime now, SimTime window, double eta);

/// Sliding-window version of estimate_datarate for time-ordered DCIs. Gives
/// the same result as the batch function on the same records.
class DatarateEstimator {
 public:
  DatarateEstimator(SimTime window, double eta) : window_(window), eta_(eta) {}

  void add(const DciRecord& dci);
  double rate_bps(SimTime now);
  SimTime window() const { return window_; }

 private:
  struct Entry {
    SimTime t;
    std::uint64_t bytes;
  };
  SimTime window_;
  double eta_;
  std::deque<Entry> entries_;
  std::uint64_t sum_ = 0;
};

}  // namespace xtcp
