#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "xtcp/channel/channel.hpp"
#include "xtcp/sim/rng.hpp"
#include "xtcp/sim/sim_time.hpp"

namespace xtcp {

/// TDD frame numerology.
struct FrameConfig {
  std::uint32_t subframes_per_frame = 10;
  SimTime subframe_duration = SimTime::from_us(100);
  std::uint32_t symbols_per_subframe = 24;
  SimTime symbol_duration = SimTime::from_ns(4160);

  void validate() const;
};

using McsIndex = std::uint8_t;

struct McsEntry {
  McsIndex index = 0;
  double sinr_threshold_db = 0.0;
  double bytes_per_symbol = 0.0;

  bool operator==(const McsEntry&) const = default;
};

/// Ordered MCS table. Thresholds and per-symbol capacity are strictly
/// increasing with the index.
class McsTable {
 public:
  explicit McsTable(std::vector<McsEntry> entries);

  /// 29 entries, thresholds evenly spaced from -6.7 dB to 22 dB, capacity
  /// following the Shannon bound at each threshold, scaled so 24 symbols at
  /// index 28 carry 40,000 bytes (3.2 Gbit/s per 100 us subframe).
  static McsTable default_table();
  static McsTable parse_csv(const std::string& text);
  static McsTable load_csv(const std::string& path);
  std::string to_csv() const;

  /// Highest index whose threshold is <= sinr, or nullopt below the lowest.
  std::optional<McsIndex> select(double sinr_db) const;
  const McsEntry& entry(McsIndex mcs) const;
  std::size_t size() const { return entries_.size(); }
  McsIndex top() const { return static_cast<McsIndex>(entries_.size() - 1); }
  const std::vector<McsEntry>& entries() const { return entries_; }

  /// floor(bytes_per_symbol * n_symbols): TB size before the PHY header.
  std::uint64_t gross_bytes(McsIndex mcs, std::uint32_t n_symbols) const;

 private:
  std::vector<McsEntry> entries_;
};

struct PhyConfig {
  FrameConfig frame;
  std::uint32_t tb_header_bytes = 24;
  double bler_at_threshold = 0.10;
  double bler_margin_db = 2.0;
  std::string mcs_table_path;  // empty: built-in table

  void validate() const;
};

std::optional<McsIndex> select_mcs(const McsTable& table, double sinr_db);

/// Payload bytes of a transport block: gross capacity minus the PHY header.
/// Zero for no MCS or zero symbols.
std::uint64_t tb_size(const McsTable& table, std::optional<McsIndex> mcs, std::uint32_t n_symbols,
                      std::uint32_t header_bytes);

/// One subframe's allocation to one UE, as carried by the DCI.
struct DciRecord {
  SimTime subframe_start;
  UeId ue = 0;
  std::uint32_t n_symbols = 0;
  McsIndex mcs = 0;
  std::uint32_t tb_bytes = 0;

  bool operator==(const DciRecord&) const = default;
};

struct SchedulingCandidate {
  UeId ue = 0;
  double sinr_db = 0.0;
};

/// Round-robin split of the subframe's symbols among backlogged UEs that
/// have a usable MCS. Remainder symbols go to the lowest UE ids.
std::vector<DciRecord> schedule_subframe(SimTime subframe_start,
                                         std::span<const SchedulingCandidate> backlogged,
                                         const McsTable& table, const PhyConfig& cfg);

/// Block error rate: bler_at_threshold at the MCS threshold, linear in dB
/// down to zero at threshold + margin and up to one at threshold - margin.
double bler(double sinr_db, double threshold_db, const PhyConfig& cfg);

enum class TbResult { Delivered, Lost };

TbResult transmit_tb(const DciRecord& dci, const LinkState& link, const McsTable& table,
                     const PhyConfig& cfg, RngStream& tb_error_rng);

}  // namespace xtcp
