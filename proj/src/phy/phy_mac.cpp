#include "xtcp/phy/phy_mac.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "xtcp/error.hpp"

namespace xtcp {

void FrameConfig::validate() const {
  if (subframes_per_frame == 0) throw ConfigError("phy.frame.subframes_per_frame must be > 0");
  if (symbols_per_subframe == 0) throw ConfigError("phy.frame.symbols_per_subframe must be > 0");
  if (subframe_duration == SimTime::zero()) throw ConfigError("phy.frame.subframe_us must be > 0");
  if (symbol_duration * symbols_per_subframe > subframe_duration) {
    throw ConfigError("phy.frame: symbols_per_subframe * symbol_duration exceeds the subframe");
  }
}

void PhyConfig::validate() const {
  frame.validate();
  if (bler_at_threshold < 0.0 || bler_at_threshold > 1.0) {
    throw ConfigError("phy.bler_at_threshold must lie in [0, 1]");
  }
  if (!(bler_margin_db > 0.0)) throw ConfigError("phy.bler_margin_db must be > 0");
}

McsTable::McsTable(std::vector<McsEntry> entries) : entries_(std::move(entries)) {
  if (entries_.empty() || entries_.size() > 256) {
    throw ConfigError("MCS table must have between 1 and 256 entries");
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].index != i) throw ConfigError(fmt::format("MCS table: row {} has index {}", i, entries_[i].index));
    if (!(entries_[i].bytes_per_symbol > 0.0)) {
      throw ConfigError(fmt::format("MCS table: index {} has non-positive bytes_per_symbol", i));
    }
    if (i > 0 && !(entries_[i].sinr_threshold_db > entries_[i - 1].sinr_threshold_db)) {
      throw ConfigError(fmt::format("MCS table: thresholds not strictly increasing at index {}", i));
    }
    if (i > 0 && !(entries_[i].bytes_per_symbol > entries_[i - 1].bytes_per_symbol)) {
      throw ConfigError(fmt::format("MCS table: bytes_per_symbol not strictly increasing at index {}", i));
    }
  }
}

McsTable McsTable::default_table() {
  constexpr int kEntries = 29;
  constexpr double kLowDb = -6.7;
  constexpr double kHighDb = 22.0;
  constexpr double kTopSlotBytes = 40'000.0;  // 24 symbols at the top MCS
  constexpr double kSymbolsPerSlot = 24.0;
  auto efficiency = [](double db) { return std::log2(1.0 + std::pow(10.0, db / 10.0)); };
  const double top_eff = efficiency(kHighDb);
  std::vector<McsEntry> rows;
  rows.reserve(kEntries);
  for (int k = 0; k < kEntries; ++k) {
    const double raw_db = kLowDb + k * (kHighDb - kLowDb) / (kEntries - 1);
    const double threshold = std::round(raw_db * 1e4) / 1e4;
    const double slot_bytes = std::round(kTopSlotBytes * efficiency(threshold) / top_eff);
    rows.push_back({static_cast<McsIndex>(k), threshold, slot_bytes / kSymbolsPerSlot});
  }
  return McsTable(std::move(rows));
}

McsTable McsTable::parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<McsEntry> rows;
  bool header_seen = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "index,sinr_threshold_db,bytes_per_symbol") {
        throw ConfigError("MCS table: expected header 'index,sinr_threshold_db,bytes_per_symbol'");
      }
      header_seen = true;
      continue;
    }
    std::istringstream fields(line);
    std::string idx, thr, bps;
    if (!std::getline(fields, idx, ',') || !std::getline(fields, thr, ',') ||
        !std::getline(fields, bps)) {
      throw ConfigError(fmt::format("MCS table: malformed line {}", line_no));
    }
    try {
      rows.push_back({static_cast<McsIndex>(std::stoul(idx)), std::stod(thr), std::stod(bps)});
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("MCS table: non-numeric field on line {}", line_no));
    }
  }
  return McsTable(std::move(rows));
}

McsTable McsTable::load_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open MCS table '" + path + "'");
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_csv(buf.str());
}

std::string McsTable::to_csv() const {
  std::string out = "index,sinr_threshold_db,bytes_per_symbol\n";
  for (const auto& e : entries_) {
    out += fmt::format("{},{},{}\n", e.index, e.sinr_threshold_db, e.bytes_per_symbol);
  }
  return out;
}

std::optional<McsIndex> McsTable::select(double sinr_db) const {
  // First entry with threshold > sinr; the one before it is the answer.
  auto it = std::upper_bound(entries_.begin(), entries_.end(), sinr_db,
                             [](double v, const McsEntry& e) { return v < e.sinr_threshold_db; });
  if (it == entries_.begin()) return std::nullopt;
  return std::prev(it)->index;
}

const McsEntry& McsTable::entry(McsIndex mcs) const {
  if (mcs >= entries_.size()) throw ConfigError(fmt::format("unknown MCS index {}", mcs));
  return entries_[mcs];
}

std::uint64_t McsTable::gross_bytes(McsIndex mcs, std::uint32_t n_symbols) const {
  // The guard absorbs representation error of fractional per-symbol sizes
  // such as 40000/24.
  return static_cast<std::uint64_t>(std::floor(entry(mcs).bytes_per_symbol * n_symbols + 1e-6));
}

std::optional<McsIndex> select_mcs(const McsTable& table, double sinr_db) {
  return table.select(sinr_db);
}

std::uint64_t tb_size(const McsTable& table, std::optional<McsIndex> mcs, std::uint32_t n_symbols,
                      std::uint32_t header_bytes) {
  if (!mcs || n_symbols == 0) return 0;
  const std::uint64_t gross = table.gross_bytes(*mcs, n_symbols);
  return gross > header_bytes ? gross - header_bytes : 0;
}

std::vector<DciRecord> schedule_subframe(SimTime subframe_start,
                                         std::span<const SchedulingCandidate> backlogged,
                                         const McsTable& table, const PhyConfig& cfg) {
  struct Usable {
    UeId ue;
    McsIndex mcs;
  };
  std::vector<Usable> usable;
  usable.reserve(backlogged.size());
  for (const auto& c : backlogged) {
    if (auto mcs = table.select(c.sinr_db)) usable.push_back({c.ue, *mcs});
  }
  std::sort(usable.begin(), usable.end(), [](const Usable& a, const Usable& b) { return a.ue < b.ue; });

  std::vector<DciRecord> out;
  if (usable.empty()) return out;
  const std::uint32_t symbols = cfg.frame.symbols_per_subframe;
  const auto n = static_cast<std::uint32_t>(usable.size());
  const std::uint32_t share = symbols / n;
  const std::uint32_t remainder = symbols % n;
  out.reserve(usable.size());
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint32_t n_symbols = share + (i < remainder ? 1 : 0);
    if (n_symbols == 0) continue;
    const auto tb = tb_size(table, usable[i].mcs, n_symbols, cfg.tb_header_bytes);
    out.push_back({subframe_start, usable[i].ue, n_symbols, usable[i].mcs,
                   static_cast<std::uint32_t>(tb)});
  }
  return out;
}

double bler(double sinr_db, double threshold_db, const PhyConfig& cfg) {
  const double margin = cfg.bler_margin_db;
  const double p0 = cfg.bler_at_threshold;
  const double delta = sinr_db - threshold_db;
  if (delta >= margin) return 0.0;
  if (delta >= 0.0) return p0 * (1.0 - delta / margin);
  if (delta <= -margin) return 1.0;
  return p0 + (1.0 - p0) * (-delta / margin);
}

TbResult transmit_tb(const DciRecord& dci, const LinkState& link, const McsTable& table,
                     const PhyConfig& cfg, RngStream& tb_error_rng) {
  if (link.condition == LinkCondition::Outage) return TbResult::Lost;
  const double p = bler(link.sinr_db, table.entry(dci.mcs).sinr_threshold_db, cfg);
  if (p <= 0.0) return TbResult::Delivered;
  if (p >= 1.0) return TbResult::Lost;
  return tb_error_rng.uniform() < p ? TbResult::Lost : TbResult::Delivered;
}

}  // namespace xtcp
