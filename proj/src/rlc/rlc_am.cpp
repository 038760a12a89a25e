#include "xtcp/rlc/rlc_am.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "xtcp/error.hpp"

namespace xtcp {

void RlcConfig::validate() const {
  if (buffer_capacity_bytes == 0) throw ConfigError("rlc.buffer_bytes must be > 0");
  if (status_report_period == SimTime::zero()) throw ConfigError("rlc.status_report_ms must be > 0");
}

RlcAmEntity::RlcAmEntity(RlcConfig cfg) : cfg_(cfg) { cfg_.validate(); }

EnqueueResult RlcAmEntity::enqueue_sdu(std::uint64_t tag, std::uint32_t bytes, SimTime now) {
  if (bytes == 0) throw ConfigError("RLC SDU must not be empty");
  counters_.offered_bytes += bytes;
  if (occupancy_ + bytes > cfg_.buffer_capacity_bytes) {
    counters_.dropped_bytes += bytes;
    ++counters_.dropped_sdus;
    return EnqueueResult::Dropped;
  }
  sdus_.push_back(Sdu{tag, bytes, 0, 0, now, SduState::Queued});
  occupancy_ += bytes;
  counters_.accepted_bytes += bytes;
  return EnqueueResult::Accepted;
}

RlcAmEntity::Pdu& RlcAmEntity::pdu(RlcSn sn) {
  if (sn < sn_base_ || sn - sn_base_ >= pdus_.size()) {
    throw ConfigError(fmt::format("RLC: unknown SN {}", sn));
  }
  return pdus_[sn - sn_base_];
}

std::vector<PduSegment> RlcAmEntity::fill_tb(std::uint64_t tb_bytes, SimTime now) {
  std::vector<PduSegment> out;
  const std::uint64_t overhead = cfg_.pdu_overhead();
  std::uint64_t remaining = tb_bytes;

  while (!retx_queue_.empty() && remaining > overhead) {
    NackedSegment& seg = retx_queue_.front();
    const auto take = static_cast<std::uint32_t>(std::min<std::uint64_t>(seg.length, remaining - overhead));
    out.push_back({seg.sn, seg.offset, take, true});
    ++counters_.retransmitted_segments;
    retx_bytes_ -= take;
    remaining -= take + overhead;
    if (take == seg.length) {
      retx_queue_.pop_front();
    } else {
      seg.offset += take;
      seg.length -= take;
    }
  }

  const std::uint64_t sdu_end = sdu_base_ + sdus_.size();
  while (next_fresh_ < sdu_end && remaining > overhead) {
    Sdu& s = sdu(next_fresh_);
    if (s.state == SduState::Discarded) {
      ++next_fresh_;
      continue;
    }
    const auto take =
        static_cast<std::uint32_t>(std::min<std::uint64_t>(s.bytes - s.sent, remaining - overhead));
    const RlcSn sn = sn_base_ + pdus_.size();
    pdus_.push_back(Pdu{next_fresh_, take});
    out.push_back({sn, 0, take, false});
    s.sent += take;
    occupancy_ -= take;
    outstanding_ += take;
    counters_.queue_delay_byte_seconds += static_cast<double>(take) * (now - s.arrival).seconds();
    remaining -= take + overhead;
    if (s.sent == s.bytes) {
      s.state = SduState::Sent;
      ++next_fresh_;
    }
  }
  return out;
}

void RlcAmEntity::on_tb_result(std::span<const PduSegment> pdus, TbResult result,
                               std::vector<SduOutcome>& released) {
  for (const auto& seg : pdus) {
    if (seg.sn < sn_base_) continue;  // SDU already gone
    Pdu& p = pdu(seg.sn);
    Sdu& s = sdu(p.sdu);
    if (s.state == SduState::Discarded) continue;
    if (result == TbResult::Lost) {
      pending_nacks_.push_back({seg.sn, seg.offset, seg.length});
      continue;
    }
    p.received += seg.length;
    s.received += seg.length;
    if (p.received == p.length) pending_acks_.push_back(seg.sn);
  }
  if (result == TbResult::Delivered) release_in_order(released);
}

StatusReport RlcAmEntity::make_status_report() {
  StatusReport r;
  r.acked.swap(pending_acks_);
  r.nacked.swap(pending_nacks_);
  return r;
}

void RlcAmEntity::on_status_report(const StatusReport& report, std::vector<SduOutcome>& discarded,
                                   std::vector<SduOutcome>& released) {
  for (RlcSn sn : report.acked) {
    if (sn < sn_base_) continue;
    pdu(sn).acked = true;
  }
  // A PDU counts one retransmission per report, however many of its
  // segments were lost.
  RlcSn last_counted = ~RlcSn{0};
  for (const auto& nack : report.nacked) {
    if (nack.sn < sn_base_) continue;
    Pdu& p = pdu(nack.sn);
    if (sdu(p.sdu).state == SduState::Discarded) continue;
    if (nack.sn != last_counted) {
      ++p.retx_count;
      last_counted = nack.sn;
    }
    if (p.retx_count > cfg_.max_retx) {
      discard_sdu(p.sdu, discarded);
      continue;
    }
    retx_queue_.push_back(nack);
    retx_bytes_ += nack.length;
  }
  release_in_order(released);
}

void RlcAmEntity::discard_sdu(std::uint64_t idx, std::vector<SduOutcome>& discarded) {
  Sdu& s = sdu(idx);
  if (s.state == SduState::Discarded || s.state == SduState::Released) return;
  occupancy_ -= s.bytes - s.sent;
  outstanding_ -= s.sent;
  counters_.discarded_bytes += s.bytes;
  ++counters_.discarded_sdus;
  s.state = SduState::Discarded;
  if (idx == next_fresh_) ++next_fresh_;
  std::erase_if(retx_queue_, [&](const NackedSegment& seg) {
    if (pdus_[seg.sn - sn_base_].sdu != idx) return false;
    retx_bytes_ -= seg.length;
    return true;
  });
  discarded.push_back({s.tag, s.bytes});
}

void RlcAmEntity::release_in_order(std::vector<SduOutcome>& released) {
  const std::uint64_t sdu_end = sdu_base_ + sdus_.size();
  while (next_release_ < sdu_end) {
    Sdu& s = sdu(next_release_);
    if (s.state == SduState::Discarded) {
      ++next_release_;
      continue;
    }
    if (s.received != s.bytes) break;
    s.state = SduState::Released;
    counters_.delivered_bytes += s.bytes;
    outstanding_ -= s.bytes;
    released.push_back({s.tag, s.bytes});
    ++next_release_;
  }
  trim();
}

void RlcAmEntity::trim() {
  while (!pdus_.empty()) {
    const SduState st = sdu(pdus_.front().sdu).state;
    if (st != SduState::Released && st != SduState::Discarded) break;
    if (pdus_.front().sdu >= next_release_) break;
    pdus_.pop_front();
    ++sn_base_;
  }
  while (!sdus_.empty() && sdu_base_ < next_release_ && sdu_base_ < next_fresh_) {
    if (!pdus_.empty() && pdus_.front().sdu == sdu_base_) break;
    sdus_.pop_front();
    ++sdu_base_;
  }
}

bool RlcAmEntity::conservation_holds() const {
  return counters_.offered_bytes == counters_.delivered_bytes + counters_.dropped_bytes +
                                        counters_.discarded_bytes + occupancy_ + outstanding_;
}

bool RlcAmEntity::audit() const {
  std::uint64_t queued = 0;
  std::uint64_t in_flight = 0;
  for (const auto& s : sdus_) {
    if (s.state == SduState::Released || s.state == SduState::Discarded) continue;
    queued += s.bytes - s.sent;
    in_flight += s.sent;
  }
  std::uint64_t retx = 0;
  for (const auto& seg : retx_queue_) retx += seg.length;
  return queued == occupancy_ && in_flight == outstanding_ && retx == retx_bytes_ &&
         occupancy_ <= cfg_.buffer_capacity_bytes && conservation_holds();
}

}  // namespace xtcp
