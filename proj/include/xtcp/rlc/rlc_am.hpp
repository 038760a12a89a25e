#pragma once

#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "xtcp/phy/phy_mac.hpp"
#include "xtcp/sim/sim_time.hpp"

namespace xtcp {

struct RlcConfig {
  std::uint64_t buffer_capacity_bytes = 10'000'000;
  std::uint32_t rlc_header_bytes = 3;
  std::uint32_t mac_subheader_bytes = 2;
  std::uint32_t pdcp_header_bytes = 3;
  SimTime status_report_period = SimTime::from_ms(5);
  std::uint32_t max_retx = 16;

  std::uint32_t pdu_overhead() const { return rlc_header_bytes + mac_subheader_bytes; }
  void validate() const;
};

using RlcSn = std::uint64_t;

/// Part of one PDU carried in a transport block. A first transmission sends
/// the whole PDU; retransmissions may be re-segmented.
struct PduSegment {
  RlcSn sn = 0;
  std::uint32_t offset = 0;  // within the PDU payload
  std::uint32_t length = 0;
  bool retransmission = false;

  bool operator==(const PduSegment&) const = default;
};

struct NackedSegment {
  RlcSn sn = 0;
  std::uint32_t offset = 0;
  std::uint32_t length = 0;
};

struct StatusReport {
  std::vector<RlcSn> acked;
  std::vector<NackedSegment> nacked;

  bool empty() const { return acked.empty() && nacked.empty(); }
};

/// One SDU leaving the entity: released in order at the receiving side or
/// discarded after exhausting retransmissions.
struct SduOutcome {
  std::uint64_t tag = 0;
  std::uint32_t bytes = 0;
};

enum class EnqueueResult { Accepted, Dropped };

/// Uplink RLC Acknowledged Mode link: the UE transmit side (finite SDU
/// buffer, segmentation, ARQ) and the eNB receive side (reassembly,
/// in-order release, status reports).
///
/// Each PDU carries a piece of exactly one SDU. SDUs are identified by a
/// caller-chosen tag.
class RlcAmEntity {
 public:
  explicit RlcAmEntity(RlcConfig cfg);

  EnqueueResult enqueue_sdu(std::uint64_t tag, std::uint32_t bytes, SimTime now);

  /// Builds the content of a transport block of `tb_bytes`: retransmissions
  /// first, then fresh PDUs from the SDU queue.
  std::vector<PduSegment> fill_tb(std::uint64_t tb_bytes, SimTime now);

  /// Receive side learns the outcome of a transport block. Delivered SDUs
  /// completed in order are appended to `released`.
  void on_tb_result(std::span<const PduSegment> pdus, TbResult result,
                    std::vector<SduOutcome>& released);

  /// Status report covering everything the receiver learned since the last
  /// one. Clears the pending lists.
  StatusReport make_status_report();

  /// Transmit side processes a status report. NACKed segments are queued for
  /// retransmission; SDUs whose PDUs exceed max_retx are discarded and
  /// appended to `discarded`. SDUs unblocked by a discard are appended to
  /// `released`. Throws ConfigError for an unknown SN.
  void on_status_report(const StatusReport& report, std::vector<SduOutcome>& discarded,
                        std::vector<SduOutcome>& released);

  bool has_pending_data() const { return occupancy_ > 0 || !retx_queue_.empty(); }
  std::uint64_t occupancy() const { return occupancy_; }
  std::uint64_t retx_queue_bytes() const { return retx_bytes_; }
  const RlcConfig& config() const { return cfg_; }

  struct Counters {
    std::uint64_t offered_bytes = 0;
    std::uint64_t accepted_bytes = 0;
    std::uint64_t dropped_bytes = 0;
    std::uint64_t delivered_bytes = 0;
    std::uint64_t discarded_bytes = 0;
    std::uint64_t dropped_sdus = 0;
    std::uint64_t discarded_sdus = 0;
    std::uint64_t retransmitted_segments = 0;
    // Sum over fresh bytes of (time taken from the queue - arrival), in
    // byte-seconds, for queueing-delay accounting.
    double queue_delay_byte_seconds = 0.0;
  };
  const Counters& counters() const { return counters_; }

  /// Bytes of accepted SDUs that have left the queue but are neither
  /// released nor discarded yet.
  std::uint64_t outstanding_bytes() const { return outstanding_; }

  /// offered == delivered + dropped + discarded + occupancy + outstanding.
  bool conservation_holds() const;
  /// Slow cross-check: recomputes occupancy and outstanding bytes from the
  /// queue and SN records.
  bool audit() const;

 private:
  enum class SduState : std::uint8_t { Queued, Sent, Released, Discarded };
  struct Sdu {
    std::uint64_t tag;
    std::uint32_t bytes;
    std::uint32_t sent = 0;      // fresh bytes taken from the queue
    std::uint32_t received = 0;  // bytes received at the eNB
    SimTime arrival;
    SduState state = SduState::Queued;
  };
  struct Pdu {
    std::uint64_t sdu;  // SDU index
    std::uint32_t length;
    std::uint32_t received = 0;
    std::uint32_t retx_count = 0;
    bool acked = false;
  };

  Sdu& sdu(std::uint64_t idx) { return sdus_[idx - sdu_base_]; }
  const Sdu& sdu(std::uint64_t idx) const { return sdus_[idx - sdu_base_]; }
  Pdu& pdu(RlcSn sn);
  void release_in_order(std::vector<SduOutcome>& released);
  void discard_sdu(std::uint64_t idx, std::vector<SduOutcome>& discarded);
  void trim();

  RlcConfig cfg_;
  std::deque<Sdu> sdus_;
  std::uint64_t sdu_base_ = 0;   // index of sdus_.front()
  std::uint64_t next_fresh_ = 0; // first SDU with unsent bytes
  std::uint64_t next_release_ = 0;
  std::deque<Pdu> pdus_;
  RlcSn sn_base_ = 0;
  std::deque<NackedSegment> retx_queue_;
  std::uint64_t retx_bytes_ = 0;
  std::uint64_t occupancy_ = 0;
  std::uint64_t outstanding_ = 0;
  std::vector<RlcSn> pending_acks_;
  std::vector<NackedSegment> pending_nacks_;
  Counters counters_;
};

}  // namespace xtcp
