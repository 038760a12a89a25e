#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string_view>
#include <vector>

#include "xtcp/sim/sim_time.hpp"
#include "xtcp/tcp/congestion_control.hpp"
#include "xtcp/tcp/rtt_estimator.hpp"

namespace xtcp {

struct TcpConfig {
  std::uint32_t mss = 1400;
  std::uint32_t tcp_header_bytes = 32;  // 20 B base header + timestamp option
  std::uint32_t ip_header_bytes = 20;
  std::uint32_t dupack_threshold = 3;
  RttConfig rtt;

  std::uint32_t packet_bytes(std::uint32_t payload) const {
    return payload + tcp_header_bytes + ip_header_bytes;
  }
  void validate() const;
};

struct Segment {
  std::uint64_t seq = 0;
  std::uint32_t length = 0;
  SimTime tsval;
  bool retransmission = false;
};

struct Ack {
  std::uint64_t ack = 0;
  SimTime tsecr;
};

enum class TcpPhase { SlowStart, CongestionAvoidance, FastRecovery };

std::string_view to_string(TcpPhase p);

/// Read-only view of the UE radio stack used by cross-layer controllers.
class CrossLayerQuery {
 public:
  virtual ~CrossLayerQuery() = default;
  virtual CrossLayerInfo query(SimTime now) = 0;
};

/// Bulk-data TCP sender: byte sequence space, RFC 6298 timer, fast
/// retransmit and NewReno recovery (RFC 6582), go-back-N after a timeout.
///
/// The sender never arms its own timer; the owner reads rto_deadline() after
/// each call and invokes on_timer() when it is reached.
class TcpSender {
 public:
  TcpSender(TcpConfig cfg, std::unique_ptr<CongestionControl> cc, CrossLayerQuery* cross = nullptr);

  /// Appends application bytes to the stream.
  void write(std::uint64_t bytes) { app_end_ += bytes; }
  std::uint64_t unsent_bytes() const { return app_end_ - snd_max_; }
  bool has_data_to_send() const { return app_end_ > snd_max_ || snd_nxt_ < snd_max_; }

  /// Emits as many segments as the window allows.
  void send_available(SimTime now, std::vector<Segment>& out);
  void on_ack(const Ack& ack, SimTime now, std::vector<Segment>& out);
  /// Handles a timer event. Returns true if a retransmission timeout fired.
  bool on_timer(SimTime now, std::vector<Segment>& out);

  SimTime rto_deadline() const { return rto_deadline_; }
  double cwnd() const { return w_.cwnd; }
  double ssthresh() const { return w_.ssthresh; }
  std::uint64_t snd_una() const { return snd_una_; }
  std::uint64_t snd_nxt() const { return snd_nxt_; }
  std::uint64_t snd_max() const { return snd_max_; }
  std::uint64_t bytes_in_flight() const { return snd_nxt_ - snd_una_; }
  TcpPhase phase() const;
  const RttEstimator& rtt() const { return rtt_; }
  const CongestionControl& cc() const { return *cc_; }
  const TcpConfig& config() const { return cfg_; }

  struct Counters {
    std::uint64_t segments_sent = 0;
    std::uint64_t retransmissions = 0;
    std::uint64_t fast_retransmits = 0;
    std::uint64_t timeouts = 0;
  };
  const Counters& counters() const { return counters_; }

 private:
  void emit(std::uint64_t seq, std::uint32_t len, SimTime now, bool retx, std::vector<Segment>& out);
  void retransmit_head(SimTime now, std::vector<Segment>& out);
  void apply(Window w);
  AckContext make_context(SimTime now, std::uint64_t acked, SimTime sample, bool limited);

  TcpConfig cfg_;
  std::unique_ptr<CongestionControl> cc_;
  CrossLayerQuery* cross_;
  RttEstimator rtt_;
  Window w_;
  std::uint64_t app_end_ = 0;
  std::uint64_t snd_una_ = 0;
  std::uint64_t snd_nxt_ = 0;
  std::uint64_t snd_max_ = 0;
  std::uint32_t dupacks_ = 0;
  bool in_recovery_ = false;
  std::uint64_t recover_ = 0;
  bool window_blocked_ = false;
  SimTime rto_deadline_ = SimTime::infinite();
  Counters counters_;
};

/// Cumulative-ACK receiver that acknowledges every segment and echoes the
/// segment's timestamp.
class TcpReceiver {
 public:
  Ack on_segment(const Segment& seg);

  /// Bytes delivered in order to the application.
  std::uint64_t delivered_bytes() const { return rcv_nxt_; }
  std::uint64_t duplicate_bytes() const { return duplicate_bytes_; }
  std::size_t out_of_order_blocks() const { return ooo_.size(); }

 private:
  std::uint64_t rcv_nxt_ = 0;
  std::uint64_t duplicate_bytes_ = 0;
  std::map<std::uint64_t, std::uint64_t> ooo_;  // start -> end
};

}  // namespace xtcp
