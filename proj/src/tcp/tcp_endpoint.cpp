#include "xtcp/tcp/tcp_endpoint.hpp"

#include <algorithm>

#include "xtcp/error.hpp"

namespace xtcp {

void TcpConfig::validate() const {
  if (mss == 0) throw ConfigError("tcp.mss must be > 0");
  if (dupack_threshold == 0) throw ConfigError("tcp.dupack_threshold must be > 0");
  rtt.validate();
}

std::string_view to_string(TcpPhase p) {
  switch (p) {
    case TcpPhase::SlowStart: return "slow_start";
    case TcpPhase::CongestionAvoidance: return "cong_avoid";
    case TcpPhase::FastRecovery: return "fast_recovery";
  }
  return "?";
}

TcpSender::TcpSender(TcpConfig cfg, std::unique_ptr<CongestionControl> cc, CrossLayerQuery* cross)
    : cfg_(cfg), cc_(std::move(cc)), cross_(cross), rtt_(cfg.rtt) {
  cfg_.validate();
  if (!cc_) throw ConfigError("TCP sender needs a congestion controller");
  if (cc_->cross_layer() && !cross_) throw ConfigError("cross-layer controller without a radio query");
  w_.cwnd = cfg_.mss;
  w_.ssthresh = kInfiniteWindow;
}

TcpPhase TcpSender::phase() const {
  if (in_recovery_) return TcpPhase::FastRecovery;
  return w_.cwnd < w_.ssthresh ? TcpPhase::SlowStart : TcpPhase::CongestionAvoidance;
}

void TcpSender::apply(Window w) {
  w.cwnd = std::max(w.cwnd, static_cast<double>(cfg_.mss));
  w_ = w;
}

void TcpSender::emit(std::uint64_t seq, std::uint32_t len, SimTime now, bool retx,
                     std::vector<Segment>& out) {
  out.push_back({seq, len, now, retx});
  ++counters_.segments_sent;
  if (retx) ++counters_.retransmissions;
  if (rto_deadline_.is_infinite()) rto_deadline_ = now + rtt_.rto();
}

void TcpSender::retransmit_head(SimTime now, std::vector<Segment>& out) {
  const auto len = static_cast<std::uint32_t>(std::min<std::uint64_t>(cfg_.mss, snd_max_ - snd_una_));
  if (len > 0) emit(snd_una_, len, now, true, out);
}

void TcpSender::send_available(SimTime now, std::vector<Segment>& out) {
  for (;;) {
    const std::uint64_t flight = snd_nxt_ - snd_una_;
    std::uint32_t len;
    bool retx = false;
    if (snd_nxt_ < snd_max_) {
      len = static_cast<std::uint32_t>(std::min<std::uint64_t>(cfg_.mss, snd_max_ - snd_nxt_));
      retx = true;
    } else {
      const std::uint64_t avail = app_end_ - snd_nxt_;
      // Partial segments only go out when nothing is outstanding.
      if (avail == 0 || (avail < cfg_.mss && flight > 0)) {
        window_blocked_ = false;
        return;
      }
      len = static_cast<std::uint32_t>(std::min<std::uint64_t>(cfg_.mss, avail));
    }
    if (static_cast<double>(flight + len) > w_.cwnd) {
      window_blocked_ = true;
      return;
    }
    emit(snd_nxt_, len, now, retx, out);
    snd_nxt_ += len;
    snd_max_ = std::max(snd_max_, snd_nxt_);
  }
}

AckContext TcpSender::make_context(SimTime now, std::uint64_t acked, SimTime sample, bool limited) {
  AckContext ctx;
  ctx.now = now;
  ctx.acked_bytes = acked;
  ctx.rtt_sample = sample;
  ctx.rtt = &rtt_;
  ctx.mss = cfg_.mss;
  ctx.cwnd_limited = limited;
  if (cc_->cross_layer()) ctx.cross = cross_->query(now);
  return ctx;
}

void TcpSender::on_ack(const Ack& ack, SimTime now, std::vector<Segment>& out) {
  if (ack.ack > snd_max_) throw ConfigError("ACK beyond the highest sequence sent");
  const SimTime sample = now - ack.tsecr;
  if (sample > SimTime::zero()) rtt_.on_sample(sample);

  const auto flight = static_cast<double>(snd_nxt_ - snd_una_);
  const bool limited = window_blocked_ || flight + cfg_.mss >= w_.cwnd ||
                       (w_.cwnd < w_.ssthresh && 2.0 * flight > w_.cwnd);
  const bool cross = cc_->cross_layer();

  if (ack.ack > snd_una_) {
    const std::uint64_t acked = ack.ack - snd_una_;
    snd_una_ = ack.ack;
    snd_nxt_ = std::max(snd_nxt_, snd_una_);
    dupacks_ = 0;
    if (in_recovery_) {
      if (snd_una_ >= recover_) {
        in_recovery_ = false;
        if (!cross) apply({w_.ssthresh, w_.ssthresh});
      } else {
        // Partial ACK: the next hole is at snd_una.
        retransmit_head(now, out);
        if (!cross) {
          double cwnd = w_.cwnd - static_cast<double>(acked);
          if (acked >= cfg_.mss) cwnd += cfg_.mss;
          apply({cwnd, w_.ssthresh});
        }
        rto_deadline_ = now + rtt_.rto();
      }
      if (cross) apply(cc_->on_ack(make_context(now, acked, sample, limited), w_));
    } else {
      apply(cc_->on_ack(make_context(now, acked, sample, limited), w_));
    }
    rto_deadline_ = snd_una_ == snd_max_ ? SimTime::infinite() : now + rtt_.rto();
  } else if (ack.ack == snd_una_ && snd_max_ > snd_una_) {
    ++dupacks_;
    if (cross) apply(cc_->on_ack(make_context(now, 0, sample, limited), w_));
    if (in_recovery_) {
      if (!cross) apply({w_.cwnd + cfg_.mss, w_.ssthresh});
    } else if (dupacks_ == cfg_.dupack_threshold && snd_una_ >= recover_) {
      LossContext lc{now, snd_max_ - snd_una_, cfg_.mss, &rtt_};
      Window w = cc_->on_dup_ack_loss(lc, w_);
      if (!cross) w.cwnd = w.ssthresh + 3.0 * cfg_.mss;
      apply(w);
      in_recovery_ = true;
      recover_ = snd_max_;
      ++counters_.fast_retransmits;
      retransmit_head(now, out);
      rto_deadline_ = now + rtt_.rto();
    }
  }
  send_available(now, out);
}

bool TcpSender::on_timer(SimTime now, std::vector<Segment>& out) {
  if (rto_deadline_.is_infinite() || now < rto_deadline_) return false;
  ++counters_.timeouts;
  LossContext lc{now, snd_nxt_ - snd_una_, cfg_.mss, &rtt_};
  apply(cc_->on_rto(lc, w_));
  rtt_.backoff();
  recover_ = snd_max_;
  in_recovery_ = false;
  dupacks_ = 0;
  snd_nxt_ = snd_una_;
  rto_deadline_ = SimTime::infinite();
  send_available(now, out);
  if (rto_deadline_.is_infinite() && snd_max_ > snd_una_) rto_deadline_ = now + rtt_.rto();
  return true;
}

Ack TcpReceiver::on_segment(const Segment& seg) {
  const std::uint64_t end = seg.seq + seg.length;
  if (end <= rcv_nxt_) {
    duplicate_bytes_ += seg.length;
  } else if (seg.seq <= rcv_nxt_) {
    rcv_nxt_ = end;
    auto it = ooo_.begin();
    while (it != ooo_.end() && it->first <= rcv_nxt_) {
      rcv_nxt_ = std::max(rcv_nxt_, it->second);
      it = ooo_.erase(it);
    }
  } else {
    auto [it, inserted] = ooo_.try_emplace(seg.seq, end);
    if (!inserted) {
      if (it->second >= end) duplicate_bytes_ += seg.length;
      it->second = std::max(it->second, end);
    }
  }
  return {rcv_nxt_, seg.tsval};
}

}  // namespace xtcp
