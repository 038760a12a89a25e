#include "xtcp/runner/simulation.hpp"

#include <cmath>
#include <deque>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>

#include <fmt/format.h>

#include "xtcp/app/traffic.hpp"
#include "xtcp/error.hpp"
#include "xtcp/sim/rng.hpp"
#include "xtcp/sim/simulator.hpp"
#include "xtcp/tcp/datarate.hpp"

namespace xtcp {

double RunResult::value(const std::string& name) const {
  for (const auto& [k, v] : summary) {
    if (k == name) return v;
  }
  throw ConfigError("run summary has no metric '" + name + "'");
}

namespace {

class RadioView : public CrossLayerQuery {
 public:
  RadioView(SimTime window, double eta) : estimator(window, eta) {}
  CrossLayerInfo query(SimTime now) override { return {estimator.rate_bps(now), sinr_db}; }

  DatarateEstimator estimator;
  double sinr_db = 0.0;
};

struct InFlightSdu {
  Segment segment;
  bool done = false;
};

template <class T>
struct Timed {
  SimTime arrival;
  T item;
};

struct UeStack {
  UeStack(UeId id_, const Scenario& sc, double eta, SimTime established)
      : id(id_),
        flavor(sc.ues[id_].cc),
        radio(std::make_unique<RadioView>(sc.cc.xtcp.datarate_window, eta)),
        sender(std::make_unique<TcpSender>(sc.tcp, make_congestion_control(flavor, sc.cc), radio.get())),
        rlc(sc.rlc),
        bucket(TokenBucket::from_config(sc.traffic, established)),
        start(established) {}

  UeId id;
  CcFlavor flavor;
  std::unique_ptr<RadioView> radio;
  std::unique_ptr<TcpSender> sender;
  TcpReceiver receiver;
  RlcAmEntity rlc;
  TokenBucket bucket;
  SimTime start;  // flow established

  std::deque<InFlightSdu> sdus;  // indexed by tag - sdu_base
  std::uint64_t sdu_base = 0;

  std::vector<PduSegment> tb;
  DciRecord dci;
  TbResult tb_result = TbResult::Delivered;
  bool tb_pending = false;
  LinkState link;

  std::deque<Timed<Segment>> uplink;
  SimTime uplink_scheduled;
  std::deque<Timed<Ack>> downlink;
  SimTime downlink_scheduled;
  SimTime timer_at = SimTime::infinite();

  // Statistics after warm-up.
  std::uint64_t goodput_bytes = 0;
  double rtt_sum_s = 0.0;
  std::uint64_t rtt_n = 0;
  double rtt_integral_s2 = 0.0;
  SimTime rtt_last_change;
  double rtt_last_s = 0.0;
  bool rtt_seen = false;
  double occupancy_sum = 0.0;
  std::uint64_t occupancy_n = 0;
  std::uint64_t gross_phy_bytes = 0;
  std::uint64_t allocated_subframes = 0;
  std::uint64_t window_start_delivered = 0;
};

class Engine {
 public:
  explicit Engine(const Scenario& sc)
      : sc_(sc),
        table_(sc.phy.mcs_table_path.empty() ? McsTable::default_table()
                                             : McsTable::load_csv(sc.phy.mcs_table_path)),
        channel_(sc.channel, sc.enb, sc.materialize_obstacles(), trajectories(sc), sc.forced_outages, sc.seed),
        tb_rng_(sc.seed, "tb_error"),
        wired_(sc.traffic.wired_one_way()),
        ack_delay_(sc.traffic.wired_one_way() + sc.traffic.downlink_ack_delay) {
    const double eta = overhead_factor(sc.tcp.mss, sc.cc.xtcp.header_overhead_bytes);
    // The connection handshake takes one round trip before data flows.
    const SimTime handshake = wired_ + ack_delay_ + sc.phy.frame.subframe_duration;
    for (UeId i = 0; i < sc.ues.size(); ++i) {
      ues_.push_back(std::make_unique<UeStack>(i, sc, eta, sc.ues[i].trajectory.start_time + handshake));
    }
  }

  RunResult run() {
    if (sc_.output.check_invariants) {
      sim_.set_post_dispatch_hook([this] { check_invariants(); });
    }
    sim_.schedule_at(SimTime::zero(), [this] { tick(); });
    sim_.schedule_at(sc_.output.sample_period, [this] { sample(); });
    sim_.schedule_at(sc_.output.goodput_window, [this] { goodput_window(); });
    result_.events = sim_.run_until(sc_.duration);
    finish();
    return std::move(result_);
  }

 private:
  static std::vector<Trajectory> trajectories(const Scenario& sc) {
    std::vector<Trajectory> out;
    for (const auto& u : sc.ues) out.push_back(u.trajectory);
    return out;
  }

  bool after_warmup(SimTime t) const { return t >= sc_.warmup; }

  void tick() {
    const SimTime now = sim_.now();
    for (auto& ue : ues_) {
      if (!ue->tb_pending) continue;
      released_.clear();
      ue->rlc.on_tb_result(ue->tb, ue->tb_result, released_);
      ue->tb_pending = false;
      forward(*ue, now);
    }
    if (now.ns() % sc_.rlc.status_report_period.ns() == 0) {
      for (auto& ue : ues_) {
        const StatusReport report = ue->rlc.make_status_report();
        if (report.empty()) continue;
        released_.clear();
        discarded_.clear();
        ue->rlc.on_status_report(report, discarded_, released_);
        for (const auto& d : discarded_) ue->sdus[d.tag - ue->sdu_base].done = true;
        forward(*ue, now);
      }
    }

    candidates_.clear();
    for (auto& ue : ues_) {
      if (now < ue->start) continue;
      TcpSender& s = *ue->sender;
      s.write(ue->bucket.refill(now, s.unsent_bytes()));
      segments_.clear();
      s.send_available(now, segments_);
      enqueue(*ue, now);
      update_timer(*ue);

      if (after_warmup(now)) {
        ue->occupancy_sum += static_cast<double>(ue->rlc.occupancy());
        ++ue->occupancy_n;
      }
      ue->link = channel_.sinr_at(ue->id, now);
      ue->radio->sinr_db = ue->link.sinr_db;
      // A UE with anything waiting in its stack asks for resources.
      if (ue->rlc.has_pending_data() || s.has_data_to_send()) {
        candidates_.push_back({ue->id, ue->link.sinr_db});
      }
    }

    for (const auto& dci : schedule_subframe(now, candidates_, table_, sc_.phy)) {
      UeStack& ue = *ues_[dci.ue];
      ue.radio->estimator.add(dci);
      if (after_warmup(now)) {
        ue.gross_phy_bytes += table_.gross_bytes(dci.mcs, dci.n_symbols);
        ++ue.allocated_subframes;
      }
      ue.tb = ue.rlc.fill_tb(dci.tb_bytes, now);
      ue.dci = dci;
      ue.tb_result = transmit_tb(dci, ue.link, table_, sc_.phy, tb_rng_);
      ue.tb_pending = true;
      if (sc_.output.dci_trace) {
        result_.dci_trace += fmt::format("{},{},{},{},{},{}\n", now.ns(), dci.ue, dci.n_symbols, dci.mcs,
                                         dci.tb_bytes, ue.tb_result == TbResult::Lost ? 1 : 0);
      }
    }

    const SimTime next = now + sc_.phy.frame.subframe_duration;
    if (next < sc_.duration) sim_.schedule_at(next, [this] { tick(); });
  }

  void enqueue(UeStack& ue, SimTime now) {
    const std::uint32_t extra = sc_.rlc.pdcp_header_bytes;
    for (const auto& seg : segments_) {
      const std::uint64_t tag = ue.sdu_base + ue.sdus.size();
      const auto bytes = sc_.tcp.packet_bytes(seg.length) + extra;
      if (ue.rlc.enqueue_sdu(tag, bytes, now) == EnqueueResult::Accepted) ue.sdus.push_back({seg, false});
    }
  }

  // Hands SDUs released by the eNB to the wired path.
  void forward(UeStack& ue, SimTime now) {
    const SimTime arrival = now + wired_;
    for (const auto& r : released_) {
      InFlightSdu& s = ue.sdus[r.tag - ue.sdu_base];
      s.done = true;
      ue.uplink.push_back({arrival, s.segment});
    }
    while (!ue.sdus.empty() && ue.sdus.front().done) {
      ue.sdus.pop_front();
      ++ue.sdu_base;
    }
    if (!released_.empty() && ue.uplink_scheduled != arrival) {
      ue.uplink_scheduled = arrival;
      UeStack* p = &ue;
      sim_.schedule_at(arrival, [this, p] { drain_uplink(*p); });
    }
  }

  void drain_uplink(UeStack& ue) {
    const SimTime now = sim_.now();
    const SimTime arrival = now + ack_delay_;
    bool any = false;
    while (!ue.uplink.empty() && ue.uplink.front().arrival <= now) {
      const std::uint64_t before = ue.receiver.delivered_bytes();
      const Ack ack = ue.receiver.on_segment(ue.uplink.front().item);
      ue.uplink.pop_front();
      if (after_warmup(now)) ue.goodput_bytes += ue.receiver.delivered_bytes() - before;
      ue.downlink.push_back({arrival, ack});
      any = true;
    }
    if (any && ue.downlink_scheduled != arrival) {
      ue.downlink_scheduled = arrival;
      UeStack* p = &ue;
      sim_.schedule_at(arrival, [this, p] { drain_downlink(*p); });
    }
  }

  void drain_downlink(UeStack& ue) {
    const SimTime now = sim_.now();
    segments_.clear();
    while (!ue.downlink.empty() && ue.downlink.front().arrival <= now) {
      const Ack ack = ue.downlink.front().item;
      ue.downlink.pop_front();
      ue.sender->on_ack(ack, now, segments_);
      note_rtt(ue, now, now - ack.tsecr);
    }
    enqueue(ue, now);
    update_timer(ue);
  }

  void note_rtt(UeStack& ue, SimTime now, SimTime sample) {
    const double s = sample.seconds();
    if (after_warmup(now)) {
      ue.rtt_sum_s += s;
      ++ue.rtt_n;
      if (ue.rtt_seen) {
        const SimTime from = std::max(ue.rtt_last_change, sc_.warmup);
        ue.rtt_integral_s2 += ue.rtt_last_s * (now - from).seconds();
      }
    }
    ue.rtt_last_change = now;
    ue.rtt_last_s = s;
    ue.rtt_seen = true;
  }

  void update_timer(UeStack& ue) {
    const SimTime d = ue.sender->rto_deadline();
    if (d.is_infinite() || d >= ue.timer_at) return;
    ue.timer_at = d;
    UeStack* p = &ue;
    sim_.schedule_at(d, [this, p, d] { on_timer(*p, d); });
  }

  void on_timer(UeStack& ue, SimTime scheduled) {
    if (ue.timer_at != scheduled) return;  // superseded by an earlier timer
    ue.timer_at = SimTime::infinite();
    segments_.clear();
    ue.sender->on_timer(sim_.now(), segments_);
    enqueue(ue, sim_.now());
    update_timer(ue);
  }

  void sample() {
    const SimTime now = sim_.now();
    for (auto& ue : ues_) {
      const TcpSender& s = *ue->sender;
      auto& m = result_.metrics;
      m.record(now, ue->id, MetricKind::Cwnd, s.cwnd());
      m.record(now, ue->id, MetricKind::Srtt, s.rtt().has_sample() ? s.rtt().srtt().seconds() : 0.0);
      m.record(now, ue->id, MetricKind::RttSample, s.rtt().has_sample() ? s.rtt().latest().seconds() : 0.0);
      m.record(now, ue->id, MetricKind::RlcOccupancy, static_cast<double>(ue->rlc.occupancy()));
      if (sc_.output.flow_trace) {
        result_.flow_trace += fmt::format("{},{},{},{},{},{},{},{}\n", now.ns(), ue->id, s.cwnd(),
                                          std::isinf(s.ssthresh()) ? -1.0 : s.ssthresh(),
                                          s.rtt().srtt().ns(), s.rtt().rto().ns(), to_string(s.phase()),
                                          s.counters().retransmissions);
      }
      if (sc_.output.sinr_trace && now >= sc_.ues[ue->id].trajectory.start_time) {
        const LinkState ls = channel_.sinr_at(ue->id, now);
        result_.sinr_trace +=
            fmt::format("{},{},{},{}\n", now.ns(), ue->id, to_string(ls.condition), ls.sinr_db);
      }
    }
    const SimTime next = now + sc_.output.sample_period;
    if (next <= sc_.duration) sim_.schedule_at(next, [this] { sample(); });
  }

  void goodput_window() {
    const SimTime now = sim_.now();
    for (auto& ue : ues_) {
      const std::uint64_t delivered = ue->receiver.delivered_bytes();
      const double bps = static_cast<double>(delivered - ue->window_start_delivered) * 8.0 /
                         sc_.output.goodput_window.seconds();
      ue->window_start_delivered = delivered;
      result_.metrics.record(now, ue->id, MetricKind::GoodputWindow, bps);
    }
    const SimTime next = now + sc_.output.goodput_window;
    if (next <= sc_.duration) sim_.schedule_at(next, [this] { goodput_window(); });
  }

  void check_invariants() {
    for (auto& ue : ues_) {
      const TcpSender& s = *ue->sender;
      const bool ok = ue->rlc.conservation_holds() && ue->rlc.occupancy() <= sc_.rlc.buffer_capacity_bytes &&
                      s.cwnd() >= s.config().mss && s.snd_una() <= s.snd_nxt() &&
                      ue->receiver.delivered_bytes() <= s.snd_max();
      if (!ok) ++result_.invariant_violations;
    }
  }

  void finish() {
    const double span = (sc_.duration - sc_.warmup).seconds();
    auto& out = result_.summary;
    std::vector<double> goodputs;
    double rtt_sum = 0.0;
    std::uint64_t rtt_n = 0;
    double occ_sum = 0.0;
    struct FlavorAgg {
      double goodput = 0.0, rtt_sum = 0.0, occ = 0.0;
      std::uint64_t rtt_n = 0, count = 0;
    };
    std::map<std::string, FlavorAgg> by_flavor;

    for (auto& ue : ues_) {
      // Close the RTT step function at the end of the run.
      if (ue->rtt_seen) {
        const SimTime from = std::max(ue->rtt_last_change, sc_.warmup);
        ue->rtt_integral_s2 += ue->rtt_last_s * (sc_.duration - from).seconds();
      }
      const TcpSender& s = *ue->sender;
      const auto& rc = ue->rlc.counters();
      const double goodput = static_cast<double>(ue->goodput_bytes) * 8.0 / span;
      const double rtt_mean = ue->rtt_n ? ue->rtt_sum_s / static_cast<double>(ue->rtt_n) : 0.0;
      const double occ = ue->occupancy_n ? ue->occupancy_sum / static_cast<double>(ue->occupancy_n) : 0.0;
      const std::string p = fmt::format("ue{}.", ue->id);
      out.emplace_back(p + "goodput_bps", goodput);
      out.emplace_back(p + "rtt_mean_s", rtt_mean);
      out.emplace_back(p + "rtt_time_avg_s", ue->rtt_integral_s2 / span);
      out.emplace_back(p + "rtt_min_s", s.rtt().has_sample() ? s.rtt().rtt_min().seconds() : 0.0);
      out.emplace_back(p + "rlc_occupancy_mean_bytes", occ);
      out.emplace_back(p + "phy_gross_bps", static_cast<double>(ue->gross_phy_bytes) * 8.0 / span);
      out.emplace_back(p + "allocated_subframes", static_cast<double>(ue->allocated_subframes));
      out.emplace_back(p + "delivered_bytes", static_cast<double>(ue->receiver.delivered_bytes()));
      out.emplace_back(p + "retransmissions", static_cast<double>(s.counters().retransmissions));
      out.emplace_back(p + "fast_retransmits", static_cast<double>(s.counters().fast_retransmits));
      out.emplace_back(p + "timeouts", static_cast<double>(s.counters().timeouts));
      out.emplace_back(p + "rlc_dropped_bytes", static_cast<double>(rc.dropped_bytes));
      out.emplace_back(p + "rlc_discarded_bytes", static_cast<double>(rc.discarded_bytes));
      out.emplace_back(p + "rlc_retx_segments", static_cast<double>(rc.retransmitted_segments));

      goodputs.push_back(goodput);
      rtt_sum += ue->rtt_sum_s;
      rtt_n += ue->rtt_n;
      occ_sum += occ;
      auto& f = by_flavor[std::string(to_string(ue->flavor))];
      f.goodput += goodput;
      f.rtt_sum += ue->rtt_sum_s;
      f.rtt_n += ue->rtt_n;
      f.occ += occ;
      ++f.count;
    }
    const auto n = static_cast<double>(ues_.size());
    double goodput_total = 0.0;
    for (double g : goodputs) goodput_total += g;
    out.emplace_back("all.goodput_bps", goodput_total / n);
    out.emplace_back("all.rtt_mean_s", rtt_n ? rtt_sum / static_cast<double>(rtt_n) : 0.0);
    out.emplace_back("all.rlc_occupancy_mean_bytes", occ_sum / n);
    for (const auto& [name, f] : by_flavor) {
      const auto c = static_cast<double>(f.count);
      out.emplace_back("cc." + name + ".goodput_bps", f.goodput / c);
      out.emplace_back("cc." + name + ".rtt_mean_s", f.rtt_n ? f.rtt_sum / static_cast<double>(f.rtt_n) : 0.0);
      out.emplace_back("cc." + name + ".rlc_occupancy_mean_bytes", f.occ / c);
    }
    if (ues_.size() >= 2) {
      if (auto j = jain_index(goodputs)) out.emplace_back("jain_goodput", *j);
    }
  }

  const Scenario& sc_;
  Simulator sim_;
  McsTable table_;
  Channel channel_;
  RngStream tb_rng_;
  SimTime wired_;
  SimTime ack_delay_;
  std::vector<std::unique_ptr<UeStack>> ues_;
  RunResult result_;

  std::vector<SduOutcome> released_;
  std::vector<SduOutcome> discarded_;
  std::vector<Segment> segments_;
  std::vector<SchedulingCandidate> candidates_;
};

void write_file(const std::filesystem::path& path, const std::string& header, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path.string() + "'");
  f << header << body;
}

}  // namespace

RunResult run_simulation(const Scenario& sc) {
  sc.validate();
  Engine engine(sc);
  return engine.run();
}

void write_run_outputs(const std::string& dir, const RunResult& result) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create '" + dir + "': " + ec.message());
  {
    std::ofstream f(fs::path(dir) / "metrics.csv", std::ios::binary);
    if (!f) throw ConfigError("cannot write metrics.csv in '" + dir + "'");
    result.metrics.write_csv(f);
  }
  std::string summary;
  for (const auto& [k, v] : result.summary) summary += fmt::format("{},{}\n", k, v);
  write_file(fs::path(dir) / "summary.csv", "metric,value\n", summary);
  if (!result.sinr_trace.empty()) {
    write_file(fs::path(dir) / "sinr.csv", "t_ns,ue_id,condition,sinr_db\n", result.sinr_trace);
  }
  if (!result.dci_trace.empty()) {
    write_file(fs::path(dir) / "dci.csv", "t_ns,ue_id,n_symbols,mcs,tb_bytes,lost\n", result.dci_trace);
  }
  if (!result.flow_trace.empty()) {
    write_file(fs::path(dir) / "flow.csv",
               "t_ns,ue_id,cwnd_bytes,ssthresh_bytes,srtt_ns,rto_ns,phase,retransmissions\n",
               result.flow_trace);
  }
}

}  // namespace xtcp
