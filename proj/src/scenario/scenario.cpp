#include "xtcp/scenario/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "xtcp/error.hpp"

#ifndef XTCP_SCENARIO_DIR
#define XTCP_SCENARIO_DIR "scenarios"
#endif

namespace xtcp {

using nlohmann::json;

namespace {

// Reads one JSON object, remembering which keys were used so leftovers can
// be reported as unknown.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail("", "expected an object");
  }

  bool has(const char* key) const { return j_.contains(key); }

  void number(const char* key, double& out) {
    if (const json* v = take(key)) {
      if (!v->is_number()) fail(key, "expected a number");
      out = v->get<double>();
      if (!std::isfinite(out)) fail(key, "must be finite");
    }
  }

  template <class T>
  void integer(const char* key, T& out) {
    if (const json* v = take(key)) {
      if (!v->is_number_integer() && !v->is_number_unsigned()) fail(key, "expected an integer");
      if (v->is_number_integer() && v->get<std::int64_t>() < 0) fail(key, "must be >= 0");
      out = static_cast<T>(v->get<std::uint64_t>());
    }
  }

  void boolean(const char* key, bool& out) {
    if (const json* v = take(key)) {
      if (!v->is_boolean()) fail(key, "expected true or false");
      out = v->get<bool>();
    }
  }

  void string(const char* key, std::string& out) {
    if (const json* v = take(key)) {
      if (!v->is_string()) fail(key, "expected a string");
      out = v->get<std::string>();
    }
  }

  // Durations are written with a unit suffix in the key; `scale` converts
  // the value to seconds.
  void duration(const char* key, double scale, SimTime& out) {
    double v = out.seconds() / scale;
    number(key, v);
    if (v < 0.0) fail(key, "must be >= 0");
    out = SimTime::from_seconds(v * scale);
  }

  void point(const char* key, Point2D& out) {
    if (const json* v = take(key)) out = parse_point(*v, sub(key));
  }

  Reader object(const char* key) {
    static const json kEmpty = json::object();
    const json* v = take(key);
    return Reader(v ? *v : kEmpty, sub(key));
  }

  const json* array(const char* key) {
    const json* v = take(key);
    if (v && !v->is_array()) fail(key, "expected an array");
    return v;
  }

  void finish() const {
    for (const auto& [k, _] : j_.items()) {
      if (!used_.count(k)) throw ConfigError(fmt::format("{}: unknown key", sub(k.c_str())));
    }
  }

  std::string sub(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  [[noreturn]] void fail(const char* key, const std::string& msg) const {
    throw ConfigError(fmt::format("{}: {}", *key ? sub(key) : path_, msg));
  }

  static Point2D parse_point(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      throw ConfigError(path + ": expected [x, y] in meters");
    }
    return {v[0].get<double>(), v[1].get<double>()};
  }

 private:
  const json* take(const char* key) {
    auto it = j_.find(key);
    if (it == j_.end()) return nullptr;
    used_.insert(key);
    return &*it;
  }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

Obstacle parse_obstacle(const json& j, const std::string& path) {
  Reader r(j, path);
  Obstacle o;
  r.point("min", o.min_corner);
  r.point("max", o.max_corner);
  r.finish();
  if (!o.valid()) throw ConfigError(path + ": min must be below max in both coordinates");
  return o;
}

std::vector<Obstacle> parse_obstacles(const json* arr, const std::string& path) {
  std::vector<Obstacle> out;
  if (!arr) return out;
  for (std::size_t i = 0; i < arr->size(); ++i) {
    out.push_back(parse_obstacle((*arr)[i], fmt::format("{}[{}]", path, i)));
  }
  return out;
}

json point_json(Point2D p) { return json::array({p.x, p.y}); }

json obstacle_json(const Obstacle& o) {
  return {{"min", point_json(o.min_corner)}, {"max", point_json(o.max_corner)}};
}

json obstacles_json(const std::vector<Obstacle>& v) {
  json a = json::array();
  for (const auto& o : v) a.push_back(obstacle_json(o));
  return a;
}

double ms(SimTime t) { return t.seconds() * 1e3; }
double us(SimTime t) { return t.seconds() * 1e6; }

}  // namespace

void Scenario::validate() const {
  if (duration == SimTime::zero()) throw ConfigError("duration_s must be > 0");
  if (warmup >= duration) throw ConfigError("warmup_s must be shorter than duration_s");
  if (!(area.width > 0.0 && area.height > 0.0)) throw ConfigError("geometry.area: width and height must be > 0");
  if (ues.empty()) throw ConfigError("ues: at least one UE is required");
  if (ues.size() > 64) throw ConfigError("ues: at most 64 UEs are supported");
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    if (!obstacles[i].valid()) throw ConfigError(fmt::format("geometry.obstacles[{}]: empty rectangle", i));
    for (std::size_t j = 0; j < i; ++j) {
      if (obstacles[i].overlaps(obstacles[j])) {
        throw ConfigError(fmt::format("geometry.obstacles[{}] overlaps geometry.obstacles[{}]", i, j));
      }
    }
  }
  if (random_obstacles) {
    const auto& r = *random_obstacles;
    if (r.count_min > r.count_max) throw ConfigError("geometry.random_obstacles: count_min > count_max");
  }
  for (std::size_t i = 0; i < forced_outages.size(); ++i) {
    if (forced_outages[i].ue >= ues.size()) {
      throw ConfigError(fmt::format("forced_outages[{}].ue: no UE {}", i, forced_outages[i].ue));
    }
    if (forced_outages[i].duration == SimTime::zero()) {
      throw ConfigError(fmt::format("forced_outages[{}].duration_s must be > 0", i));
    }
  }
  channel.validate();
  phy.validate();
  rlc.validate();
  tcp.validate();
  cc.xtcp.validate();
  cc.cubic.validate();
  cc.bic.validate();
  cc.illinois.validate();
  traffic.validate();
  if (output.sample_period == SimTime::zero()) throw ConfigError("output.sample_period_ms must be > 0");
  if (output.goodput_window == SimTime::zero()) throw ConfigError("output.goodput_window_ms must be > 0");
  if (tcp.packet_bytes(tcp.mss) + rlc.pdcp_header_bytes + rlc.pdu_overhead() >
      rlc.buffer_capacity_bytes) {
    throw ConfigError("rlc.buffer_bytes is smaller than one packet");
  }
}

std::vector<Obstacle> Scenario::materialize_obstacles() const {
  std::vector<Obstacle> all = obstacles;
  if (random_obstacles) {
    const auto& r = *random_obstacles;
    RngStream rng(seed, "obstacles");
    std::size_t count = r.count_min;
    if (r.count_max > r.count_min) {
      count += static_cast<std::size_t>(rng.next_u64() % (r.count_max - r.count_min + 1));
    }
    std::vector<Obstacle> avoid = r.keep_out;
    avoid.insert(avoid.end(), obstacles.begin(), obstacles.end());
    auto drawn = generate_obstacles(rng, area, count, r.sizes, avoid);
    all.insert(all.end(), drawn.begin(), drawn.end());
  }
  return all;
}

Scenario scenario_from_json(const json& doc) {
  Scenario sc;
  Reader r(doc, "");
  r.string("name", sc.name);
  r.integer("seed", sc.seed);
  r.duration("duration_s", 1.0, sc.duration);
  r.duration("warmup_s", 1.0, sc.warmup);

  {
    Reader g = r.object("geometry");
    Reader area = g.object("area");
    area.number("width_m", sc.area.width);
    area.number("height_m", sc.area.height);
    area.finish();
    g.point("enb", sc.enb);
    sc.obstacles = parse_obstacles(g.array("obstacles"), g.sub("obstacles"));
    if (g.has("random_obstacles")) {
      Reader ro = g.object("random_obstacles");
      RandomObstacles rnd;
      ro.integer("count_min", rnd.count_min);
      rnd.count_max = rnd.count_min;
      ro.integer("count_max", rnd.count_max);
      ro.number("min_size_m", rnd.sizes.min_size);
      ro.number("max_size_m", rnd.sizes.max_size);
      rnd.keep_out = parse_obstacles(ro.array("keep_out"), ro.sub("keep_out"));
      ro.finish();
      sc.random_obstacles = rnd;
    }
    g.finish();
  }

  if (const json* ues = r.array("ues")) {
    for (std::size_t i = 0; i < ues->size(); ++i) {
      Reader u((*ues)[i], fmt::format("ues[{}]", i));
      Point2D start, heading{1.0, 0.0};
      double speed = 0.0;
      SimTime start_time;
      std::string cc = "xtcp";
      u.point("start", start);
      u.point("heading", heading);
      u.number("speed_mps", speed);
      u.duration("start_s", 1.0, start_time);
      u.string("cc", cc);
      u.finish();
      UeSpec spec;
      try {
        spec.trajectory = Trajectory::make(start, heading, speed, start_time);
        spec.cc = parse_cc_flavor(cc);
      } catch (const ConfigError& e) {
        throw ConfigError(fmt::format("ues[{}]: {}", i, e.what()));
      }
      sc.ues.push_back(spec);
    }
  }

  if (const json* outs = r.array("forced_outages")) {
    for (std::size_t i = 0; i < outs->size(); ++i) {
      Reader o((*outs)[i], fmt::format("forced_outages[{}]", i));
      ForcedOutage fo;
      o.integer("ue", fo.ue);
      o.duration("start_s", 1.0, fo.start);
      o.duration("duration_s", 1.0, fo.duration);
      o.finish();
      sc.forced_outages.push_back(fo);
    }
  }

  {
    Reader c = r.object("channel");
    auto& ch = sc.channel;
    c.number("tx_power_dbm", ch.tx_power_dbm);
    c.number("carrier_ghz", ch.carrier_ghz);
    c.number("bandwidth_hz", ch.bandwidth_hz);
    c.number("noise_figure_db", ch.noise_figure_db);
    c.number("n_los", ch.n_los);
    c.number("n_nlos", ch.n_nlos);
    c.number("sigma_los_db", ch.sigma_los_db);
    c.number("sigma_nlos_db", ch.sigma_nlos_db);
    c.boolean("shadowing_enabled", ch.shadowing_enabled);
    c.duration("shadowing_correlation_ms", 1e-3, ch.shadowing_correlation);
    c.duration("update_period_ms", 1e-3, ch.update_period);
    c.number("sinr_floor_db", ch.sinr_floor_db);
    c.finish();
  }
  {
    Reader p = r.object("phy");
    auto& phy = sc.phy;
    p.integer("subframes_per_frame", phy.frame.subframes_per_frame);
    p.duration("subframe_us", 1e-6, phy.frame.subframe_duration);
    p.integer("symbols_per_subframe", phy.frame.symbols_per_subframe);
    p.duration("symbol_ns", 1e-9, phy.frame.symbol_duration);
    p.integer("tb_header_bytes", phy.tb_header_bytes);
    p.number("bler_at_threshold", phy.bler_at_threshold);
    p.number("bler_margin_db", phy.bler_margin_db);
    p.string("mcs_table", phy.mcs_table_path);
    p.finish();
  }
  {
    Reader l = r.object("rlc");
    auto& rlc = sc.rlc;
    l.integer("buffer_bytes", rlc.buffer_capacity_bytes);
    l.integer("rlc_header_bytes", rlc.rlc_header_bytes);
    l.integer("mac_subheader_bytes", rlc.mac_subheader_bytes);
    l.integer("pdcp_header_bytes", rlc.pdcp_header_bytes);
    l.duration("status_report_ms", 1e-3, rlc.status_report_period);
    l.integer("max_retx", rlc.max_retx);
    l.finish();
  }
  {
    Reader t = r.object("tcp");
    auto& tcp = sc.tcp;
    t.integer("mss_bytes", tcp.mss);
    t.integer("tcp_header_bytes", tcp.tcp_header_bytes);
    t.integer("ip_header_bytes", tcp.ip_header_bytes);
    t.integer("dupack_threshold", tcp.dupack_threshold);
    t.duration("rto_min_ms", 1e-3, tcp.rtt.rto_min);
    t.duration("rto_max_s", 1.0, tcp.rtt.rto_max);
    t.duration("rto_initial_s", 1.0, tcp.rtt.rto_initial);
    t.finish();
  }
  {
    Reader c = r.object("cc");
    Reader x = c.object("xtcp");
    x.number("lambda", sc.cc.xtcp.lambda);
    x.duration("epsilon_ms", 1e-3, sc.cc.xtcp.epsilon);
    x.number("sinr_threshold_db", sc.cc.xtcp.sinr_threshold_db);
    x.duration("datarate_window_ms", 1e-3, sc.cc.xtcp.datarate_window);
    x.integer("header_overhead_bytes", sc.cc.xtcp.header_overhead_bytes);
    x.finish();
    Reader cu = c.object("cubic");
    cu.number("c", sc.cc.cubic.c);
    cu.number("beta", sc.cc.cubic.beta);
    cu.boolean("fast_convergence", sc.cc.cubic.fast_convergence);
    cu.boolean("tcp_friendly", sc.cc.cubic.tcp_friendly);
    cu.finish();
    Reader b = c.object("bic");
    b.number("beta", sc.cc.bic.beta);
    b.number("s_max", sc.cc.bic.s_max);
    b.number("low_window", sc.cc.bic.low_window);
    b.number("b", sc.cc.bic.b);
    b.finish();
    Reader il = c.object("illinois");
    il.number("alpha_max", sc.cc.illinois.alpha_max);
    il.number("alpha_min", sc.cc.illinois.alpha_min);
    il.number("beta_min", sc.cc.illinois.beta_min);
    il.number("beta_max", sc.cc.illinois.beta_max);
    il.number("d1_fraction", sc.cc.illinois.d1_fraction);
    il.number("d2_fraction", sc.cc.illinois.d2_fraction);
    il.number("d3_fraction", sc.cc.illinois.d3_fraction);
    il.finish();
    c.finish();
  }
  {
    Reader t = r.object("traffic");
    auto& tr = sc.traffic;
    t.number("rate_cap_bps", tr.rate_cap_bps);
    t.duration("core_latency_ms", 1e-3, tr.core_latency);
    t.duration("remote_latency_ms", 1e-3, tr.remote_latency);
    t.duration("downlink_ack_delay_us", 1e-6, tr.downlink_ack_delay);
    t.duration("bucket_depth_ms", 1e-3, tr.bucket_depth);
    t.finish();
  }
  {
    Reader o = r.object("output");
    auto& out = sc.output;
    o.duration("sample_period_ms", 1e-3, out.sample_period);
    o.duration("goodput_window_ms", 1e-3, out.goodput_window);
    o.boolean("sinr_trace", out.sinr_trace);
    o.boolean("dci_trace", out.dci_trace);
    o.boolean("flow_trace", out.flow_trace);
    o.boolean("check_invariants", out.check_invariants);
    o.finish();
  }
  r.finish();
  sc.validate();
  return sc;
}

json scenario_to_json(const Scenario& sc) {
  json doc;
  doc["name"] = sc.name;
  doc["seed"] = sc.seed;
  doc["duration_s"] = sc.duration.seconds();
  doc["warmup_s"] = sc.warmup.seconds();

  json geo;
  geo["area"] = {{"width_m", sc.area.width}, {"height_m", sc.area.height}};
  geo["enb"] = point_json(sc.enb);
  geo["obstacles"] = obstacles_json(sc.obstacles);
  if (sc.random_obstacles) {
    const auto& r = *sc.random_obstacles;
    geo["random_obstacles"] = {{"count_min", r.count_min},
                               {"count_max", r.count_max},
                               {"min_size_m", r.sizes.min_size},
                               {"max_size_m", r.sizes.max_size},
                               {"keep_out", obstacles_json(r.keep_out)}};
  }
  doc["geometry"] = geo;

  json ues = json::array();
  for (const auto& u : sc.ues) {
    ues.push_back({{"start", point_json(u.trajectory.start)},
                   {"heading", point_json(u.trajectory.heading)},
                   {"speed_mps", u.trajectory.speed},
                   {"start_s", u.trajectory.start_time.seconds()},
                   {"cc", std::string(to_string(u.cc))}});
  }
  doc["ues"] = ues;

  json outs = json::array();
  for (const auto& o : sc.forced_outages) {
    outs.push_back({{"ue", o.ue}, {"start_s", o.start.seconds()}, {"duration_s", o.duration.seconds()}});
  }
  doc["forced_outages"] = outs;

  const auto& ch = sc.channel;
  doc["channel"] = {{"tx_power_dbm", ch.tx_power_dbm},
                    {"carrier_ghz", ch.carrier_ghz},
                    {"bandwidth_hz", ch.bandwidth_hz},
                    {"noise_figure_db", ch.noise_figure_db},
                    {"n_los", ch.n_los},
                    {"n_nlos", ch.n_nlos},
                    {"sigma_los_db", ch.sigma_los_db},
                    {"sigma_nlos_db", ch.sigma_nlos_db},
                    {"shadowing_enabled", ch.shadowing_enabled},
                    {"shadowing_correlation_ms", ms(ch.shadowing_correlation)},
                    {"update_period_ms", ms(ch.update_period)},
                    {"sinr_floor_db", ch.sinr_floor_db}};
  const auto& phy = sc.phy;
  doc["phy"] = {{"subframes_per_frame", phy.frame.subframes_per_frame},
                {"subframe_us", us(phy.frame.subframe_duration)},
                {"symbols_per_subframe", phy.frame.symbols_per_subframe},
                {"symbol_ns", static_cast<double>(phy.frame.symbol_duration.ns())},
                {"tb_header_bytes", phy.tb_header_bytes},
                {"bler_at_threshold", phy.bler_at_threshold},
                {"bler_margin_db", phy.bler_margin_db},
                {"mcs_table", phy.mcs_table_path}};
  const auto& rlc = sc.rlc;
  doc["rlc"] = {{"buffer_bytes", rlc.buffer_capacity_bytes},
                {"rlc_header_bytes", rlc.rlc_header_bytes},
                {"mac_subheader_bytes", rlc.mac_subheader_bytes},
                {"pdcp_header_bytes", rlc.pdcp_header_bytes},
                {"status_report_ms", ms(rlc.status_report_period)},
                {"max_retx", rlc.max_retx}};
  const auto& tcp = sc.tcp;
  doc["tcp"] = {{"mss_bytes", tcp.mss},
                {"tcp_header_bytes", tcp.tcp_header_bytes},
                {"ip_header_bytes", tcp.ip_header_bytes},
                {"dupack_threshold", tcp.dupack_threshold},
                {"rto_min_ms", ms(tcp.rtt.rto_min)},
                {"rto_max_s", tcp.rtt.rto_max.seconds()},
                {"rto_initial_s", tcp.rtt.rto_initial.seconds()}};
  const auto& cc = sc.cc;
  doc["cc"] = {{"xtcp",
                {{"lambda", cc.xtcp.lambda},
                 {"epsilon_ms", ms(cc.xtcp.epsilon)},
                 {"sinr_threshold_db", cc.xtcp.sinr_threshold_db},
                 {"datarate_window_ms", ms(cc.xtcp.datarate_window)},
                 {"header_overhead_bytes", cc.xtcp.header_overhead_bytes}}},
               {"cubic",
                {{"c", cc.cubic.c},
                 {"beta", cc.cubic.beta},
                 {"fast_convergence", cc.cubic.fast_convergence},
                 {"tcp_friendly", cc.cubic.tcp_friendly}}},
               {"bic",
                {{"beta", cc.bic.beta}, {"s_max", cc.bic.s_max}, {"low_window", cc.bic.low_window}, {"b", cc.bic.b}}},
               {"illinois",
                {{"alpha_max", cc.illinois.alpha_max},
                 {"alpha_min", cc.illinois.alpha_min},
                 {"beta_min", cc.illinois.beta_min},
                 {"beta_max", cc.illinois.beta_max},
                 {"d1_fraction", cc.illinois.d1_fraction},
                 {"d2_fraction", cc.illinois.d2_fraction},
                 {"d3_fraction", cc.illinois.d3_fraction}}}};
  const auto& tr = sc.traffic;
  doc["traffic"] = {{"rate_cap_bps", tr.rate_cap_bps},
                    {"core_latency_ms", ms(tr.core_latency)},
                    {"remote_latency_ms", ms(tr.remote_latency)},
                    {"downlink_ack_delay_us", us(tr.downlink_ack_delay)},
                    {"bucket_depth_ms", ms(tr.bucket_depth)}};
  const auto& out = sc.output;
  doc["output"] = {{"sample_period_ms", ms(out.sample_period)},
                   {"goodput_window_ms", ms(out.goodput_window)},
                   {"sinr_trace", out.sinr_trace},
                   {"dci_trace", out.dci_trace},
                   {"flow_trace", out.flow_trace},
                   {"check_invariants", out.check_invariants}};
  return doc;
}

namespace {

json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open '" + path + "'");
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

// Bundles wrap the scenario document with metadata.
bool is_bundle(const json& j) { return j.is_object() && j.contains("scenario") && j.contains("checks"); }

ScenarioBundle bundle_from_json(const json& j, const std::string& path) {
  ScenarioBundle b;
  Reader r(j, "");
  r.string("name", b.name);
  r.string("description", b.description);
  if (const json* checks = r.array("checks")) {
    for (const auto& c : *checks) {
      if (!c.is_string()) throw ConfigError(path + ": checks must be strings");
      b.checks.push_back(c.get<std::string>());
    }
  }
  const json* doc = nullptr;
  if (j.contains("scenario")) doc = &j.at("scenario");
  r.object("scenario");
  r.finish();
  try {
    b.scenario = scenario_from_json(doc ? *doc : json::object());
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: scenario.{}", path, e.what()));
  }
  return b;
}

}  // namespace

Scenario load_scenario_file(const std::string& path) {
  const json j = read_json_file(path);
  if (is_bundle(j)) return bundle_from_json(j, path).scenario;
  try {
    return scenario_from_json(j);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

Scenario swap_trajectories(const Scenario& sc) {
  if (sc.ues.size() < 2) throw ConfigError("trajectory swap needs two UEs");
  Scenario out = sc;
  std::swap(out.ues[0].trajectory, out.ues[1].trajectory);
  return out;
}

void apply_overrides(Scenario& sc, const GenOverrides& o) {
  if (o.rate_cap_bps) sc.traffic.rate_cap_bps = *o.rate_cap_bps;
  if (o.duration_s) {
    if (!(*o.duration_s > 0.0)) throw ConfigError("--duration must be > 0");
    sc.duration = SimTime::from_seconds(*o.duration_s);
  }
  if (o.cc) {
    const auto& list = *o.cc;
    if (list.size() == 1) {
      for (auto& u : sc.ues) u.cc = list[0];
    } else if (list.size() == sc.ues.size()) {
      for (std::size_t i = 0; i < list.size(); ++i) sc.ues[i].cc = list[i];
    } else {
      throw ConfigError(fmt::format("--cc lists {} flavors for {} UEs", list.size(), sc.ues.size()));
    }
  }
  if (o.lambda) sc.cc.xtcp.lambda = *o.lambda;
  if (o.epsilon_ms) {
    if (!(*o.epsilon_ms > 0.0)) throw ConfigError("--epsilon-ms must be > 0");
    sc.cc.xtcp.epsilon = SimTime::from_milliseconds(*o.epsilon_ms);
  }
}

std::vector<std::string> scenario_kinds() { return {"random-two-ue", "outage"}; }

namespace {

Scenario make_random_two_ue(std::uint64_t seed) {
  Scenario sc;
  sc.name = "random-two-ue";
  sc.seed = seed;
  sc.duration = SimTime::from_s(60);
  sc.area = {200.0, 100.0};
  sc.enb = {100.0, 50.0};
  // UE 1 walks the lower side of the area and UE 2 the upper side, both
  // left to right, centred on the eNB.
  constexpr double kSpeed = 1.75;
  const double travel = kSpeed * sc.duration.seconds();
  const double x0 = sc.enb.x - travel / 2.0;
  constexpr double kLowY = 20.0;
  constexpr double kHighY = 80.0;
  sc.ues.push_back({Trajectory::make({x0, kLowY}, {1.0, 0.0}, kSpeed), CcFlavor::Xtcp});
  sc.ues.push_back({Trajectory::make({x0, kHighY}, {1.0, 0.0}, kSpeed), CcFlavor::Xtcp});
  RandomObstacles rnd;
  rnd.count_min = 10;
  rnd.count_max = 20;
  rnd.sizes = {5.0, 20.0};
  // Walkways and the eNB site stay clear.
  rnd.keep_out = {
      {{0.0, kLowY - 2.0}, {sc.area.width, kLowY + 2.0}},
      {{0.0, kHighY - 2.0}, {sc.area.width, kHighY + 2.0}},
      {{sc.enb.x - 5.0, sc.enb.y - 5.0}, {sc.enb.x + 5.0, sc.enb.y + 5.0}},
  };
  sc.random_obstacles = rnd;
  return sc;
}

Scenario make_outage(std::uint64_t seed) {
  Scenario sc;
  sc.name = "outage";
  sc.seed = seed;
  sc.duration = SimTime::from_s(25);
  sc.warmup = SimTime::zero();
  sc.traffic.rate_cap_bps = 2e9;
  sc.area = {140.0, 40.0};
  sc.enb = {65.0, 25.0};
  // The UE walks east along y = 10 at 5 m/s, from x = 5 to x = 130, passing
  // 15 m from the eNB. A wall between the path and the eNB blocks the link
  // from t = 5 s to t = 12 s; the forced outage covers t = 6 s to 7 s.
  constexpr double kSpeed = 5.0;
  constexpr double kPathY = 10.0;
  sc.ues.push_back({Trajectory::make({5.0, kPathY}, {1.0, 0.0}, kSpeed), CcFlavor::Xtcp});
  // The ray from the eNB to the UE at (x, 10) crosses y = 17.5 at
  // (65 + x) / 2; the UE is at x = 30 at t = 5 s and at x = 65 at t = 12 s.
  sc.obstacles.push_back({{47.5, 17.0}, {65.0, 18.0}});
  // Five small obstacles next to the path after the wall.
  for (int i = 0; i < 5; ++i) {
    const double x = 75.0 + 11.0 * i;
    sc.obstacles.push_back({{x, 12.0}, {x + 1.5, 13.0}});
  }
  sc.forced_outages.push_back({0, SimTime::from_s(6), SimTime::from_s(1)});
  return sc;
}

}  // namespace

Scenario gen_scenario(const std::string& kind, std::uint64_t seed, const GenOverrides& overrides) {
  Scenario sc;
  if (kind == "random-two-ue") {
    sc = make_random_two_ue(seed);
  } else if (kind == "outage") {
    sc = make_outage(seed);
  } else {
    throw ConfigError("unknown scenario kind '" + kind + "' (valid: random-two-ue, outage)");
  }
  apply_overrides(sc, overrides);
  sc.validate();
  return sc;
}

std::string scenario_dir() {
  if (const char* env = std::getenv("XTCP_SCENARIO_DIR"); env && *env) return env;
  return XTCP_SCENARIO_DIR;
}

std::vector<std::string> list_bundles() {
  namespace fs = std::filesystem;
  std::vector<std::string> names;
  const fs::path dir = scenario_dir();
  if (!fs::is_directory(dir)) throw ConfigError("scenario directory '" + dir.string() + "' not found");
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      names.push_back(entry.path().stem().string());
    }
  }
  std::sort(names.begin(), names.end());
  return names;
}

ScenarioBundle load_bundle(const std::string& name) {
  namespace fs = std::filesystem;
  const fs::path path = fs::path(scenario_dir()) / (name + ".json");
  if (name.empty() || name.find('/') != std::string::npos || !fs::is_regular_file(path)) {
    std::string known;
    try {
      for (const auto& n : list_bundles()) known += (known.empty() ? "" : ", ") + n;
    } catch (const ConfigError&) {
    }
    throw ConfigError("unknown scenario bundle '" + name + "' (known: " + known + ")");
  }
  const json j = read_json_file(path.string());
  if (!is_bundle(j)) throw ConfigError(path.string() + ": not a scenario bundle");
  auto b = bundle_from_json(j, path.string());
  if (b.name != name) throw ConfigError(path.string() + ": bundle name '" + b.name + "' does not match file");
  return b;
}

Scenario resolve_scenario(const std::string& name_or_path) {
  namespace fs = std::filesystem;
  if (fs::is_regular_file(name_or_path)) return load_scenario_file(name_or_path);
  return load_bundle(name_or_path).scenario;
}

}  // namespace xtcp
