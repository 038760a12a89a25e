#include "xtcp/tcp/congestion_control.hpp"

#include <algorithm>
#include <cmath>

#include "xtcp/error.hpp"

namespace xtcp {

std::string_view to_string(CcFlavor f) {
  switch (f) {
    case CcFlavor::Xtcp: return "xtcp";
    case CcFlavor::Cubic: return "cubic";
    case CcFlavor::Bic: return "bic";
    case CcFlavor::Illinois: return "illinois";
    case CcFlavor::NewReno: return "newreno";
  }
  return "?";
}

CcFlavor parse_cc_flavor(std::string_view name) {
  for (auto f : {CcFlavor::Xtcp, CcFlavor::Cubic, CcFlavor::Bic, CcFlavor::Illinois, CcFlavor::NewReno}) {
    if (to_string(f) == name) return f;
  }
  throw ConfigError("unknown congestion control '" + std::string(name) +
                    "' (valid: xtcp, cubic, bic, illinois, newreno)");
}

double slow_start_increase(double cwnd, std::uint64_t acked_bytes, std::uint32_t mss) {
  return cwnd + static_cast<double>(std::min<std::uint64_t>(acked_bytes, 2ULL * mss));
}

namespace {

double floor_two_mss(double v, std::uint32_t mss) { return std::max(v, 2.0 * mss); }

}  // namespace

// ---------------------------------------------------------------- NewReno

Window NewReno::on_ack(const AckContext& ctx, Window w) {
  if (!ctx.cwnd_limited) return w;
  if (w.cwnd < w.ssthresh) {
    w.cwnd = slow_start_increase(w.cwnd, ctx.acked_bytes, ctx.mss);
  } else {
    w.cwnd += static_cast<double>(ctx.mss) * ctx.mss / w.cwnd;
  }
  return w;
}

Window NewReno::on_dup_ack_loss(const LossContext& ctx, Window w) {
  w.ssthresh = floor_two_mss(static_cast<double>(ctx.flight_bytes) / 2.0, ctx.mss);
  w.cwnd = w.ssthresh;
  return w;
}

Window NewReno::on_rto(const LossContext& ctx, Window w) {
  w.ssthresh = floor_two_mss(static_cast<double>(ctx.flight_bytes) / 2.0, ctx.mss);
  w.cwnd = ctx.mss;
  return w;
}

// -------------------------------------------------------------------- BIC

void BicConfig::validate() const {
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("cc.bic.beta must lie in (0, 1)");
  if (!(s_max >= 1.0)) throw ConfigError("cc.bic.s_max must be >= 1");
  if (!(b > 1.0)) throw ConfigError("cc.bic.b must be > 1");
}

double bic_increment(double w, double w_max, const BicConfig& cfg) {
  const double gap = w < w_max ? (w_max - w) / 2.0 : (w - w_max) / (cfg.b - 1.0);
  return std::clamp(gap, 1.0, cfg.s_max);
}

Window Bic::on_ack(const AckContext& ctx, Window w) {
  if (!ctx.cwnd_limited) return w;
  if (w.cwnd < w.ssthresh) {
    w.cwnd = slow_start_increase(w.cwnd, ctx.acked_bytes, ctx.mss);
    return w;
  }
  const double seg = w.cwnd / ctx.mss;
  const double per_rtt = seg < cfg_.low_window ? 1.0 : bic_increment(seg, w_max_, cfg_);
  w.cwnd += per_rtt * ctx.mss * ctx.mss / w.cwnd;
  return w;
}

Window Bic::reduce(Window w, std::uint32_t mss) {
  const double seg = w.cwnd / mss;
  w_max_ = seg;
  const double factor = seg < cfg_.low_window ? 0.5 : cfg_.beta;
  w.ssthresh = floor_two_mss(w.cwnd * factor, mss);
  return w;
}

Window Bic::on_dup_ack_loss(const LossContext& ctx, Window w) {
  w = reduce(w, ctx.mss);
  w.cwnd = w.ssthresh;
  return w;
}

Window Bic::on_rto(const LossContext& ctx, Window w) {
  w = reduce(w, ctx.mss);
  w.cwnd = ctx.mss;
  return w;
}

// ------------------------------------------------------------------ CUBIC

void CubicConfig::validate() const {
  if (!(c > 0.0)) throw ConfigError("cc.cubic.c must be > 0");
  if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("cc.cubic.beta must lie in (0, 1)");
}

double cubic_k(double w_max, const CubicConfig& cfg) { return std::cbrt(w_max * (1.0 - cfg.beta) / cfg.c); }

double cubic_window(double t_since_loss_s, double w_max, const CubicConfig& cfg) {
  const double d = t_since_loss_s - cubic_k(w_max, cfg);
  return cfg.c * d * d * d + w_max;
}

Window Cubic::on_ack(const AckContext& ctx, Window w) {
  if (!ctx.cwnd_limited) return w;
  if (w.cwnd < w.ssthresh) {
    w.cwnd = slow_start_increase(w.cwnd, ctx.acked_bytes, ctx.mss);
    return w;
  }
  const double seg = w.cwnd / ctx.mss;
  if (!epoch_start_) {
    epoch_start_ = ctx.now;
    if (seg < w_max_) {
      k_ = std::cbrt((w_max_ - seg) / cfg_.c);
      origin_ = w_max_;
    } else {
      k_ = 0.0;
      origin_ = seg;
    }
    w_est_ = seg;
  }
  SimTime rtt_min = ctx.rtt ? ctx.rtt->rtt_min() : SimTime::zero();
  if (rtt_min.is_infinite()) rtt_min = SimTime::zero();
  // Target one RTT ahead.
  const double t = (ctx.now - *epoch_start_ + rtt_min).seconds() - k_;
  double target = origin_ + cfg_.c * t * t * t;
  double inc;  // segments for this ACK
  if (target > seg) {
    target = std::min(target, 1.5 * seg);
    inc = (target - seg) / seg;
  } else {
    inc = 0.01 / seg;
  }
  if (cfg_.tcp_friendly) {
    w_est_ += 3.0 * (1.0 - cfg_.beta) / (1.0 + cfg_.beta) / seg;
    if (w_est_ > seg) inc = std::max(inc, (w_est_ - seg) / seg);
  }
  w.cwnd += inc * ctx.mss;
  return w;
}

Window Cubic::reduce(Window w, std::uint32_t mss) {
  epoch_start_.reset();
  const double seg = w.cwnd / mss;
  if (cfg_.fast_convergence && seg < w_max_) {
    w_max_ = seg * (1.0 + cfg_.beta) / 2.0;
  } else {
    w_max_ = seg;
  }
  w.ssthresh = floor_two_mss(w.cwnd * cfg_.beta, mss);
  return w;
}

Window Cubic::on_dup_ack_loss(const LossContext& ctx, Window w) {
  w = reduce(w, ctx.mss);
  w.cwnd = w.ssthresh;
  return w;
}

Window Cubic::on_rto(const LossContext& ctx, Window w) {
  w = reduce(w, ctx.mss);
  w.cwnd = ctx.mss;
  return w;
}

// --------------------------------------------------------------- Illinois

void IllinoisConfig::validate() const {
  if (!(alpha_max > alpha_min && alpha_min > 0.0)) {
    throw ConfigError("cc.illinois: need alpha_max > alpha_min > 0");
  }
  if (!(beta_max >= beta_min && beta_min > 0.0 && beta_max < 1.0)) {
    throw ConfigError("cc.illinois: need 0 < beta_min <= beta_max < 1");
  }
  if (!(d1_fraction > 0.0 && d1_fraction < 1.0 && d2_fraction < d3_fraction && d3_fraction <= 1.0)) {
    throw ConfigError("cc.illinois: delay thresholds out of order");
  }
}

IllinoisParams illinois_params(SimTime d_a, SimTime d_m, const IllinoisConfig& cfg) {
  if (d_m == SimTime::zero()) return {cfg.alpha_max, cfg.beta_min};
  const double dm = d_m.seconds();
  const double da = d_a.seconds();
  const double d1 = cfg.d1_fraction * dm;
  const double d2 = cfg.d2_fraction * dm;
  const double d3 = cfg.d3_fraction * dm;

  IllinoisParams p;
  if (da <= d1) {
    p.alpha = cfg.alpha_max;
  } else if (d_a >= d_m) {
    p.alpha = cfg.alpha_min;
  } else {
    // alpha = k1 / (k2 + d_a) through (d1, alpha_max) and (d_m, alpha_min).
    const double k2 = (cfg.alpha_min * dm - cfg.alpha_max * d1) / (cfg.alpha_max - cfg.alpha_min);
    const double k1 = cfg.alpha_max * (k2 + d1);
    p.alpha = std::clamp(k1 / (k2 + da), cfg.alpha_min, cfg.alpha_max);
  }

  if (da <= d2) {
    p.beta = cfg.beta_min;
  } else if (da >= d3) {
    p.beta = cfg.beta_max;
  } else {
    p.beta = cfg.beta_min + (cfg.beta_max - cfg.beta_min) * (da - d2) / (d3 - d2);
  }
  return p;
}

void Illinois::update(const RttEstimator& rtt) {
  if (!rtt.has_sample()) return;
  params_ = illinois_params(rtt.srtt() - rtt.rtt_min(), rtt.rtt_max() - rtt.rtt_min(), cfg_);
}

Window Illinois::on_ack(const AckContext& ctx, Window w) {
  if (ctx.rtt) update(*ctx.rtt);
  if (!ctx.cwnd_limited) return w;
  if (w.cwnd < w.ssthresh) {
    w.cwnd = slow_start_increase(w.cwnd, ctx.acked_bytes, ctx.mss);
  } else {
    w.cwnd += params_.alpha * ctx.mss * ctx.mss / w.cwnd;
  }
  return w;
}

Window Illinois::on_dup_ack_loss(const LossContext& ctx, Window w) {
  if (ctx.rtt) update(*ctx.rtt);
  w.ssthresh = floor_two_mss(w.cwnd * (1.0 - params_.beta), ctx.mss);
  w.cwnd = w.ssthresh;
  return w;
}

Window Illinois::on_rto(const LossContext& ctx, Window w) {
  // A timeout falls back to the standard halving and the base increase.
  params_ = {1.0, cfg_.beta_max};
  w.ssthresh = floor_two_mss(w.cwnd * (1.0 - cfg_.beta_max), ctx.mss);
  w.cwnd = ctx.mss;
  return w;
}

// ------------------------------------------------------------------ X-TCP

void XtcpConfig::validate() const {
  if (!(lambda > 0.0 && lambda <= 1.0)) throw ConfigError("cc.xtcp.lambda must lie in (0, 1]");
  if (epsilon == SimTime::zero()) throw ConfigError("cc.xtcp.epsilon_ms must be > 0");
  if (datarate_window == SimTime::zero()) throw ConfigError("cc.xtcp.datarate_window_ms must be > 0");
}

std::uint64_t xtcp_cwnd(SimTime rtt_sample, SimTime rtt_min, double datarate_bps, double sinr_db,
                        const XtcpConfig& cfg, std::uint32_t mss) {
  if (rtt_min.is_infinite() || !(datarate_bps > 0.0)) return mss;
  const double bdp = datarate_bps * static_cast<double>(rtt_min.ns()) / 8e9;
  const bool unscaled = sinr_db >= cfg.sinr_threshold_db && rtt_sample <= rtt_min + cfg.epsilon;
  const double bytes = unscaled ? bdp : cfg.lambda * bdp;
  return std::max<std::uint64_t>(static_cast<std::uint64_t>(std::llround(bytes)), mss);
}

Window Xtcp::on_ack(const AckContext& ctx, Window w) {
  w.ssthresh = kInfiniteWindow;
  if (!ctx.cross || !ctx.rtt || !ctx.rtt->has_sample()) return w;
  const SimTime sample = ctx.rtt_sample.value_or(ctx.rtt->latest());
  const SimTime rtt_min = ctx.rtt->rtt_min();
  w.cwnd = static_cast<double>(
      xtcp_cwnd(sample, rtt_min, ctx.cross->datarate_bps, ctx.cross->sinr_db, cfg_, ctx.mss));
  return w;
}

Window Xtcp::on_dup_ack_loss(const LossContext&, Window w) { return w; }

Window Xtcp::on_rto(const LossContext& ctx, Window w) {
  w.cwnd = ctx.mss;
  w.ssthresh = kInfiniteWindow;
  return w;
}

std::unique_ptr<CongestionControl> make_congestion_control(CcFlavor flavor, const CcParams& params) {
  switch (flavor) {
    case CcFlavor::Xtcp: return std::make_unique<Xtcp>(params.xtcp);
    case CcFlavor::Cubic: return std::make_unique<Cubic>(params.cubic);
    case CcFlavor::Bic: return std::make_unique<Bic>(params.bic);
    case CcFlavor::Illinois: return std::make_unique<Illinois>(params.illinois);
    case CcFlavor::NewReno: return std::make_unique<NewReno>();
  }
  throw ConfigError("unknown congestion control flavor");
}

}  // namespace xtcp
