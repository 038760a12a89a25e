#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "xtcp/sim/sim_time.hpp"
#include "xtcp/tcp/rtt_estimator.hpp"

namespace xtcp {

enum class CcFlavor { Xtcp, Cubic, Bic, Illinois, NewReno };

std::string_view to_string(CcFlavor f);
/// Throws ConfigError listing the valid names.
CcFlavor parse_cc_flavor(std::string_view name);

inline constexpr double kInfiniteWindow = std::numeric_limits<double>::infinity();

/// Congestion window and slow-start threshold, both in bytes.
struct Window {
  double cwnd = 0.0;
  double ssthresh = kInfiniteWindow;
};

/// Link information read from the UE's own radio stack.
struct CrossLayerInfo {
  double datarate_bps = 0.0;
  double sinr_db = 0.0;
};

struct AckContext {
  SimTime now;
  std::uint64_t acked_bytes = 0;  // newly acknowledged; 0 for a duplicate
  std::optional<SimTime> rtt_sample;
  const RttEstimator* rtt = nullptr;
  std::uint32_t mss = 1400;
  // The sender used (almost) its whole window before this ACK.
  bool cwnd_limited = true;
  std::optional<CrossLayerInfo> cross;
};

struct LossContext {
  SimTime now;
  std::uint64_t flight_bytes = 0;
  std::uint32_t mss = 1400;
  const RttEstimator* rtt = nullptr;
};

/// Window policy of one flow. Loss detection and recovery mechanics live in
/// the sender; controllers only decide the window.
class CongestionControl {
 public:
  virtual ~CongestionControl() = default;

  virtual CcFlavor flavor() const = 0;
  /// Baselines receive new ACKs outside fast recovery. Cross-layer
  /// controllers receive every ACK, duplicates included.
  virtual Window on_ack(const AckContext& ctx, Window w) = 0;
  /// Triple duplicate ACK. Returns the post-recovery window; the sender adds
  /// the usual 3-segment inflation for non-cross-layer controllers.
  virtual Window on_dup_ack_loss(const LossContext& ctx, Window w) = 0;
  virtual Window on_rto(const LossContext& ctx, Window w) = 0;
  /// True when the controller sets the window directly on every ACK and the
  /// sender must not inflate or deflate it during recovery.
  virtual bool cross_layer() const { return false; }
};

// ---------------------------------------------------------------- NewReno

class NewReno : public CongestionControl {
 public:
  CcFlavor flavor() const override { return CcFlavor::NewReno; }
  Window on_ack(const AckContext& ctx, Window w) override;
  Window on_dup_ack_loss(const LossContext& ctx, Window w) override;
  Window on_rto(const LossContext& ctx, Window w) override;
};

/// Slow start growth, shared by the baselines: one MSS per newly acked MSS,
/// at most two MSS per ACK.
double slow_start_increase(double cwnd, std::uint64_t acked_bytes, std::uint32_t mss);

// -------------------------------------------------------------------- BIC

struct BicConfig {
  double beta = 0.8;
  double s_max = 32.0;       // segments
  double low_window = 14.0;  // segments
  double b = 4.0;            // above W_max the probe grows by (W - W_max) / (b - 1)

  void validate() const;
};

/// Per-RTT increase in segments for window W and last-loss window W_max.
double bic_increment(double w, double w_max, const BicConfig& cfg);

class Bic : public CongestionControl {
 public:
  explicit Bic(BicConfig cfg = {}) : cfg_(cfg) {}
  CcFlavor flavor() const override { return CcFlavor::Bic; }
  Window on_ack(const AckContext& ctx, Window w) override;
  Window on_dup_ack_loss(const LossContext& ctx, Window w) override;
  Window on_rto(const LossContext& ctx, Window w) override;
  double w_max_segments() const { return w_max_; }

 private:
  Window reduce(Window w, std::uint32_t mss);

  BicConfig cfg_;
  double w_max_ = 0.0;  // segments; 0 before the first loss
};

// ------------------------------------------------------------------ CUBIC

struct CubicConfig {
  double c = 0.4;
  double beta = 0.7;
  bool fast_convergence = true;
  bool tcp_friendly = true;

  void validate() const;
};

/// K = cbrt(W_max (1 - beta) / C), seconds.
double cubic_k(double w_max, const CubicConfig& cfg);
/// W(t) = C (t - K)^3 + W_max, in segments.
double cubic_window(double t_since_loss_s, double w_max, const CubicConfig& cfg);

class Cubic : public CongestionControl {
 public:
  explicit Cubic(CubicConfig cfg = {}) : cfg_(cfg) {}
  CcFlavor flavor() const override { return CcFlavor::Cubic; }
  Window on_ack(const AckContext& ctx, Window w) override;
  Window on_dup_ack_loss(const LossContext& ctx, Window w) override;
  Window on_rto(const LossContext& ctx, Window w) override;
  double w_max_segments() const { return w_max_; }

 private:
  Window reduce(Window w, std::uint32_t mss);

  CubicConfig cfg_;
  double w_max_ = 0.0;  // segments
  std::optional<SimTime> epoch_start_;
  double k_ = 0.0;
  double origin_ = 0.0;  // segments
  double w_est_ = 0.0;   // segments, TCP-friendly estimate
};

// --------------------------------------------------------------- Illinois

struct IllinoisConfig {
  double alpha_max = 10.0;
  double alpha_min = 0.3;
  double beta_min = 1.0 / 8.0;
  double beta_max = 1.0 / 2.0;
  double d1_fraction = 0.01;
  double d2_fraction = 0.1;
  double d3_fraction = 0.8;

  void validate() const;
};

struct IllinoisParams {
  double alpha = 0.0;
  double beta = 0.0;
};

/// Additive increase alpha (segments per RTT) and decrease fraction beta
/// from the average queueing delay d_a and the largest one seen, d_m.
IllinoisParams illinois_params(SimTime d_a, SimTime d_m, const IllinoisConfig& cfg);

class Illinois : public CongestionControl {
 public:
  explicit Illinois(IllinoisConfig cfg = {}) : cfg_(cfg) {}
  CcFlavor flavor() const override { return CcFlavor::Illinois; }
  Window on_ack(const AckContext& ctx, Window w) override;
  Window on_dup_ack_loss(const LossContext& ctx, Window w) override;
  Window on_rto(const LossContext& ctx, Window w) override;
  IllinoisParams current() const { return params_; }

 private:
  void update(const RttEstimator& rtt);

  IllinoisConfig cfg_;
  IllinoisParams params_{10.0, 0.5};
};

// ------------------------------------------------------------------ X-TCP

struct XtcpConfig {
  double lambda = 0.85;
  SimTime epsilon = SimTime::from_ms(10);
  double sinr_threshold_db = 0.0;
  SimTime datarate_window = SimTime::from_ms(100);
  std::uint32_t header_overhead_bytes = 60;  // MAC + RLC + PDCP + IP + TCP

  void validate() const;
};

/// Cross-layer window: datarate x rtt_min in bytes, scaled by lambda unless
/// the link is good (sinr >= threshold) and the sample shows no queueing
/// (rtt_sample <= rtt_min + epsilon). Never below one MSS.
std::uint64_t xtcp_cwnd(SimTime rtt_sample, SimTime rtt_min, double datarate_bps, double sinr_db,
                        const XtcpConfig& cfg, std::uint32_t mss);

class Xtcp : public CongestionControl {
 public:
  explicit Xtcp(XtcpConfig cfg = {}) : cfg_(cfg) {}
  CcFlavor flavor() const override { return CcFlavor::Xtcp; }
  Window on_ack(const AckContext& ctx, Window w) override;
  Window on_dup_ack_loss(const LossContext& ctx, Window w) override;
  Window on_rto(const LossContext& ctx, Window w) override;
  bool cross_layer() const override { return true; }
  const XtcpConfig& config() const { return cfg_; }

 private:
  XtcpConfig cfg_;
};

struct CcParams {
  XtcpConfig xtcp;
  CubicConfig cubic;
  BicConfig bic;
  IllinoisConfig illinois;
};

std::unique_ptr<CongestionControl> make_congestion_control(CcFlavor flavor, const CcParams& params);

}  // namespace xtcp
