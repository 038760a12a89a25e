#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace xtcp {

/// Named pseudo-random stream. The state is derived from (run seed, label),
/// so adding a stream for a new stochastic process never shifts the draws
/// of existing ones.
class RngStream {
 public:
  RngStream(std::uint64_t run_seed, std::string label);

  const std::string& label() const { return label_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi);
  double normal();
  bool bernoulli(double p);

 private:
  std::string label_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Stable 64-bit mix of a seed and a label (FNV-1a followed by splitmix64).
std::uint64_t derive_stream_seed(std::uint64_t run_seed, std::string_view label);

}  // namespace xtcp
