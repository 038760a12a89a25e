#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <ostream>

namespace xtcp {

/// Simulation time (and durations) as an integer count of nanoseconds.
///
/// Integer time keeps the 4.16 us OFDM symbol and the 100 us subframe exact,
/// so repeated runs of the same scenario dispatch events in the same order.
class SimTime {
 public:
  constexpr SimTime() = default;

  static constexpr SimTime from_ns(std::uint64_t ns) { return SimTime(ns); }
  static constexpr SimTime from_us(std::uint64_t us) { return SimTime(us * 1'000ULL); }
  static constexpr SimTime from_ms(std::uint64_t ms) { return SimTime(ms * 1'000'000ULL); }
  static constexpr SimTime from_s(std::uint64_t s) { return SimTime(s * 1'000'000'000ULL); }

  /// Rounds to the nearest nanosecond; negative input clamps to zero.
  static SimTime from_seconds(double s) {
    if (!(s > 0.0)) return SimTime(0);
    return SimTime(static_cast<std::uint64_t>(std::llround(s * 1e9)));
  }
  static SimTime from_milliseconds(double ms) { return from_seconds(ms * 1e-3); }

  static constexpr SimTime zero() { return SimTime(0); }
  static constexpr SimTime infinite() {
    return SimTime(std::numeric_limits<std::uint64_t>::max());
  }

  constexpr std::uint64_t ns() const { return ns_; }
  constexpr double seconds() const { return static_cast<double>(ns_) / 1e9; }
  constexpr double milliseconds() const { return static_cast<double>(ns_) / 1e6; }
  constexpr bool is_infinite() const { return ns_ == infinite().ns_; }

  constexpr auto operator<=>(const SimTime&) const = default;

  constexpr SimTime operator+(SimTime o) const {
    if (is_infinite() || o.is_infinite()) return infinite();
    return SimTime(ns_ + o.ns_);
  }
  /// Saturates at zero.
  constexpr SimTime operator-(SimTime o) const {
    return SimTime(ns_ > o.ns_ ? ns_ - o.ns_ : 0);
  }
  constexpr SimTime& operator+=(SimTime o) { return *this = *this + o; }
  constexpr SimTime& operator-=(SimTime o) { return *this = *this - o; }
  constexpr SimTime operator*(std::uint64_t k) const { return SimTime(ns_ * k); }
  constexpr SimTime operator/(std::uint64_t k) const { return SimTime(ns_ / k); }
  constexpr std::uint64_t operator/(SimTime o) const { return ns_ / o.ns_; }
  constexpr SimTime operator%(SimTime o) const { return SimTime(ns_ % o.ns_); }

 private:
  constexpr explicit SimTime(std::uint64_t ns) : ns_(ns) {}
  std::uint64_t ns_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, SimTime t) { return os << t.ns() << "ns"; }

namespace time_literals {
constexpr SimTime operator""_ns(unsigned long long v) { return SimTime::from_ns(v); }
constexpr SimTime operator""_us(unsigned long long v) { return SimTime::from_us(v); }
constexpr SimTime operator""_ms(unsigned long long v) { return SimTime::from_ms(v); }
constexpr SimTime operator""_s(unsigned long long v) { return SimTime::from_s(v); }
}  // namespace time_literals

}  // namespace xtcp
