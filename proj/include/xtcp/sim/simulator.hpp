#pragma once

#include <cstdint>
#include <functional>
#include <unordered_set>
#include <vector>

#include "xtcp/sim/sim_time.hpp"

namespace xtcp {

/// Opaque reference to a scheduled event, used for cancellation.
struct EventHandle {
  std::uint64_t sequence_id = 0;
  bool valid() const { return sequence_id != 0; }
};

/// Single-threaded discrete-event engine.
///
/// Events fire in (fire_time, sequence_id) order, where sequence_id is the
/// insertion order. Actions may schedule further events, including at the
/// current instant.
class Simulator {
 public:
  using Action = std::function<void()>;

  SimTime now() const { return now_; }

  /// Throws ConfigError when `fire_time` lies before the current clock.
  EventHandle schedule_at(SimTime fire_time, Action action);
  EventHandle schedule_in(SimTime delay, Action action) {
    return schedule_at(now_ + delay, std::move(action));
  }

  /// Returns false if the event already fired, was cancelled, or is unknown.
  bool cancel(EventHandle handle);

  /// Dispatches every event with fire_time <= t_end and leaves the clock at
  /// t_end. Returns the number of dispatched events.
  std::uint64_t run_until(SimTime t_end);

  /// Hook invoked after every dispatched event (used for invariant checks).
  void set_post_dispatch_hook(std::function<void()> hook) { post_hook_ = std::move(hook); }

  std::size_t pending() const { return heap_.size() - cancelled_.size(); }
  std::uint64_t dispatched_total() const { return dispatched_total_; }

 private:
  struct Entry {
    SimTime fire_time;
    std::uint64_t sequence_id;
    Action action;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.fire_time != b.fire_time) return a.fire_time > b.fire_time;
      return a.sequence_id > b.sequence_id;
    }
  };

  SimTime now_;
  std::uint64_t next_sequence_ = 1;
  std::uint64_t dispatched_total_ = 0;
  std::vector<Entry> heap_;
  // Cancelled events still sitting in the heap.
  std::unordered_set<std::uint64_t> cancelled_;
  std::function<void()> post_hook_;
};

}  // namespace xtcp
