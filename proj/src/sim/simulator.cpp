#include "xtcp/sim/simulator.hpp"

#include <algorithm>
#include <string>

#include "xtcp/error.hpp"

namespace xtcp {

EventHandle Simulator::schedule_at(SimTime fire_time, Action action) {
  if (fire_time < now_) {
    throw ConfigError("event scheduled in the past: fire_time=" + std::to_string(fire_time.ns()) +
                      "ns < now=" + std::to_string(now_.ns()) + "ns");
  }
  const std::uint64_t id = next_sequence_++;
  heap_.push_back(Entry{fire_time, id, std::move(action)});
  std::push_heap(heap_.begin(), heap_.end(), Later{});
  return EventHandle{id};
}

bool Simulator::cancel(EventHandle handle) {
  if (!handle.valid()) return false;
  const bool queued = std::any_of(heap_.begin(), heap_.end(), [&](const Entry& e) {
    return e.sequence_id == handle.sequence_id;
  });
  if (!queued) return false;
  return cancelled_.insert(handle.sequence_id).second;
}

std::uint64_t Simulator::run_until(SimTime t_end) {
  std::uint64_t dispatched = 0;
  while (!heap_.empty() && heap_.front().fire_time <= t_end) {
    std::pop_heap(heap_.begin(), heap_.end(), Later{});
    Entry entry = std::move(heap_.back());
    heap_.pop_back();
    if (!cancelled_.empty()) {
      if (auto it = cancelled_.find(entry.sequence_id); it != cancelled_.end()) {
        cancelled_.erase(it);
        continue;
      }
    }
    now_ = entry.fire_time;
    entry.action();
    ++dispatched;
    ++dispatched_total_;
    if (post_hook_) post_hook_();
  }
  if (t_end > now_) now_ = t_end;
  return dispatched;
}

}  // namespace xtcp
