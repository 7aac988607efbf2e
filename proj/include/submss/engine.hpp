#ifndef SUBMSS_ENGINE_HPP
#define SUBMSS_ENGINE_HPP

#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "submss/sim_time.hpp"

namespace submss {

enum class EventKind : std::uint8_t {
  packet_arrival,
  link_departure,
  timer_expiry,
  pacer_wait,
  app_write,
  sample,
  control,
};

// Identifies who an event is for; only used for tracing.
struct EventTag {
  std::uint32_t entity = 0;
  EventKind kind = EventKind::control;
};

class EventHandle {
 public:
  EventHandle() = default;
  bool valid() const { return seq_ != 0; }
  std::uint64_t seq() const { return seq_; }

 private:
  friend class Engine;
  explicit EventHandle(std::uint64_t seq) : seq_(seq) {}
  std::uint64_t seq_ = 0;  // 0 = empty handle
};

struct TraceRecord {
  SimTime at;
  std::uint64_t seq;
  EventTag tag;

  bool operator==(const TraceRecord& o) const {
    return at == o.at && seq == o.seq && tag.entity == o.tag.entity &&
           tag.kind == o.tag.kind;
  }
};

// Single-threaded discrete-event engine. Equal-time events fire in insertion
// order; cancelled events never fire.
class Engine {
 public:
  using Action = std::function<void()>;

  SimTime now() const { return now_; }

  EventHandle schedule(SimTime at, EventTag tag, Action action) {
    if (at < now_) {
      throw std::logic_error("Engine::schedule: event at " +
                             std::to_string(at.count()) +
                             "ns is before the current clock " +
                             std::to_string(now_.count()) + "ns");
    }
    const std::uint64_t seq = ++next_seq_;
    queue_.push(Key{at, seq});
    pending_.emplace(seq, Slot{tag, std::move(action)});
    return EventHandle(seq);
  }

  EventHandle schedule_in(SimTime delay, EventTag tag, Action action) {
    return schedule(now_ + delay, tag, std::move(action));
  }

  // Returns true if the event was still pending.
  bool cancel(EventHandle& h) {
    if (!h.valid()) return false;
    const bool erased = pending_.erase(h.seq_) > 0;
    h = EventHandle();
    return erased;
  }

  bool is_pending(const EventHandle& h) const {
    return h.valid() && pending_.count(h.seq_) > 0;
  }

  // Delivers every event with fire_at <= deadline, then parks the clock at
  // the deadline.
  SimTime run_until(SimTime deadline) {
    while (!queue_.empty() && queue_.top().at <= deadline) {
      const Key key = queue_.top();
      queue_.pop();
      auto it = pending_.find(key.seq);
      if (it == pending_.end()) continue;
      Slot slot = std::move(it->second);
      pending_.erase(it);
      now_ = key.at;
      ++delivered_;
      if (tracing_) trace_.push_back(TraceRecord{key.at, key.seq, slot.tag});
      slot.action();
    }
    if (deadline > now_) now_ = deadline;
    return now_;
  }

  std::size_t pending_count() const { return pending_.size(); }
  std::uint64_t delivered_count() const { return delivered_; }

  void enable_trace(bool on = true) { tracing_ = on; }
  const std::vector<TraceRecord>& trace() const { return trace_; }

 private:
  struct Key {
    SimTime at;
    std::uint64_t seq;
    // min-heap on (at, seq)
    bool operator<(const Key& o) const {
      if (at != o.at) return at > o.at;
      return seq > o.seq;
    }
  };
  struct Slot {
    EventTag tag;
    Action action;
  };

  SimTime now_;
  std::uint64_t next_seq_ = 0;
  std::uint64_t delivered_ = 0;
  std::priority_queue<Key> queue_;
  std::unordered_map<std::uint64_t, Slot> pending_;
  bool tracing_ = false;
  std::vector<TraceRecord> trace_;
};

}  // namespace submss

#endif  // SUBMSS_ENGINE_HPP
