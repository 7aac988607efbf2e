#ifndef SUBMSS_AQM_QUEUE_HPP
#define SUBMSS_AQM_QUEUE_HPP

#include <algorithm>
#include <cstdint>
#include <deque>
#include <stdexcept>
#include <string>
#include <vector>

#include "submss/packet.hpp"
#include "submss/random.hpp"
#include "submss/sim_time.hpp"

namespace submss {

enum class AqmPolicy { drop_tail, red_drop, ramp_mark };

inline const char* to_string(AqmPolicy p) {
  switch (p) {
    case AqmPolicy::drop_tail: return "drop-tail";
    case AqmPolicy::red_drop: return "red-drop";
    case AqmPolicy::ramp_mark: return "ramp-mark";
  }
  return "?";
}

struct AqmConfig {
  std::int64_t capacity_bps = 0;
  std::int64_t buffer_limit = 0;  // bytes
  AqmPolicy policy = AqmPolicy::ramp_mark;
  SimTime target_delay;  // queue delay where signalling starts
  SimTime ramp_ceiling;  // queue delay where signal probability reaches 1

  void validate() const {
    if (capacity_bps <= 0) throw std::invalid_argument("capacity must be positive");
    if (buffer_limit <= bytes_in(target_delay, capacity_bps)) {
      throw std::invalid_argument(
          "buffer_limit must exceed the byte equivalent of target_delay");
    }
    if (target_delay < SimTime::zero()) {
      throw std::invalid_argument("target_delay must be non-negative");
    }
    if (policy != AqmPolicy::drop_tail && ramp_ceiling <= target_delay) {
      throw std::invalid_argument("ramp_ceiling must exceed target_delay");
    }
  }
};

enum class Disposition { queued, queued_marked, dropped };

struct FlowQueueCounters {
  std::uint64_t offered = 0;
  std::uint64_t accepted = 0;
  std::uint64_t marked = 0;
  std::uint64_t dropped = 0;
  std::uint64_t departed = 0;
  std::uint64_t in_backlog = 0;
};

// FIFO byte queue with a delay-based signalling ramp. Signals are decided at
// enqueue against the queue delay seen by the arriving packet.
class AqmQueue {
 public:
  AqmQueue(AqmConfig cfg, RngStream rng) : cfg_(cfg), rng_(rng) { cfg_.validate(); }

  const AqmConfig& config() const { return cfg_; }
  std::int64_t backlog() const { return backlog_; }
  bool empty() const { return fifo_.empty(); }
  std::size_t packets() const { return fifo_.size(); }

  SimTime queue_delay() const {
    return serialization_time(backlog_, cfg_.capacity_bps);
  }

  double signal_probability() const {
    if (cfg_.policy == AqmPolicy::drop_tail) return 0.0;
    const SimTime qd = queue_delay();
    if (qd <= cfg_.target_delay) return 0.0;
    if (qd >= cfg_.ramp_ceiling) return 1.0;
    return static_cast<double>((qd - cfg_.target_delay).count()) /
           static_cast<double>((cfg_.ramp_ceiling - cfg_.target_delay).count());
  }

  Disposition enqueue(Packet p, SimTime /*now*/) {
    if (p.size <= 0) throw std::invalid_argument("packet size must be positive");
    auto& c = counters_for(p.flow_id);
    ++c.offered;
    if (backlog_ + p.size > cfg_.buffer_limit) return drop(c);

    bool signal = false;
    const double q = signal_probability();
    if (q >= 1.0) {
      signal = true;
    } else if (q > 0.0) {
      signal = rng_.uniform() < q;
    }

    Disposition d = Disposition::queued;
    if (signal) {
      if (cfg_.policy == AqmPolicy::ramp_mark && p.ecn_capable) {
        p.ce_marked = true;
        ++c.marked;
        ++total_marks_;
        d = Disposition::queued_marked;
      } else {
        return drop(c);
      }
    }
    ++c.accepted;
    ++c.in_backlog;
    backlog_ += p.size;
    fifo_.push_back(p);
    return d;
  }

  const Packet& front() const { return fifo_.front(); }

  Packet pop_front() {
    if (fifo_.empty()) throw std::logic_error("AqmQueue::pop_front on empty queue");
    Packet p = fifo_.front();
    fifo_.pop_front();
    backlog_ -= p.size;
    auto& c = counters_for(p.flow_id);
    --c.in_backlog;
    ++c.departed;
    return p;
  }

  const std::vector<FlowQueueCounters>& flow_counters() const { return counters_; }
  std::uint64_t total_drops() const { return total_drops_; }
  std::uint64_t total_marks() const { return total_marks_; }

 private:
  Disposition drop(FlowQueueCounters& c) {
    ++c.dropped;
    ++total_drops_;
    return Disposition::dropped;
  }

  FlowQueueCounters& counters_for(std::uint32_t flow) {
    if (flow >= counters_.size()) counters_.resize(flow + 1);
    return counters_[flow];
  }

  AqmConfig cfg_;
  RngStream rng_;
  std::deque<Packet> fifo_;
  std::int64_t backlog_ = 0;
  std::vector<FlowQueueCounters> counters_;
  std::uint64_t total_drops_ = 0;
  std::uint64_t total_marks_ = 0;
};

}  // namespace submss

#endif  // SUBMSS_AQM_QUEUE_HPP
