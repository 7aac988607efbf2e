#ifndef SUBMSS_LINK_HPP
#define SUBMSS_LINK_HPP

#include <functional>
#include <optional>
#include <utility>

#include "submss/aqm_queue.hpp"
#include "submss/engine.hpp"
#include "submss/packet.hpp"

namespace submss {

// Forward path: AQM queue drained by a fixed-rate link, followed by half of
// the base round-trip propagation delay.
class Bottleneck {
 public:
  using Deliver = std::function<void(const Packet&)>;

  Bottleneck(Engine& engine, AqmQueue queue, SimTime one_way_delay, Deliver deliver,
             std::uint32_t entity = 0)
      : engine_(engine),
        queue_(std::move(queue)),
        one_way_(one_way_delay),
        deliver_(std::move(deliver)),
        entity_(entity) {}

  Bottleneck(const Bottleneck&) = delete;
  Bottleneck& operator=(const Bottleneck&) = delete;

  Disposition enqueue(const Packet& p) {
    const Disposition d = queue_.enqueue(p, engine_.now());
    if (d != Disposition::dropped && !busy_) start_service();
    return d;
  }

  SimTime queue_delay() const { return queue_.queue_delay(); }
  bool busy() const { return busy_; }
  const AqmQueue& queue() const { return queue_; }
  std::int64_t capacity_bps() const { return queue_.config().capacity_bps; }

 private:
  void start_service() {
    if (queue_.empty()) return;
    busy_ = true;
    const SimTime tx = serialization_time(queue_.front().size, capacity_bps());
    engine_.schedule_in(tx, {entity_, EventKind::link_departure}, [this] { depart(); });
  }

  void depart() {
    Packet p = queue_.pop_front();
    busy_ = false;
    engine_.schedule_in(one_way_, {p.flow_id, EventKind::packet_arrival},
                        [this, p] { deliver_(p); });
    start_service();
  }

  Engine& engine_;
  AqmQueue queue_;
  SimTime one_way_;
  Deliver deliver_;
  std::uint32_t entity_;
  bool busy_ = false;
};

// Return path for ACKs: fixed delay, never congested, optionally severed for
// a time window (ACKs emitted inside the window are lost).
class ReturnPath {
 public:
  using Deliver = std::function<void(const Ack&)>;

  ReturnPath(Engine& engine, SimTime one_way_delay, Deliver deliver)
      : engine_(engine), one_way_(one_way_delay), deliver_(std::move(deliver)) {}

  void sever(SimTime from, SimTime until) { outage_ = std::pair{from, until}; }

  bool severed_at(SimTime t) const {
    return outage_ && t >= outage_->first && t < outage_->second;
  }

  void send(const Ack& a) {
    if (severed_at(engine_.now())) {
      ++lost_;
      return;
    }
    engine_.schedule_in(one_way_, {a.flow_id, EventKind::packet_arrival},
                        [this, a] { deliver_(a); });
  }

  std::uint64_t lost() const { return lost_; }

 private:
  Engine& engine_;
  SimTime one_way_;
  Deliver deliver_;
  std::optional<std::pair<SimTime, SimTime>> outage_;
  std::uint64_t lost_ = 0;
};

}  // namespace submss

#endif  // SUBMSS_LINK_HPP
