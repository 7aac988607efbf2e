#ifndef SUBMSS_TCP_RECEIVER_HPP
#define SUBMSS_TCP_RECEIVER_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <utility>

#include "submss/engine.hpp"
#include "submss/packet.hpp"

namespace submss {

struct ReceiverConfig {
  std::uint32_t flow_id = 0;
  bool delayed_acks = true;
  int ack_every = 2;
  SimTime delack_timeout = SimTime::ms(40);
};

struct ReceiverStats {
  std::uint64_t segments = 0;
  std::uint64_t acks_sent = 0;
  std::uint64_t timer_acks = 0;
  std::uint64_t dup_acks = 0;
  std::int64_t bytes_in_order = 0;
};

// Cumulative-ACK receiver with an optional delayed-ACK policy. ECE is set on
// any ACK that covers a CE-marked arrival since the previous ACK.
class TcpReceiver {
 public:
  using SendAck = std::function<void(const Ack&)>;

  TcpReceiver(Engine& engine, ReceiverConfig cfg, SendAck send_ack)
      : engine_(engine), cfg_(cfg), send_ack_(std::move(send_ack)) {
    if (cfg_.ack_every < 1) throw std::invalid_argument("ack_every must be >= 1");
    if (cfg_.delack_timeout <= SimTime::zero()) {
      throw std::invalid_argument("delack timeout must be positive");
    }
  }

  TcpReceiver(const TcpReceiver&) = delete;
  TcpReceiver& operator=(const TcpReceiver&) = delete;

  void on_segment(const Packet& p) {
    ++stats_.segments;
    if (p.ce_marked) ce_pending_ = true;

    if (p.end_seq() <= rcv_nxt_) {
      // Entirely old: the sender is retransmitting; tell it where we are.
      ack_now();
      return;
    }
    if (p.seq_bytes > rcv_nxt_) {
      auto& len = ooo_[p.seq_bytes];
      len = std::max(len, p.payload);
      ++stats_.dup_acks;
      ack_now();
      return;
    }

    const std::int64_t before = rcv_nxt_;
    rcv_nxt_ = p.end_seq();
    const bool filled_gap = absorb_out_of_order();
    stats_.bytes_in_order += rcv_nxt_ - before;

    ++pending_segments_;
    if (!cfg_.delayed_acks || filled_gap || pending_segments_ >= cfg_.ack_every) {
      ack_now();
    } else if (!engine_.is_pending(delack_timer_)) {
      delack_timer_ = engine_.schedule_in(
          cfg_.delack_timeout, {cfg_.flow_id, EventKind::timer_expiry}, [this] {
            delack_timer_ = EventHandle();
            ++stats_.timer_acks;
            ack_now();
          });
    }
  }

  std::int64_t rcv_nxt() const { return rcv_nxt_; }
  int pending_segments() const { return pending_segments_; }
  const ReceiverConfig& config() const { return cfg_; }
  const ReceiverStats& stats() const { return stats_; }

 private:
  bool absorb_out_of_order() {
    bool any = false;
    while (!ooo_.empty() && ooo_.begin()->first <= rcv_nxt_) {
      const auto [seq, len] = *ooo_.begin();
      ooo_.erase(ooo_.begin());
      rcv_nxt_ = std::max(rcv_nxt_, seq + len);
      any = true;
    }
    return any;
  }

  void ack_now() {
    engine_.cancel(delack_timer_);
    pending_segments_ = 0;
    const Ack a{cfg_.flow_id, rcv_nxt_, ce_pending_};
    ce_pending_ = false;
    ++stats_.acks_sent;
    send_ack_(a);
  }

  Engine& engine_;
  ReceiverConfig cfg_;
  SendAck send_ack_;
  std::int64_t rcv_nxt_ = 0;
  int pending_segments_ = 0;
  bool ce_pending_ = false;
  std::map<std::int64_t, std::int64_t> ooo_;
  EventHandle delack_timer_;
  ReceiverStats stats_;
};

}  // namespace submss

#endif  // SUBMSS_TCP_RECEIVER_HPP
