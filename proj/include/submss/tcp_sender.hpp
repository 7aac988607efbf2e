#ifndef SUBMSS_TCP_SENDER_HPP
#define SUBMSS_TCP_SENDER_HPP

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "submss/engine.hpp"
#include "submss/packet.hpp"
#include "submss/pacer.hpp"
#include "submss/sim_time.hpp"

namespace submss {

enum class SenderMode { baseline, submss };
enum class CcVariant { reno_like, dctcp_like };

inline const char* to_string(SenderMode m) {
  return m == SenderMode::baseline ? "baseline" : "submss";
}
inline const char* to_string(CcVariant v) {
  return v == CcVariant::reno_like ? "reno-like" : "dctcp-like";
}

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SenderConfig {
  std::uint32_t flow_id = 0;
  std::int64_t smss = 1460;        // M, payload bytes
  std::int64_t header_bytes = 58;  // frame overhead added to every segment
  SenderMode mode = SenderMode::baseline;
  CcVariant cc = CcVariant::reno_like;
  bool ecn_capable = true;
  std::int64_t initial_window = 0;  // 0: 2*M
  std::int64_t initial_ssthresh = std::numeric_limits<std::int64_t>::max();
  std::int64_t min_window = 0;  // floor in submss mode; 0: M/64
  SimTime initial_rtt = SimTime::ms(100);
  SimTime initial_rto = SimTime::s(1);
  SimTime min_rto = SimTime::ms(200);
  SimTime max_rto = SimTime::s(60);
  double dctcp_gain = 1.0 / 16;
};

struct SenderStats {
  std::uint64_t segments_sent = 0;
  std::uint64_t retransmissions = 0;
  std::uint64_t rtos = 0;
  std::uint64_t fast_retransmits = 0;
  std::uint64_t ece_reductions = 0;
  std::uint64_t paced_sends = 0;  // sends released by a pacer wait
  std::uint64_t limited_transmits = 0;
};

// Bulk-data TCP sender. In baseline mode it follows standard congestion
// avoidance with the 2*SMSS floor. In submss mode the window may drop below
// one segment and the pacer converts the shortfall into a wait.
class TcpSender {
 public:
  using Transmit = std::function<void(const Packet&)>;

  TcpSender(Engine& engine, SenderConfig cfg, Transmit transmit)
      : engine_(engine),
        cfg_(normalized(cfg)),
        transmit_(std::move(transmit)),
        window_(cfg_.initial_window),
        pacer_(cfg_.initial_rtt),
        ssthresh_(cfg_.initial_ssthresh),
        rto_(cfg_.initial_rto) {}

  TcpSender(const TcpSender&) = delete;
  TcpSender& operator=(const TcpSender&) = delete;

  // --- inputs ------------------------------------------------------------

  void on_app_write(std::int64_t bytes) {
    if (bytes <= 0) throw std::invalid_argument("on_app_write: bytes must be positive");
    app_written_ += bytes;
    try_send();
  }

  void on_ack(const Ack& a) {
    const SimTime now = engine_.now();
    if (a.ack_no > snd_max_) {
      throw ProtocolError("flow " + std::to_string(cfg_.flow_id) + ": ACK " +
                          std::to_string(a.ack_no) + " beyond highest sent byte " +
                          std::to_string(snd_max_));
    }
    if (a.ack_no < snd_una_) return;
    if (a.ack_no == snd_una_) {
      if (window_.in_flight() > 0) on_dupack();
      return;
    }

    const std::int64_t acked = a.ack_no - snd_una_;
    retire(a.ack_no, now);
    snd_una_ = a.ack_no;
    snd_nxt_ = std::max(snd_nxt_, snd_una_);
    dupacks_ = 0;
    if (cfg_.cc == CcVariant::dctcp_like) update_dctcp_alpha(acked, a.ece);

    if (in_recovery_) {
      if (snd_una_ >= recovery_until_) {
        in_recovery_ = false;
      } else {
        mark_lost(snd_una_);  // partial ACK: next hole
        retransmit_now();
      }
    }

    // Congestion response first, then the sending/pacing decision.
    if (a.ece && cfg_.ecn_capable) {
      respond_to_ece();
    } else if (!in_recovery_) {
      grow(acked);
    }

    if (window_.in_flight() > 0) {
      restart_rto_timer();
    } else {
      engine_.cancel(rto_timer_);
    }
    try_send();
  }

  // --- observers -----------------------------------------------------------

  const SenderConfig& config() const { return cfg_; }
  std::int64_t cwnd() const { return window_.cwnd(); }
  // The clocked window W = cwnd - in_flight; negative only in submss mode.
  std::int64_t window() const { return window_.available(); }
  std::int64_t in_flight() const { return window_.in_flight(); }
  std::int64_t snd_q() const { return app_written_ - snd_nxt_; }
  std::int64_t snd_una() const { return snd_una_; }
  std::int64_t snd_nxt() const { return snd_nxt_; }
  std::int64_t snd_max() const { return snd_max_; }
  std::int64_t ssthresh() const { return ssthresh_; }
  std::int64_t floor_window() const {
    return cfg_.mode == SenderMode::baseline ? 2 * cfg_.smss : cfg_.min_window;
  }
  std::optional<SimTime> srtt() const {
    return has_rtt_ ? std::optional<SimTime>(srtt_) : std::nullopt;
  }
  SimTime rttvar() const { return rttvar_; }
  SimTime rto() const { return rto_; }
  double dctcp_alpha() const { return alpha_; }
  bool in_recovery() const { return in_recovery_; }
  const Pacer& pacer() const { return pacer_; }
  bool rto_armed() const { return engine_.is_pending(rto_timer_); }
  const SenderStats& stats() const { return stats_; }

 private:
  struct Segment {
    std::int64_t len = 0;
    SimTime sent_at;
    bool retransmitted = false;
    bool lost = false;  // counted out of flight, queued for retransmission
  };
  struct NextSegment {
    std::int64_t seq = 0;
    std::int64_t len = 0;
    bool from_retx_queue = false;
  };

  static SenderConfig normalized(SenderConfig c) {
    if (c.smss <= 0) throw std::invalid_argument("smss must be positive");
    if (c.header_bytes < 0) throw std::invalid_argument("header_bytes must be non-negative");
    if (c.initial_window == 0) c.initial_window = 2 * c.smss;
    if (c.min_window == 0) c.min_window = std::max<std::int64_t>(1, c.smss / 64);
    if (c.min_window <= 0) throw std::invalid_argument("min_window must be positive");
    if (c.mode == SenderMode::baseline) {
      c.initial_window = std::max(c.initial_window, 2 * c.smss);
    }
    if (c.initial_window <= 0) throw std::invalid_argument("initial_window must be positive");
    return c;
  }

  std::optional<NextSegment> next_segment() const {
    if (!retx_queue_.empty()) {
      return NextSegment{retx_queue_.front().first, retx_queue_.front().second, true};
    }
    if (snd_q() <= 0) return std::nullopt;
    return NextSegment{snd_nxt_, segment_size(cfg_.smss, snd_q()), false};
  }

  void try_send() {
    const SimTime now = engine_.now();
    for (;;) {
      const auto next = next_segment();
      if (!next) {
        stop_pacer();
        return;
      }
      const std::int64_t s = next->len;
      const std::int64_t w = window_.available();
      if (w >= s) {
        stop_pacer();
        emit(*next);
        continue;
      }
      if (cfg_.mode == SenderMode::baseline) return;

      // Window short of a segment: wait, or park until the next increment.
      const auto until = pacer_.armed() ? pacer_.rebase(s, w) : pacer_.arm(now, s, w);
      if (!until) {
        stop_pacer();
        return;
      }
      if (*until <= now) {
        stop_pacer();
        ++stats_.paced_sends;
        emit(*next);
        continue;
      }
      engine_.cancel(pacer_event_);
      pacer_event_ = engine_.schedule(*until, {cfg_.flow_id, EventKind::pacer_wait},
                                      [this] { on_pacer_fire(); });
      return;
    }
  }

  void on_pacer_fire() {
    pacer_event_ = EventHandle();
    pacer_.disarm();
    const auto next = next_segment();
    if (!next || window_.available() <= 0) {
      try_send();
      return;
    }
    // The elapsed wait entitles one segment even though W < s.
    ++stats_.paced_sends;
    emit(*next);
    try_send();
  }

  void stop_pacer() {
    engine_.cancel(pacer_event_);
    pacer_.disarm();
  }

  void emit(const NextSegment& seg) {
    const SimTime now = engine_.now();
    Packet p;
    p.flow_id = cfg_.flow_id;
    p.seq_bytes = seg.seq;
    p.payload = seg.len;
    p.size = seg.len + cfg_.header_bytes;
    p.ecn_capable = cfg_.ecn_capable;
    p.sent_at = now;
    if (seg.from_retx_queue) {
      retx_queue_.pop_front();
      p.is_retransmission = true;
    } else {
      p.is_retransmission = seg.seq < snd_max_;
      snd_nxt_ = seg.seq + seg.len;
      snd_max_ = std::max(snd_max_, snd_nxt_);
    }
    outstanding_[seg.seq] = Segment{seg.len, now, p.is_retransmission, false};
    window_.on_send(seg.len);
    ++stats_.segments_sent;
    if (p.is_retransmission) ++stats_.retransmissions;
    if (!engine_.is_pending(rto_timer_)) restart_rto_timer();
    transmit_(p);
  }

  void retire(std::int64_t ack_no, SimTime now) {
    std::int64_t out_of_flight = 0;
    std::optional<Segment> newest;
    while (!outstanding_.empty()) {
      auto it = outstanding_.begin();
      const std::int64_t seq = it->first;
      Segment seg = it->second;
      if (seq >= ack_no) break;
      outstanding_.erase(it);
      if (seq + seg.len <= ack_no) {
        if (!seg.lost) out_of_flight += seg.len;
        newest = seg;
      } else {
        const std::int64_t covered = ack_no - seq;
        if (!seg.lost) out_of_flight += covered;
        seg.len -= covered;
        outstanding_[ack_no] = seg;
        break;
      }
    }
    while (!retx_queue_.empty()) {
      auto& [seq, len] = retx_queue_.front();
      if (seq + len <= ack_no) {
        retx_queue_.pop_front();
      } else {
        if (seq < ack_no) {
          len -= ack_no - seq;
          seq = ack_no;
        }
        break;
      }
    }
    window_.on_acked(out_of_flight);
    if (newest && !newest->retransmitted) sample_rtt(now - newest->sent_at);
  }

  void sample_rtt(SimTime r) {
    if (!has_rtt_) {
      srtt_ = r;
      rttvar_ = r / 2;
      has_rtt_ = true;
    } else {
      const SimTime err = srtt_ > r ? srtt_ - r : r - srtt_;
      rttvar_ = SimTime::ns((3 * rttvar_.count() + err.count()) / 4);
      srtt_ = SimTime::ns((7 * srtt_.count() + r.count()) / 8);
    }
    rto_ = std::clamp(srtt_ + std::max(SimTime::ns(1), rttvar_ * 4), cfg_.min_rto,
                      cfg_.max_rto);
    pacer_.observe_rtt(srtt_);
  }

  void grow(std::int64_t acked) {
    std::int64_t cwnd = window_.cwnd();
    if (cwnd < ssthresh_) {
      cwnd += acked;
    } else {
      // Additive increase of about one M per window's worth of ACKs,
      // never more than the bytes just acknowledged.
      const auto inc = static_cast<std::int64_t>(
          static_cast<Int128>(cfg_.smss) * acked / std::max<std::int64_t>(cwnd, 1));
      cwnd += std::clamp<std::int64_t>(inc, 1, acked);
    }
    window_.set_cwnd(cwnd);
  }

  void set_reduced_window(std::int64_t target) {
    const std::int64_t w = std::max(floor_window(), target);
    window_.set_cwnd(w);
    ssthresh_ = w;
  }

  void respond_to_ece() {
    // At most one reduction per round trip: only once the ACK covers data
    // sent after the previous reduction.
    if (snd_una_ <= cwr_until_) return;
    const std::int64_t cwnd = window_.cwnd();
    if (cfg_.cc == CcVariant::reno_like) {
      set_reduced_window(cwnd / 2);
    } else {
      set_reduced_window(static_cast<std::int64_t>(static_cast<double>(cwnd) *
                                                   (1.0 - alpha_ / 2.0)));
    }
    cwr_until_ = snd_max_;
    ++stats_.ece_reductions;
  }

  void update_dctcp_alpha(std::int64_t acked, bool ece) {
    acked_in_obs_ += acked;
    if (ece) marked_in_obs_ += acked;
    if (snd_una_ > obs_window_end_) {
      const double frac = acked_in_obs_ > 0 ? static_cast<double>(marked_in_obs_) /
                                                  static_cast<double>(acked_in_obs_)
                                            : 0.0;
      alpha_ = std::clamp((1.0 - cfg_.dctcp_gain) * alpha_ + cfg_.dctcp_gain * frac, 0.0, 1.0);
      acked_in_obs_ = 0;
      marked_in_obs_ = 0;
      obs_window_end_ = snd_max_;
    }
  }

  void mark_lost(std::int64_t seq) {
    auto it = outstanding_.find(seq);
    if (it == outstanding_.end() || it->second.lost) return;
    it->second.lost = true;
    window_.on_acked(it->second.len);
    retx_queue_.emplace_back(seq, it->second.len);
  }

  void on_dupack() {
    ++dupacks_;
    if (in_recovery_) return;
    if (dupacks_ < 3) {
      // Limited transmit: each of the first two duplicates lets one new
      // segment out, so small windows can still reach three duplicates.
      if (retx_queue_.empty() && snd_q() > 0) {
        ++stats_.limited_transmits;
        emit(NextSegment{snd_nxt_, segment_size(cfg_.smss, snd_q()), false});
      }
      return;
    }
    if (dupacks_ != 3) return;
    in_recovery_ = true;
    recovery_until_ = snd_max_;
    cwr_until_ = snd_max_;
    ++stats_.fast_retransmits;
    set_reduced_window(window_.cwnd() / 2);
    mark_lost(snd_una_);
    retransmit_now();
    try_send();
  }

  // Baseline loss repair goes out regardless of the window; submss leaves
  // it to the pacer like any other segment.
  void retransmit_now() {
    if (cfg_.mode != SenderMode::baseline || retx_queue_.empty()) return;
    stop_pacer();
    emit(NextSegment{retx_queue_.front().first, retx_queue_.front().second, true});
  }

  void restart_rto_timer() {
    engine_.cancel(rto_timer_);
    rto_timer_ = engine_.schedule_in(rto_, {cfg_.flow_id, EventKind::timer_expiry},
                                     [this] { on_rto(); });
  }

  void on_rto() {
    rto_timer_ = EventHandle();
    if (snd_una_ >= snd_max_) return;
    ++stats_.rtos;
    // Everything outstanding is presumed lost; resend from snd_una.
    outstanding_.clear();
    retx_queue_.clear();
    window_.clear_in_flight();
    snd_nxt_ = snd_una_;
    in_recovery_ = false;
    dupacks_ = 0;
    cwr_until_ = snd_max_;
    stop_pacer();
    if (cfg_.mode == SenderMode::baseline) {
      ssthresh_ = std::max(floor_window(), window_.cwnd() / 2);
      window_.set_cwnd(floor_window());
      rto_ = std::min(rto_ * 2, cfg_.max_rto);
    } else {
      // Halving W doubles the wait before the retransmission; the timer
      // itself is not backed off.
      set_reduced_window(window_.cwnd() / 2);
    }
    try_send();
  }

  Engine& engine_;
  SenderConfig cfg_;
  Transmit transmit_;
  ClockedWindow window_;
  Pacer pacer_;
  std::int64_t ssthresh_;

  std::int64_t app_written_ = 0;
  std::int64_t snd_una_ = 0;
  std::int64_t snd_nxt_ = 0;
  std::int64_t snd_max_ = 0;
  std::map<std::int64_t, Segment> outstanding_;
  std::deque<std::pair<std::int64_t, std::int64_t>> retx_queue_;

  bool has_rtt_ = false;
  SimTime srtt_;
  SimTime rttvar_;
  SimTime rto_;
  EventHandle rto_timer_;
  EventHandle pacer_event_;

  int dupacks_ = 0;
  bool in_recovery_ = false;
  std::int64_t recovery_until_ = 0;
  std::int64_t cwr_until_ = -1;

  double alpha_ = 1.0;
  std::int64_t acked_in_obs_ = 0;
  std::int64_t marked_in_obs_ = 0;
  std::int64_t obs_window_end_ = 0;

  SenderStats stats_;
};

}  // namespace submss

#endif  // SUBMSS_TCP_SENDER_HPP
