#ifndef SUBMSS_PACER_HPP
#define SUBMSS_PACER_HPP

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>

#include "submss/sim_time.hpp"

namespace submss {

// Size of the next segment: never smaller than a full segment unless the
// send queue is shorter than that.
inline std::int64_t segment_size(std::int64_t smss, std::int64_t snd_q) {
  if (snd_q <= 0) throw std::invalid_argument("segment_size: send queue is empty");
  if (smss <= 0) throw std::invalid_argument("segment_size: smss must be positive");
  return std::min(smss, snd_q);
}

// Extra wait before a segment of `s` bytes may go out when the window `w`
// is smaller than `s`:
//
//   d = (s/w - 1) * rtt = (s - w) * rtt / w
//
// so that one segment leaves every s*rtt/w. Computed on 128-bit integers and
// rounded half up to the nanosecond. Zero once w >= s. Returns nullopt when
// w <= 0: there is no finite wait and the caller must hold until the window
// is next incremented.
inline std::optional<SimTime> pacing_delay(std::int64_t s, std::int64_t w, SimTime rtt) {
  if (s <= 0) throw std::invalid_argument("pacing_delay: segment size must be positive");
  if (rtt < SimTime::zero()) throw std::invalid_argument("pacing_delay: negative rtt");
  if (w <= 0) return std::nullopt;
  if (w >= s) return SimTime::zero();
  const Int128 num = static_cast<Int128>(s - w) * rtt.count();
  return SimTime::ns(div_round_half_up(num, w));
}

// The clocked window: bytes the sender may still put in flight. Sending s
// bytes takes s off it (possibly driving it negative when pacing), and an
// acknowledgement for s bytes gives s back. Congestion control acts on cwnd
// independently.
class ClockedWindow {
 public:
  explicit ClockedWindow(std::int64_t cwnd) : cwnd_(cwnd) {}

  std::int64_t cwnd() const { return cwnd_; }
  std::int64_t in_flight() const { return in_flight_; }
  std::int64_t available() const { return cwnd_ - in_flight_; }

  void set_cwnd(std::int64_t cwnd) { cwnd_ = cwnd; }
  void on_send(std::int64_t bytes) { in_flight_ += bytes; }
  void on_acked(std::int64_t bytes) {
    if (bytes > in_flight_) throw std::logic_error("ClockedWindow: acked more than in flight");
    in_flight_ -= bytes;
  }
  void clear_in_flight() { in_flight_ = 0; }

 private:
  std::int64_t cwnd_;
  std::int64_t in_flight_ = 0;
};

// Per-flow wait state. A wait is anchored at the epoch it was armed (the ACK
// that found the window short); later window changes move the deadline but
// not the epoch.
class Pacer {
 public:
  explicit Pacer(SimTime initial_rtt) : last_rtt_(initial_rtt) {
    if (initial_rtt <= SimTime::zero()) {
      throw std::invalid_argument("Pacer: initial rtt estimate must be positive");
    }
  }

  // The R used for waits. Kept through idle periods: with no traffic there
  // is nothing better to go on.
  SimTime rtt() const { return last_rtt_; }
  void observe_rtt(SimTime srtt) {
    if (srtt > SimTime::zero()) last_rtt_ = srtt;
  }

  bool armed() const { return wait_until_.has_value(); }
  SimTime epoch() const { return epoch_; }
  std::optional<SimTime> wait_until() const { return wait_until_; }

  // nullopt: window not positive, nothing armed.
  std::optional<SimTime> arm(SimTime epoch, std::int64_t s, std::int64_t w) {
    epoch_ = epoch;
    return recompute(s, w);
  }

  std::optional<SimTime> rebase(std::int64_t s, std::int64_t w) {
    if (!armed()) throw std::logic_error("Pacer::rebase without an armed wait");
    return recompute(s, w);
  }

  void disarm() { wait_until_.reset(); }

 private:
  std::optional<SimTime> recompute(std::int64_t s, std::int64_t w) {
    const auto d = pacing_delay(s, w, last_rtt_);
    if (!d) {
      wait_until_.reset();
      return std::nullopt;
    }
    wait_until_ = epoch_ + *d;
    return wait_until_;
  }

  SimTime last_rtt_;
  SimTime epoch_;
  std::optional<SimTime> wait_until_;
};

}  // namespace submss

#endif  // SUBMSS_PACER_HPP
