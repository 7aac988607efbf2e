#ifndef SUBMSS_ANALYSIS_HPP
#define SUBMSS_ANALYSIS_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "submss/sim_time.hpp"

namespace submss {

// Packets per round trip each of n equal flows gets on a link of rate C
// with frame size P: C*R / (n*P*8).
inline double pkt_per_rtt_floor(double capacity_bps, double n_flows, double frame_bytes,
                                SimTime rtt) {
  if (capacity_bps <= 0 || n_flows <= 0 || frame_bytes <= 0 || rtt <= SimTime::zero()) {
    throw std::invalid_argument("pkt_per_rtt_floor: all arguments must be positive");
  }
  return capacity_bps * rtt.seconds() / (n_flows * frame_bytes * 8.0);
}

// Round trip time at which n flows, each held at `pkts` segments per round
// trip, exactly fill the link: R* = pkts*n*P*8/C.
inline SimTime balance_rtt(double capacity_bps, double n_flows, double frame_bytes,
                           double pkts = 2.0) {
  return SimTime::ns(std::llround(pkts * n_flows * frame_bytes * 8.0 / capacity_bps * 1e9));
}

inline std::vector<double> log_space(double lo, double hi, int points) {
  if (!(lo > 0) || !(hi >= lo) || points < 1) {
    throw std::invalid_argument("log_space: need 0 < lo <= hi and points >= 1");
  }
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(points));
  if (points == 1) {
    out.push_back(lo);
    return out;
  }
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < points; ++i) {
    out.push_back(i == points - 1 ? hi : std::exp(a + (b - a) * i / (points - 1)));
  }
  out.front() = lo;
  return out;
}

struct RegionCell {
  double rtt_s = 0;
  double rate_bps = 0;  // per flow
  double window_mss = 0;
  int diagonal = 0;  // 1 or 2 when the cell sits on that window diagonal
};

// Per-flow window, in segments, across a log grid of round-trip times and
// per-flow rates. For each rate row, the cell nearest to a window of k
// segments (k = 1, 2) is flagged when within half an rtt grid step of it.
inline std::vector<RegionCell> window_region_grid(double rtt_min_s, double rtt_max_s,
                                                  double rate_min_bps, double rate_max_bps,
                                                  std::int64_t mss, int points = 9) {
  if (mss <= 0) throw std::invalid_argument("window_region_grid: mss must be positive");
  const auto rtts = log_space(rtt_min_s, rtt_max_s, points);
  const auto rates = log_space(rate_min_bps, rate_max_bps, points);
  const double half_step =
      points > 1 ? 0.5 * std::log(rtt_max_s / rtt_min_s) / (points - 1) : 0.0;

  std::vector<RegionCell> out;
  out.reserve(rtts.size() * rates.size());
  for (double rate : rates) {
    for (double rtt : rtts) {
      RegionCell c;
      c.rtt_s = rtt;
      c.rate_bps = rate;
      c.window_mss = rate * rtt / (static_cast<double>(mss) * 8.0);
      for (int k : {1, 2}) {
        const double off = std::abs(std::log(c.window_mss / k));
        if (off <= half_step + 1e-12) c.diagonal = k;
      }
      out.push_back(c);
    }
  }
  return out;
}

}  // namespace submss

#endif  // SUBMSS_ANALYSIS_HPP
