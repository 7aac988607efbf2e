#ifndef SUBMSS_METRICS_HPP
#define SUBMSS_METRICS_HPP

#include <cstdint>
#include <cstdio>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "submss/sim_time.hpp"

namespace submss {

// Steady-state outcome of one run, measured over [warmup, duration].
struct ScenarioMetrics {
  SimTime mean_queue_delay;
  SimTime p95_queue_delay;
  std::vector<double> per_flow_throughput;  // bits/s, header-inclusive frames
  double aggregate_throughput = 0;
  double jain_fairness = 0;
  std::uint64_t total_drops = 0;  // whole run
  std::uint64_t total_marks = 0;  // whole run
  std::uint64_t total_rtos = 0;   // whole run
  double mean_pkts_per_rtt_per_flow = 0;
  double mean_short_term_jain = 0;  // Jain index per fairness bin, averaged
};

// (sum x)^2 / (n * sum x^2); 1 for equal shares. Zero-sum input yields 0.
inline double jain_index(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double sum = 0, sq = 0;
  for (double v : x) {
    sum += v;
    sq += v * v;
  }
  if (sq <= 0) return 0.0;
  return sum * sum / (static_cast<double>(x.size()) * sq);
}

inline std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline const char* metrics_csv_header() {
  return "mean_queue_delay_ns,p95_queue_delay_ns,aggregate_throughput_bps,jain_fairness,"
         "total_drops,total_marks,total_rtos,mean_pkts_per_rtt_per_flow,short_term_jain,"
         "per_flow_throughput_bps";
}

inline std::string metrics_csv_row(const ScenarioMetrics& m) {
  std::string flows;
  for (std::size_t i = 0; i < m.per_flow_throughput.size(); ++i) {
    if (i) flows += ';';
    flows += format_real(m.per_flow_throughput[i]);
  }
  return std::to_string(m.mean_queue_delay.count()) + "," +
         std::to_string(m.p95_queue_delay.count()) + "," +
         format_real(m.aggregate_throughput) + "," + format_real(m.jain_fairness) + "," +
         std::to_string(m.total_drops) + "," + std::to_string(m.total_marks) + "," +
         std::to_string(m.total_rtos) + "," + format_real(m.mean_pkts_per_rtt_per_flow) +
         "," + format_real(m.mean_short_term_jain) + "," + flows;
}

}  // namespace submss

#endif  // SUBMSS_METRICS_HPP
