#ifndef SUBMSS_SWEEP_HPP
#define SUBMSS_SWEEP_HPP

#include <algorithm>
#include <future>
#include <string>
#include <thread>
#include <vector>

#include "submss/metrics.hpp"
#include "submss/random.hpp"
#include "submss/scenario.hpp"
#include "submss/scenario_config.hpp"

namespace submss {

struct SweepRow {
  std::string value;
  ScenarioMetrics metrics;
};

// Builds the per-value configs up front so that config errors surface before
// any simulation starts. Unless the seed itself is swept, run i gets a seed
// derived from the template seed and i.
inline std::vector<ScenarioConfig> sweep_configs(const ScenarioConfig& base,
                                                 const std::string& key,
                                                 const std::vector<std::string>& values) {
  std::vector<ScenarioConfig> cfgs;
  cfgs.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    ScenarioConfig c = base;
    if (key != "seed") c.seed = derive_seed(base.seed, i);
    apply_setting(c, key, values[i]);
    c.validate();
    cfgs.push_back(std::move(c));
  }
  return cfgs;
}

// One independent engine per value; rows come back in input order.
inline std::vector<SweepRow> sweep(const ScenarioConfig& base, const std::string& key,
                                   const std::vector<std::string>& values,
                                   unsigned max_parallel = 0) {
  const auto cfgs = sweep_configs(base, key, values);
  if (max_parallel == 0) max_parallel = std::max(1u, std::thread::hardware_concurrency());

  std::vector<SweepRow> rows(values.size());
  for (std::size_t begin = 0; begin < cfgs.size(); begin += max_parallel) {
    const std::size_t end = std::min(cfgs.size(), begin + max_parallel);
    std::vector<std::future<ScenarioMetrics>> jobs;
    for (std::size_t i = begin; i < end; ++i) {
      jobs.push_back(std::async(std::launch::async, [&cfgs, i] { return run_scenario(cfgs[i]); }));
    }
    for (std::size_t i = begin; i < end; ++i) {
      rows[i] = SweepRow{values[i], jobs[i - begin].get()};
    }
  }
  return rows;
}

inline std::string sweep_csv(const std::string& key, const std::vector<SweepRow>& rows) {
  std::string out = key + "," + metrics_csv_header() + "\n";
  for (const auto& r : rows) out += r.value + "," + metrics_csv_row(r.metrics) + "\n";
  return out;
}

}  // namespace submss

#endif  // SUBMSS_SWEEP_HPP
