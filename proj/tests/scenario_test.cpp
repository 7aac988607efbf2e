#include <gtest/gtest.h>

#include <algorithm>
#include <string>

#include "submss/scenario.hpp"
#include "submss/sweep.hpp"

using namespace submss;

namespace {

ScenarioConfig shipped(const char* name) {
  return load_scenario(std::string(SUBMSS_SCENARIO_DIR) + "/" + name);
}

ScenarioConfig shortened(ScenarioConfig c, int seconds = 20) {
  c.duration = SimTime::s(seconds);
  c.warmup = SimTime::s(seconds / 4);
  return c;
}

std::size_t lines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST(Scenario, SameSeedSameCsvBytes) {
  for (const char* f : {"broadband_ecn_baseline.conf", "broadband_red_baseline.conf"}) {
    const auto cfg = shortened(shipped(f));
    EXPECT_EQ(metrics_csv_row(run_scenario(cfg)), metrics_csv_row(run_scenario(cfg))) << f;
  }
}

TEST(Scenario, DifferentSeedDifferentRun) {
  auto a = shortened(shipped("broadband_red_baseline.conf"));
  auto b = a;
  b.seed = 2;
  EXPECT_NE(metrics_csv_row(run_scenario(a)), metrics_csv_row(run_scenario(b)));
}

TEST(Scenario, RunTwiceIsAnError) {
  Scenario s(shortened(shipped("broadband_ecn_submss.conf"), 1));
  s.run();
  EXPECT_THROW(s.run(), std::logic_error);
}

TEST(Scenario, BaselineEcnBuildsStandingQueueAtTwoPacketsPerRtt) {
  const auto m = run_scenario(shipped("broadband_ecn_baseline.conf"));
  EXPECT_GT(m.mean_queue_delay, SimTime::ms(5));
  EXPECT_NEAR(m.mean_pkts_per_rtt_per_flow, 2.0, 0.15);
  EXPECT_EQ(m.total_drops, 0u);
}

TEST(Scenario, SubmssEcnHoldsTarget) {
  const auto m = run_scenario(shipped("broadband_ecn_submss.conf"));
  EXPECT_NEAR(m.mean_queue_delay.millis(), 5.0, 1.0);
  EXPECT_LT(m.mean_pkts_per_rtt_per_flow, 2.0);
  EXPECT_EQ(m.total_drops, 0u);
}

TEST(Scenario, MetricInvariants) {
  for (const char* f : {"broadband_ecn_baseline.conf", "broadband_ecn_submss.conf",
                        "broadband_red_baseline.conf"}) {
    const auto m = run_scenario(shortened(shipped(f)));
    double sum = 0;
    for (double x : m.per_flow_throughput) sum += x;
    EXPECT_LE(sum, 40e6 * 1.001) << f;
    EXPECT_GT(m.jain_fairness, 0.0);
    EXPECT_LE(m.jain_fairness, 1.0);
    EXPECT_LE(m.mean_queue_delay, m.p95_queue_delay);
  }
}

TEST(Scenario, SingleFlowUncontended) {
  auto c = shortened(shipped("broadband_ecn_submss.conf"));
  c.n_flows = 1;
  const auto m = run_scenario(c);
  ASSERT_EQ(m.per_flow_throughput.size(), 1u);
  EXPECT_GT(m.per_flow_throughput[0], 0.9 * 40e6);
  EXPECT_LE(m.mean_queue_delay, c.target_delay + SimTime::ms(1));
}

TEST(Scenario, BaselineFloorHoldsThroughLossesAndTimeouts) {
  Scenario s(shortened(shipped("broadband_red_baseline.conf")));
  bool below = false;
  s.set_ack_observer([&](const Ack&, const TcpSender& tx) {
    if (tx.cwnd() < 2 * tx.config().smss) below = true;
  });
  const auto m = s.run();
  EXPECT_GT(m.total_rtos, 0u);
  EXPECT_FALSE(below);
}

TEST(Scenario, DctcpAlphaBounded) {
  auto c = shortened(shipped("broadband_ecn_submss.conf"), 10);
  c.cc_variant = CcVariant::dctcp_like;
  Scenario s(c);
  bool out_of_range = false;
  s.set_ack_observer([&](const Ack&, const TcpSender& tx) {
    if (tx.dctcp_alpha() < 0 || tx.dctcp_alpha() > 1) out_of_range = true;
  });
  const auto m = s.run();
  EXPECT_FALSE(out_of_range);
  EXPECT_EQ(m.total_drops, 0u);
}

TEST(Scenario, QueueConservation) {
  Scenario s(shortened(shipped("broadband_red_baseline.conf"), 10));
  s.run();
  for (const auto& c : s.bottleneck().queue().flow_counters()) {
    EXPECT_EQ(c.offered, c.accepted + c.dropped);
    EXPECT_EQ(c.accepted, c.departed + c.in_backlog);
  }
}

TEST(Scenario, AddingFlowsLeavesAqmStreamAlone) {
  // The AQM draws from stream 0 whatever the flow count.
  RngStream a(1, Scenario::kAqmStream), b(1, Scenario::kAqmStream);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(a.uniform(), b.uniform());
  EXPECT_NE(Scenario::kAqmStream, Scenario::kFlowStreamBase);
}

TEST(Csv, HeaderAndRowShape) {
  const auto m = run_scenario(shortened(shipped("broadband_ecn_submss.conf"), 4));
  const std::string header = metrics_csv_header();
  const std::string row = metrics_csv_row(m);
  EXPECT_EQ(std::count(header.begin(), header.end(), ','), std::count(row.begin(), row.end(), ','));
  EXPECT_EQ(row.substr(0, row.find(',')), std::to_string(m.mean_queue_delay.count()));
  EXPECT_EQ(std::count(row.begin(), row.end(), ';'), 11);
  EXPECT_EQ(format_real(1.0 / 3), "0.333333");
  EXPECT_EQ(format_real(40e6), "4e+07");
}

TEST(Sweep, EmptyValuesGiveHeaderOnly) {
  const auto rows = sweep(shipped("broadband_ecn_submss.conf"), "n_flows", {});
  EXPECT_TRUE(rows.empty());
  const auto csv = sweep_csv("n_flows", rows);
  EXPECT_EQ(lines(csv), 1u);
  EXPECT_EQ(csv.rfind("n_flows,mean_queue_delay_ns", 0), 0u);
}

TEST(Sweep, RowsKeepInputOrder) {
  const auto base = shortened(shipped("broadband_ecn_submss.conf"), 4);
  const std::vector<std::string> values = {"8", "2", "5"};
  const auto rows = sweep(base, "n_flows", values, 2);
  ASSERT_EQ(rows.size(), 3u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].value, values[i]);
    EXPECT_EQ(rows[i].metrics.per_flow_throughput.size(), std::stoul(values[i]));
  }
  EXPECT_EQ(sweep_csv("n_flows", rows), sweep_csv("n_flows", sweep(base, "n_flows", values, 1)));
}

TEST(Sweep, SenderModePairs) {
  const auto rows = sweep(shortened(shipped("broadband_ecn_baseline.conf")), "sender_mode",
                          {"baseline", "submss"});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_GT(rows[0].metrics.mean_queue_delay, rows[1].metrics.mean_queue_delay);
}

TEST(Sweep, BaselineQueueGrowsWithFlowsOnceFloorBinds) {
  const auto rows = sweep(shortened(shipped("broadband_ecn_baseline.conf"), 30), "n_flows",
                          {"2", "4", "8", "12", "16", "24"});
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_GE(rows[i].metrics.mean_queue_delay, rows[i - 1].metrics.mean_queue_delay)
        << "n_flows " << rows[i].value;
  }
  // Once the floor binds the queue tracks the two-packet balance point.
  for (std::size_t i = 3; i < rows.size(); ++i) {
    const double n = std::stod(rows[i].value);
    const double balance_ms = 2 * n * 1518 * 8 / 40e6 * 1e3 - 1.0;
    EXPECT_NEAR(rows[i].metrics.mean_queue_delay.millis(), balance_ms, 0.15 * balance_ms)
        << "n_flows " << rows[i].value;
  }
}

TEST(Sweep, BadValueRejectedBeforeRunning) {
  EXPECT_THROW(sweep(shipped("broadband_ecn_submss.conf"), "n_flows", {"4", "zero"}), ConfigError);
}
