#ifndef SUBMSS_SCENARIO_HPP
#define SUBMSS_SCENARIO_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "submss/engine.hpp"
#include "submss/link.hpp"
#include "submss/metrics.hpp"
#include "submss/random.hpp"
#include "submss/scenario_config.hpp"
#include "submss/tcp_receiver.hpp"
#include "submss/tcp_sender.hpp"

namespace submss {

struct SendRecord {
  SimTime at;
  std::int64_t seq = 0;
  std::int64_t payload = 0;
  bool retransmission = false;
};

struct FlowTrace {
  std::vector<SendRecord> sends;
  std::vector<SimTime> ack_arrivals;
};

// One bottleneck, n bulk flows. Construct, run() once, then inspect.
class Scenario {
 public:
  // RNG stream indices; the AQM owns stream 0 so that adding flows leaves
  // its draws untouched.
  static constexpr std::uint64_t kAqmStream = 0;
  static constexpr std::uint64_t kFlowStreamBase = 1;

  explicit Scenario(ScenarioConfig cfg, bool record_traces = false)
      : cfg_(std::move(cfg)), record_(record_traces) {
    cfg_.validate();
    const SimTime one_way = cfg_.base_rtt / 2;
    const SimTime other_way = cfg_.base_rtt - one_way;

    AqmConfig aqm{cfg_.capacity_bps, cfg_.buffer_limit, cfg_.aqm, cfg_.target_delay,
                  cfg_.effective_ramp_ceiling()};
    bottleneck_ = std::make_unique<Bottleneck>(
        engine_, AqmQueue(aqm, RngStream(cfg_.seed, kAqmStream)), one_way,
        [this](const Packet& p) { on_delivered(p); }, 0);
    return_path_ = std::make_unique<ReturnPath>(
        engine_, other_way, [this](const Ack& a) { on_ack_arrival(a); });
    if (cfg_.ack_outage_start) {
      return_path_->sever(*cfg_.ack_outage_start,
                          *cfg_.ack_outage_start + cfg_.ack_outage_duration);
    }

    const auto n = static_cast<std::size_t>(cfg_.n_flows);
    traces_.resize(n);
    delivered_bits_.assign(n, 0.0);
    delivered_pkts_.assign(n, 0);
    for (std::uint32_t i = 0; i < n; ++i) {
      SenderConfig sc;
      sc.flow_id = i;
      sc.smss = cfg_.smss;
      sc.header_bytes = cfg_.header_bytes();
      sc.mode = cfg_.sender_mode;
      sc.cc = cfg_.cc_variant;
      sc.ecn_capable = cfg_.ecn;
      sc.min_window = cfg_.min_window();
      sc.initial_rtt = cfg_.base_rtt;
      sc.min_rto = cfg_.min_rto;
      senders_.push_back(std::make_unique<TcpSender>(
          engine_, sc, [this](const Packet& p) { on_transmit(p); }));

      ReceiverConfig rc;
      rc.flow_id = i;
      rc.delayed_acks = cfg_.delayed_acks;
      rc.ack_every = cfg_.ack_every;
      rc.delack_timeout = cfg_.delack_timeout;
      receivers_.push_back(std::make_unique<TcpReceiver>(
          engine_, rc, [this](const Ack& a) { return_path_->send(a); }));
    }
  }

  Scenario(const Scenario&) = delete;
  Scenario& operator=(const Scenario&) = delete;

  ScenarioMetrics run() {
    if (ran_) throw std::logic_error("Scenario::run called twice");
    ran_ = true;

    // Flows start within the first base RTT, staggered by their own streams.
    for (std::uint32_t i = 0; i < senders_.size(); ++i) {
      RngStream rng(cfg_.seed, kFlowStreamBase + i);
      const auto offset = SimTime::ns(static_cast<std::int64_t>(
          rng.uniform() * static_cast<double>(cfg_.base_rtt.count())));
      engine_.schedule(offset, {i, EventKind::app_write},
                       [this, i] { senders_[i]->on_app_write(kBulkBytes); });
    }

    queue_samples_.reserve(static_cast<std::size_t>(
        (cfg_.duration - cfg_.effective_warmup()).count() / cfg_.sample_interval.count() + 1));
    engine_.schedule(cfg_.effective_warmup(), {0, EventKind::sample}, [this] { sample(); });
    engine_.run_until(cfg_.duration);
    return collect();
  }

  const ScenarioConfig& config() const { return cfg_; }
  const Engine& engine() const { return engine_; }
  Engine& engine() { return engine_; }
  const TcpSender& sender(std::size_t i) const { return *senders_.at(i); }
  const TcpReceiver& receiver(std::size_t i) const { return *receivers_.at(i); }
  const Bottleneck& bottleneck() const { return *bottleneck_; }
  const FlowTrace& trace(std::size_t i) const { return traces_.at(i); }
  const std::vector<SimTime>& queue_samples() const { return queue_samples_; }

  // Called after each ACK has been processed by its sender.
  using AckObserver = std::function<void(const Ack&, const TcpSender&)>;
  void set_ack_observer(AckObserver f) { ack_observer_ = std::move(f); }

 private:
  static constexpr std::int64_t kBulkBytes = 1'000'000'000'000'000;

  void sample() {
    queue_samples_.push_back(bottleneck_->queue_delay());
    const SimTime next = engine_.now() + cfg_.sample_interval;
    if (next < cfg_.duration) {
      engine_.schedule(next, {0, EventKind::sample}, [this] { sample(); });
    }
  }

  void on_transmit(const Packet& p) {
    if (record_) {
      traces_[p.flow_id].sends.push_back(
          SendRecord{engine_.now(), p.seq_bytes, p.payload, p.is_retransmission});
    }
    bottleneck_->enqueue(p);
  }

  void on_delivered(const Packet& p) {
    const SimTime now = engine_.now();
    if (now >= cfg_.effective_warmup()) {
      delivered_bits_[p.flow_id] += static_cast<double>(p.size) * 8.0;
      ++delivered_pkts_[p.flow_id];
      const auto bin = static_cast<std::size_t>((now - cfg_.effective_warmup()).count() /
                                                cfg_.fairness_bin.count());
      if (bin >= bins_.size()) bins_.resize(bin + 1, std::vector<double>(senders_.size(), 0.0));
      bins_[bin][p.flow_id] += static_cast<double>(p.size) * 8.0;
    }
    receivers_[p.flow_id]->on_segment(p);
  }

  void on_ack_arrival(const Ack& a) {
    if (record_) traces_[a.flow_id].ack_arrivals.push_back(engine_.now());
    senders_[a.flow_id]->on_ack(a);
    if (ack_observer_) ack_observer_(a, *senders_[a.flow_id]);
  }

  ScenarioMetrics collect() const {
    ScenarioMetrics m;
    if (!queue_samples_.empty()) {
      Int128 sum = 0;
      for (SimTime q : queue_samples_) sum += q.count();
      m.mean_queue_delay = SimTime::ns(div_round_half_up(
          sum, static_cast<Int128>(queue_samples_.size())));
      std::vector<SimTime> sorted = queue_samples_;
      const std::size_t k = (sorted.size() * 95 + 99) / 100 - 1;
      std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k),
                       sorted.end());
      m.p95_queue_delay = sorted[k];
    }

    const double span = (cfg_.duration - cfg_.effective_warmup()).seconds();
    double pkt_rate_sum = 0;
    for (std::size_t i = 0; i < senders_.size(); ++i) {
      m.per_flow_throughput.push_back(delivered_bits_[i] / span);
      m.aggregate_throughput += delivered_bits_[i] / span;
      pkt_rate_sum += static_cast<double>(delivered_pkts_[i]) / span;
      m.total_rtos += senders_[i]->stats().rtos;
    }
    m.jain_fairness = jain_index(m.per_flow_throughput);
    m.total_drops = bottleneck_->queue().total_drops();
    m.total_marks = bottleneck_->queue().total_marks();
    m.mean_pkts_per_rtt_per_flow = pkt_rate_sum / static_cast<double>(senders_.size()) *
                                   (cfg_.base_rtt + m.mean_queue_delay).seconds();

    double jsum = 0;
    int jn = 0;
    for (const auto& bin : bins_) {
      const double j = jain_index(bin);
      if (j > 0) {
        jsum += j;
        ++jn;
      }
    }
    m.mean_short_term_jain = jn ? jsum / jn : 0.0;
    return m;
  }

  ScenarioConfig cfg_;
  bool record_;
  bool ran_ = false;
  Engine engine_;
  std::unique_ptr<Bottleneck> bottleneck_;
  std::unique_ptr<ReturnPath> return_path_;
  std::vector<std::unique_ptr<TcpSender>> senders_;
  std::vector<std::unique_ptr<TcpReceiver>> receivers_;
  std::vector<FlowTrace> traces_;
  std::vector<double> delivered_bits_;
  std::vector<std::uint64_t> delivered_pkts_;
  std::vector<std::vector<double>> bins_;
  std::vector<SimTime> queue_samples_;
  AckObserver ack_observer_;
};

inline ScenarioMetrics run_scenario(const ScenarioConfig& cfg) {
  Scenario s(cfg);
  return s.run();
}

}  // namespace submss

#endif  // SUBMSS_SCENARIO_HPP
